// csv.hpp: schema-checked CSV ingestion and emission.
//
// All readers require the exact header row, reject blank cells and trailing
// garbage, and throw IngestionError with the 1-based row (file line) and column.
#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "starkzz/benchmarking.hpp"
#include "starkzz/crosstalk.hpp"
#include "starkzz/dynamics.hpp"

namespace starkzz {

// Fixed 12-significant-digit formatting, "nan"/"inf"/"-inf" for non-finite values.
std::string format_double(double v);

// Parses one numeric cell; throws IngestionError on failure.
double parse_double(const std::string& cell, int row, int column);

// Splits on ',' and trims surrounding whitespace (and a trailing '\r').
std::vector<std::string> split_csv_line(const std::string& line);

// `a_c,a_t,phi_d,zeta_mhz,sigma_mhz`
std::vector<ZZSweepPoint> read_sweep_csv(std::istream& in);
void write_sweep_csv(std::ostream& out, const std::vector<ZZSweepPoint>& points);

// `m,value`, one row per sample; rows sharing m are grouped, lengths sorted.
DecayDataset read_decay_csv(std::istream& in, DecayKind kind = DecayKind::rb);
void write_decay_csv(std::ostream& out, const DecayDataset& data);

struct CbRow {
    std::string label;
    double p{0.0};
    double sigma{0.0};
};

// `pauli_label,p,sigma`
std::vector<CbRow> read_cb_csv(std::istream& in);

// `t_ns,phase0_rad,phase1_rad`
void write_ramsey_trace(std::ostream& out, const RamseyResult& result);

// Reads a whole file; throws IngestionError (row 0) if it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace starkzz
