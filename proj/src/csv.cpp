#include "starkzz/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "starkzz/errors.hpp"

namespace starkzz {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    auto flush = [&] {
        const auto b = cur.find_first_not_of(" \t\r");
        const auto e = cur.find_last_not_of(" \t\r");
        cells.push_back(b == std::string::npos ? std::string{} : cur.substr(b, e - b + 1));
        cur.clear();
    };
    for (char ch : line) {
        if (ch == ',') {
            flush();
        } else {
            cur.push_back(ch);
        }
    }
    flush();
    return cells;
}

double parse_double(const std::string& cell, int row, int column) {
    if (cell.empty()) throw IngestionError("empty cell", row, column);
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size() || errno == ERANGE || !std::isfinite(v)) {
        throw IngestionError("not a finite number: '" + cell + "'", row, column);
    }
    return v;
}

namespace {

std::string location(int row, int column) {
    return " (row " + std::to_string(row) + ", column " + std::to_string(column) + ")";
}

[[noreturn]] void fail(const std::string& what, int row, int column) {
    throw IngestionError(what + location(row, column), row, column);
}

double number(const std::string& cell, int row, int column) {
    try {
        return parse_double(cell, row, column);
    } catch (const IngestionError& e) {
        fail(e.what(), row, column);
    }
}

// Reads the header and yields each non-blank data row with its 1-based line number.
template <class RowFn>
void for_each_row(std::istream& in, const std::vector<std::string>& header, RowFn&& fn) {
    std::string line;
    int row = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++row;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto cells = split_csv_line(line);
        if (!have_header) {
            for (std::size_t c = 0; c < header.size(); ++c) {
                if (c >= cells.size() || cells[c] != header[c]) {
                    fail("header mismatch: expected '" + header[c] + "'", row,
                         static_cast<int>(c) + 1);
                }
            }
            if (cells.size() != header.size()) {
                fail("header has extra columns", row, static_cast<int>(header.size()) + 1);
            }
            have_header = true;
            continue;
        }
        if (cells.size() != header.size()) {
            const int col = static_cast<int>(std::min(cells.size(), header.size())) + 1;
            fail("expected " + std::to_string(header.size()) + " columns, found " +
                     std::to_string(cells.size()),
                 row, col);
        }
        fn(cells, row);
    }
    if (!have_header) fail("missing header row", 1, 1);
}

}  // namespace

std::vector<ZZSweepPoint> read_sweep_csv(std::istream& in) {
    std::vector<ZZSweepPoint> out;
    for_each_row(in, {"a_c", "a_t", "phi_d", "zeta_mhz", "sigma_mhz"},
                 [&](const std::vector<std::string>& c, int row) {
                     ZZSweepPoint p;
                     p.a_c = number(c[0], row, 1);
                     p.a_t = number(c[1], row, 2);
                     p.phi_d = number(c[2], row, 3);
                     p.zeta_measured = number(c[3], row, 4);
                     p.zeta_uncertainty = number(c[4], row, 5);
                     if (!(p.zeta_uncertainty > 0.0)) fail("sigma_mhz must be positive", row, 5);
                     out.push_back(p);
                 });
    return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<ZZSweepPoint>& points) {
    out << "a_c,a_t,phi_d,zeta_mhz,sigma_mhz\n";
    for (const auto& p : points) {
        out << format_double(p.a_c) << ',' << format_double(p.a_t) << ','
            << format_double(p.phi_d) << ',' << format_double(p.zeta_measured) << ','
            << format_double(p.zeta_uncertainty) << '\n';
    }
}

DecayDataset read_decay_csv(std::istream& in, DecayKind kind) {
    std::map<int, std::vector<double>> grouped;
    for_each_row(in, {"m", "value"}, [&](const std::vector<std::string>& c, int row) {
        const double m = number(c[0], row, 1);
        if (m < 0.0 || m != std::floor(m) || m > 1e9) {
            fail("m must be a non-negative integer", row, 1);
        }
        const double v = number(c[1], row, 2);
        if (v < 0.0 || v > 1.0) fail("value must lie in [0, 1]", row, 2);
        grouped[static_cast<int>(m)].push_back(v);
    });
    DecayDataset out;
    out.kind = kind;
    for (auto& [m, vals] : grouped) {
        out.lengths.push_back(m);
        out.values.push_back(std::move(vals));
    }
    return out;
}

void write_decay_csv(std::ostream& out, const DecayDataset& data) {
    out << "m,value\n";
    for (std::size_t i = 0; i < data.lengths.size(); ++i) {
        for (double v : data.values[i]) {
            out << data.lengths[i] << ',' << format_double(v) << '\n';
        }
    }
}

std::vector<CbRow> read_cb_csv(std::istream& in) {
    std::vector<CbRow> out;
    for_each_row(in, {"pauli_label", "p", "sigma"}, [&](const std::vector<std::string>& c, int row) {
        CbRow r;
        r.label = c[0];
        if (r.label.empty()) fail("empty Pauli label", row, 1);
        r.p = number(c[1], row, 2);
        r.sigma = number(c[2], row, 3);
        if (r.sigma < 0.0) fail("sigma must be non-negative", row, 3);
        out.push_back(std::move(r));
    });
    return out;
}

void write_ramsey_trace(std::ostream& out, const RamseyResult& result) {
    out << "t_ns,phase0_rad,phase1_rad\n";
    for (std::size_t i = 0; i < result.t_ns.size(); ++i) {
        out << format_double(result.t_ns[i]) << ',' << format_double(result.phase0[i]) << ','
            << format_double(result.phase1[i]) << '\n';
    }
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IngestionError("cannot open '" + path + "'", 0, 0);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace starkzz
