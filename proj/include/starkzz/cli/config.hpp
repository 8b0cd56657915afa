// config.hpp: JSON run configuration for the command-line front end.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "starkzz/benchmarking.hpp"
#include "starkzz/calibration.hpp"
#include "starkzz/crosstalk.hpp"
#include "starkzz/dynamics.hpp"
#include "starkzz/hamiltonian.hpp"

namespace starkzz::cli {

using json = nlohmann::json;

inline const std::vector<std::string>& sweep_axis_names() {
    static const std::vector<std::string> names{"phi_d", "amp_c", "amp_t", "amp_global",
                                                "drive_freq"};
    return names;
}

struct AxisSpec {
    std::string name;
    double start{0.0};
    double stop{0.0};
    int count{1};

    // count == 1 yields {start}; otherwise endpoints inclusive.
    std::vector<double> values() const;
};

// Base drive point; sweep axes override individual fields.
struct DrivePoint {
    double drive_freq{0.0};  // MHz, absolute
    double amp_c{0.0};       // line amplitude, device units
    double amp_t{0.0};
    double phi_d{0.0};       // rad
};

struct SynthSpec {
    DecayModel model{ExponentialModel{}};
    std::vector<int> lengths;
    std::optional<int> shots;
    int samples_per_length{1};
};

struct RamseySpec {
    int points{64};
    double periods{2.5};
    double ramp_ns{20.0};
};

struct RunConfig {
    SystemParams system;
    std::optional<CrosstalkModel> crosstalk;
    std::optional<PulseShape> pulse;
    DrivePoint drive;
    std::vector<AxisSpec> sweep;
    std::string output_dir;          // empty: flag, env var, then "."
    std::string output_format{"csv"};
    std::optional<std::uint64_t> seed;
    double step_ns{default_step_ns};
    std::optional<int> jobs;
    CzCalibrationOptions calibration;
    std::optional<SynthSpec> synth;
    RamseySpec ramsey;

    CrosstalkModel crosstalk_or_identity() const;
    const AxisSpec* axis(const std::string& name) const;
};

// Throws ConfigError naming the offending key.
RunConfig parse_run_config(const json& j);
RunConfig load_run_config(const std::string& path);

// Echo of the effective configuration (after flag overrides).
json to_json(const RunConfig& cfg);

}  // namespace starkzz::cli
