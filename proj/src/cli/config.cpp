#include "starkzz/cli/config.hpp"

#include <fstream>
#include <set>

#include "starkzz/errors.hpp"

namespace starkzz::cli {

std::vector<double> AxisSpec::values() const {
    std::vector<double> v;
    if (count == 1) return {start};
    v.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        v.push_back(start + (stop - start) * static_cast<double>(i) / (count - 1));
    }
    return v;
}

CrosstalkModel RunConfig::crosstalk_or_identity() const {
    return crosstalk ? *crosstalk : CrosstalkModel{CrosstalkMatrix::identity(), 1.0};
}

const AxisSpec* RunConfig::axis(const std::string& name) const {
    for (const auto& a : sweep) {
        if (a.name == name) return &a;
    }
    return nullptr;
}

namespace {

void check_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

double get_number(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    if (!j.at(key).is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return j.at(key).get<double>();
}

double get_number_or(const json& j, const std::string& key, const std::string& where, double def) {
    return j.contains(key) ? get_number(j, key, where) : def;
}

int get_int(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    if (!j.at(key).is_number_integer()) throw ConfigError(where + "." + key + ": expected an integer");
    return j.at(key).get<int>();
}

TransmonParams parse_transmon(const json& j, const std::string& where, int levels) {
    check_keys(j, where, {"freq_01", "anharm"});
    TransmonParams q;
    q.freq_01 = get_number(j, "freq_01", where);
    q.anharm = get_number(j, "anharm", where);
    q.levels = levels;
    return q;
}

SystemParams parse_system(const json& j) {
    check_keys(j, "system", {"preset", "levels", "control", "target", "coupling_j"});
    const int levels = j.contains("levels") ? get_int(j, "levels", "system") : 7;
    SystemParams s;
    if (j.contains("preset")) {
        if (j.contains("control") || j.contains("target") || j.contains("coupling_j")) {
            throw ConfigError("system: 'preset' excludes explicit parameters");
        }
        const auto name = j.at("preset").get<std::string>();
        if (name == "pair_1") {
            s = reference_pair_1(levels);
        } else if (name == "pair_2") {
            s = reference_pair_2(levels);
        } else {
            throw ConfigError("system.preset: unknown preset '" + name + "'");
        }
    } else {
        if (!j.contains("control") || !j.contains("target")) {
            throw ConfigError("system: need 'preset' or 'control' and 'target'");
        }
        s.control = parse_transmon(j.at("control"), "system.control", levels);
        s.target = parse_transmon(j.at("target"), "system.target", levels);
        s.coupling_j = get_number(j, "coupling_j", "system");
    }
    return s;
}

CrosstalkModel parse_crosstalk(const json& j) {
    check_keys(j, "crosstalk", {"c_ct", "phi_ct", "c_tc", "phi_tc", "theta_c", "scale"});
    CrosstalkModel m;
    m.xt.c_ct = get_number_or(j, "c_ct", "crosstalk", 0.0);
    m.xt.phi_ct = get_number_or(j, "phi_ct", "crosstalk", 0.0);
    m.xt.c_tc = get_number_or(j, "c_tc", "crosstalk", 0.0);
    m.xt.phi_tc = get_number_or(j, "phi_tc", "crosstalk", 0.0);
    m.xt.theta_c = get_number_or(j, "theta_c", "crosstalk", 0.0);
    m.scale = get_number_or(j, "scale", "crosstalk", 1.0);
    return m;
}

PulseShape parse_pulse(const json& j) {
    check_keys(j, "pulse", {"total_duration_ns", "flat_fraction"});
    PulseShape p;
    p.total_duration = get_number_or(j, "total_duration_ns", "pulse", p.total_duration);
    p.flat_fraction = get_number_or(j, "flat_fraction", "pulse", p.flat_fraction);
    try {
        p.validate();
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("pulse: ") + e.what());
    }
    return p;
}

DrivePoint parse_drive(const json& j, const SystemParams& sys) {
    check_keys(j, "drive", {"freq_mhz", "target_detuning_mhz", "amp_c", "amp_t", "phi_d"});
    DrivePoint d;
    if (j.contains("freq_mhz") && j.contains("target_detuning_mhz")) {
        throw ConfigError("drive: give either 'freq_mhz' or 'target_detuning_mhz'");
    }
    d.drive_freq = sys.target.freq_01 - 40.0;
    if (j.contains("freq_mhz")) d.drive_freq = get_number(j, "freq_mhz", "drive");
    if (j.contains("target_detuning_mhz")) {
        d.drive_freq = sys.target.freq_01 - get_number(j, "target_detuning_mhz", "drive");
    }
    d.amp_c = get_number_or(j, "amp_c", "drive", 0.0);
    d.amp_t = get_number_or(j, "amp_t", "drive", 0.0);
    d.phi_d = get_number_or(j, "phi_d", "drive", 0.0);
    return d;
}

AxisSpec parse_axis(const json& j, std::size_t index) {
    const std::string where = "sweep[" + std::to_string(index) + "]";
    check_keys(j, where, {"name", "start", "stop", "count"});
    if (!j.contains("name") || !j.at("name").is_string()) throw ConfigError(where + ": missing 'name'");
    AxisSpec a;
    a.name = j.at("name").get<std::string>();
    const auto& names = sweep_axis_names();
    if (std::find(names.begin(), names.end(), a.name) == names.end()) {
        throw ConfigError(where + ": unknown sweep axis '" + a.name + "'");
    }
    a.start = get_number(j, "start", where);
    a.count = j.contains("count") ? get_int(j, "count", where) : 1;
    a.stop = get_number_or(j, "stop", where, a.start);
    if (a.count < 1) throw ConfigError(where + ".count: must be >= 1");
    return a;
}

SynthSpec parse_synth(const json& j) {
    check_keys(j, "synth", {"model", "a", "p", "b", "gamma", "lengths", "shots", "samples_per_length"});
    SynthSpec s;
    const auto model = j.value("model", std::string("exponential"));
    if (model == "exponential") {
        s.model = ExponentialModel{get_number(j, "a", "synth"), get_number(j, "p", "synth")};
    } else if (model == "leakage") {
        s.model = LeakageModel{get_number(j, "a", "synth"), get_number(j, "b", "synth"),
                               get_number(j, "gamma", "synth")};
    } else {
        throw ConfigError("synth.model: unknown model '" + model + "'");
    }
    if (!j.contains("lengths") || !j.at("lengths").is_array() || j.at("lengths").empty()) {
        throw ConfigError("synth: 'lengths' must be a non-empty array");
    }
    for (const auto& m : j.at("lengths")) {
        if (!m.is_number_integer()) throw ConfigError("synth.lengths: expected integers");
        s.lengths.push_back(m.get<int>());
    }
    if (j.contains("shots") && !j.at("shots").is_null()) {
        s.shots = get_int(j, "shots", "synth");
        if (*s.shots < 1) throw ConfigError("synth.shots: must be >= 1");
    }
    if (j.contains("samples_per_length")) {
        s.samples_per_length = get_int(j, "samples_per_length", "synth");
    }
    return s;
}

}  // namespace

RunConfig parse_run_config(const json& j) {
    check_keys(j, "config", {"system", "crosstalk", "pulse", "drive", "sweep", "output", "seed",
                             "step_ns", "jobs", "calibration", "synth", "ramsey"});
    RunConfig cfg;
    try {
        if (!j.contains("system")) throw ConfigError("config: missing 'system'");
        cfg.system = parse_system(j.at("system"));
        cfg.system.validate();
        if (j.contains("crosstalk")) cfg.crosstalk = parse_crosstalk(j.at("crosstalk"));
        if (j.contains("pulse")) cfg.pulse = parse_pulse(j.at("pulse"));
        cfg.drive = parse_drive(j.value("drive", json::object()), cfg.system);
        if (j.contains("sweep")) {
            if (!j.at("sweep").is_array()) throw ConfigError("sweep: expected an array");
            std::set<std::string> seen;
            for (std::size_t i = 0; i < j.at("sweep").size(); ++i) {
                auto a = parse_axis(j.at("sweep")[i], i);
                if (!seen.insert(a.name).second) throw ConfigError("sweep: duplicate axis '" + a.name + "'");
                cfg.sweep.push_back(a);
            }
        }
        if (j.contains("output")) {
            const auto& o = j.at("output");
            check_keys(o, "output", {"path", "format"});
            cfg.output_dir = o.value("path", std::string{});
            cfg.output_format = o.value("format", std::string("csv"));
            if (cfg.output_format != "csv") {
                throw ConfigError("output.format: only 'csv' is supported");
            }
        }
        if (j.contains("seed")) {
            if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
            cfg.seed = j.at("seed").get<std::uint64_t>();
        }
        cfg.step_ns = get_number_or(j, "step_ns", "config", cfg.step_ns);
        if (!(cfg.step_ns > 0.0)) throw ConfigError("step_ns: must be positive");
        if (j.contains("jobs")) cfg.jobs = get_int(j, "jobs", "config");
        if (j.contains("calibration")) {
            const auto& c = j.at("calibration");
            check_keys(c, "calibration", {"min_r", "band_threshold", "amplitude_tolerance", "local_z_points"});
            cfg.calibration.min_r = get_number_or(c, "min_r", "calibration", cfg.calibration.min_r);
            cfg.calibration.band_threshold =
                get_number_or(c, "band_threshold", "calibration", cfg.calibration.band_threshold);
            cfg.calibration.amplitude_tolerance = get_number_or(
                c, "amplitude_tolerance", "calibration", cfg.calibration.amplitude_tolerance);
            if (c.contains("local_z_points")) {
                cfg.calibration.local_z_points = get_int(c, "local_z_points", "calibration");
            }
        }
        if (j.contains("synth")) cfg.synth = parse_synth(j.at("synth"));
        if (j.contains("ramsey")) {
            const auto& r = j.at("ramsey");
            check_keys(r, "ramsey", {"points", "periods", "ramp_ns"});
            if (r.contains("points")) cfg.ramsey.points = get_int(r, "points", "ramsey");
            cfg.ramsey.periods = get_number_or(r, "periods", "ramsey", cfg.ramsey.periods);
            cfg.ramsey.ramp_ns = get_number_or(r, "ramp_ns", "ramsey", cfg.ramsey.ramp_ns);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config '" + path + "'");
    json j;
    try {
        f >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path + "': " + e.what());
    }
    return parse_run_config(j);
}

json to_json(const RunConfig& cfg) {
    json j;
    auto q = [](const TransmonParams& t) {
        return json{{"freq_01", t.freq_01}, {"anharm", t.anharm}};
    };
    j["system"] = {{"levels", cfg.system.control.levels},
                   {"control", q(cfg.system.control)},
                   {"target", q(cfg.system.target)},
                   {"coupling_j", cfg.system.coupling_j}};
    if (cfg.crosstalk) {
        const auto& m = *cfg.crosstalk;
        j["crosstalk"] = {{"c_ct", m.xt.c_ct}, {"phi_ct", m.xt.phi_ct}, {"c_tc", m.xt.c_tc},
                          {"phi_tc", m.xt.phi_tc}, {"theta_c", m.xt.theta_c}, {"scale", m.scale}};
    }
    if (cfg.pulse) {
        j["pulse"] = {{"total_duration_ns", cfg.pulse->total_duration},
                      {"flat_fraction", cfg.pulse->flat_fraction}};
    }
    j["drive"] = {{"freq_mhz", cfg.drive.drive_freq}, {"amp_c", cfg.drive.amp_c},
                  {"amp_t", cfg.drive.amp_t}, {"phi_d", cfg.drive.phi_d}};
    j["sweep"] = json::array();
    for (const auto& a : cfg.sweep) {
        j["sweep"].push_back({{"name", a.name}, {"start", a.start}, {"stop", a.stop}, {"count", a.count}});
    }
    j["output"] = {{"path", cfg.output_dir}, {"format", cfg.output_format}};
    j["seed"] = cfg.seed ? json(*cfg.seed) : json(nullptr);
    j["step_ns"] = cfg.step_ns;
    j["jobs"] = cfg.jobs ? json(*cfg.jobs) : json(nullptr);
    j["calibration"] = {{"min_r", cfg.calibration.min_r},
                        {"band_threshold", cfg.calibration.band_threshold},
                        {"amplitude_tolerance", cfg.calibration.amplitude_tolerance},
                        {"local_z_points", cfg.calibration.local_z_points}};
    if (cfg.synth) {
        json s;
        std::visit(
            [&s](const auto& m) {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, ExponentialModel>) {
                    s = {{"model", "exponential"}, {"a", m.a}, {"p", m.p}};
                } else {
                    s = {{"model", "leakage"}, {"a", m.a}, {"b", m.b}, {"gamma", m.gamma}};
                }
            },
            cfg.synth->model);
        s["lengths"] = cfg.synth->lengths;
        s["shots"] = cfg.synth->shots ? json(*cfg.synth->shots) : json(nullptr);
        s["samples_per_length"] = cfg.synth->samples_per_length;
        j["synth"] = s;
    }
    j["ramsey"] = {{"points", cfg.ramsey.points}, {"periods", cfg.ramsey.periods},
                   {"ramp_ns", cfg.ramsey.ramp_ns}};
    return j;
}

}  // namespace starkzz::cli
