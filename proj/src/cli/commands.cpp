#include "starkzz/cli/commands.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "starkzz/benchmarking.hpp"
#include "starkzz/calibration.hpp"
#include "starkzz/cli/config.hpp"
#include "starkzz/crosstalk.hpp"
#include "starkzz/csv.hpp"
#include "starkzz/errors.hpp"
#include "starkzz/parallel.hpp"
#include "starkzz/perturbation.hpp"
#include "starkzz/spectrum.hpp"

#ifndef STARKZZ_VERSION
#define STARKZZ_VERSION "unknown"
#endif

namespace starkzz::cli {

std::string digest_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

namespace fs = std::filesystem;

// 12 significant digits; non-finite values become null.
json num(double v) {
    if (!std::isfinite(v)) return nullptr;
    return std::strtod(format_double(v).c_str(), nullptr);
}

struct Options {
    std::string config_path;
    std::string output_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> levels;
    std::optional<double> step_ns;
    std::optional<int> jobs;
    int dim{4};
    std::string fit_kind;
    std::string input, reference, interleaved, purity;
    std::optional<double> p_ref, p_int, p_rb, unitarity, e_f, e_s;
};

// Shared state for one invocation; the manifest is assembled here.
class Run {
public:
    Run(std::string command, const Options& opts) : command_(std::move(command)), opts_(opts) {}

    RunConfig& config() {
        if (!config_) {
            if (opts_.config_path.empty()) throw ConfigError(command_ + ": --config is required");
            config_ = load_run_config(opts_.config_path);
            inputs_.push_back({{"path", opts_.config_path},
                               {"digest", digest_hex(read_file(opts_.config_path))}});
            apply_overrides(*config_);
        }
        return *config_;
    }

    bool has_config() const { return !opts_.config_path.empty(); }

    std::string ingest(const std::string& path) {
        const std::string bytes = read_file(path);
        inputs_.push_back({{"path", path}, {"digest", digest_hex(bytes)}});
        return bytes;
    }

    std::string digest_of(const std::string& path) const {
        for (const auto& i : inputs_) {
            if (i["path"] == path) return i["digest"].get<std::string>();
        }
        return {};
    }

    fs::path output_dir() {
        std::string dir = opts_.output_dir;
        if (dir.empty() && config_) dir = config_->output_dir;
        if (dir.empty()) {
            if (const char* env = std::getenv(output_dir_env)) dir = env;
        }
        if (dir.empty()) dir = ".";
        fs::create_directories(dir);
        return dir;
    }

    void write(const std::string& name, const std::string& contents) {
        const fs::path p = output_dir() / name;
        std::ofstream f(p, std::ios::binary);
        if (!f) throw Error("cannot write '" + p.string() + "'");
        f << contents;
        outputs_.push_back(name);
    }

    void flag(const std::string& name, std::size_t count) { flags_[name] = count; }

    std::uint64_t seed() const {
        if (opts_.seed) return *opts_.seed;
        if (config_ && config_->seed) return *config_->seed;
        throw ConfigError(command_ + ": an explicit seed is required (--seed or config 'seed')");
    }

    void write_manifest(const std::string& status, const std::string& error) {
        json m;
        m["tool"] = "starkzz";
        m["version"] = STARKZZ_VERSION;
        m["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." +
                             std::to_string(EIGEN_MAJOR_VERSION) + "." +
                             std::to_string(EIGEN_MINOR_VERSION);
        m["command"] = command_;
        m["status"] = status;
        if (!error.empty()) m["error"] = error;
        m["config"] = config_ ? to_json(*config_) : json(nullptr);
        json seed = nullptr;
        if (opts_.seed) {
            seed = *opts_.seed;
        } else if (config_ && config_->seed) {
            seed = *config_->seed;
        }
        m["seed"] = seed;
        m["inputs"] = inputs_;
        m["outputs"] = outputs_;
        m["flags"] = flags_;
        const fs::path p = output_dir() / "manifest.json";
        std::ofstream f(p, std::ios::binary);
        f << m.dump(2) << '\n';
    }

    int jobs() const {
        if (opts_.jobs) return std::max(1, *opts_.jobs);
        if (config_ && config_->jobs) return std::max(1, *config_->jobs);
        return default_jobs();
    }

    const Options& opts() const { return opts_; }

private:
    void apply_overrides(RunConfig& cfg) const {
        if (opts_.levels) {
            cfg.system.control.levels = *opts_.levels;
            cfg.system.target.levels = *opts_.levels;
            try {
                cfg.system.validate();
            } catch (const InvalidParameter& e) {
                throw ConfigError(std::string("--levels: ") + e.what());
            }
        }
        if (opts_.step_ns) {
            if (!(*opts_.step_ns > 0.0)) throw ConfigError("--step-ns: must be positive");
            cfg.step_ns = *opts_.step_ns;
        }
        if (opts_.seed) cfg.seed = *opts_.seed;
        if (opts_.jobs) cfg.jobs = *opts_.jobs;
        if (!opts_.output_dir.empty()) cfg.output_dir = opts_.output_dir;
    }

    std::string command_;
    Options opts_;
    std::optional<RunConfig> config_;
    json inputs_ = json::array();
    std::vector<std::string> outputs_;
    std::map<std::string, std::size_t> flags_;
};

// ---------------------------------------------------------------- zz-sweep

struct SweepRow {
    std::vector<double> axes;
    double zeta_exact{std::numeric_limits<double>::quiet_NaN()};
    double zeta_pt{std::numeric_limits<double>::quiet_NaN()};
    std::string flag{"none"};
};

void cmd_zz_sweep(Run& run) {
    const RunConfig& cfg = run.config();
    const auto model = cfg.crosstalk_or_identity();
    std::vector<std::vector<double>> axes;
    std::size_t total = 1;
    for (const auto& a : cfg.sweep) {
        axes.push_back(a.values());
        total *= axes.back().size();
    }
    std::vector<SweepRow> rows(total);
    parallel_for(total, run.jobs(), [&](std::size_t idx) {
        DrivePoint p = cfg.drive;
        SweepRow& row = rows[idx];
        std::size_t rem = idx;
        row.axes.resize(axes.size());
        for (std::size_t k = axes.size(); k-- > 0;) {
            const double v = axes[k][rem % axes[k].size()];
            rem /= axes[k].size();
            row.axes[k] = v;
            const auto& name = cfg.sweep[k].name;
            if (name == "phi_d") p.phi_d = v;
            else if (name == "amp_c") p.amp_c = v;
            else if (name == "amp_t") p.amp_t = v;
            else if (name == "amp_global") p.amp_c = p.amp_t = v;
            else if (name == "drive_freq") p.drive_freq = v;
        }
        DriveConfig drive;
        drive.drive_freq = p.drive_freq;
        std::tie(drive.eps_c, drive.eps_t) = apply_crosstalk(model, p.amp_c, p.amp_t, p.phi_d);
        try {
            const auto dressed = labeled_spectrum(cfg.system, drive);
            row.zeta_exact = dressed.zz();
            row.flag = to_string(dressed.flag);
        } catch (const LabelingFailure&) {
            row.flag = "labeling_failure";
        }
        try {
            row.zeta_pt = zeta_pt_total(cfg.system, drive);
        } catch (const Error&) {
            if (row.flag == "none") row.flag = "pt_resonance";
        }
    });
    std::ostringstream os;
    for (const auto& a : cfg.sweep) os << a.name << ',';
    os << "zeta_exact_mhz,zeta_pt_mhz,flag\n";
    std::map<std::string, std::size_t> counts;
    for (const auto& r : rows) {
        for (double v : r.axes) os << format_double(v) << ',';
        os << format_double(r.zeta_exact) << ',' << format_double(r.zeta_pt) << ',' << r.flag << '\n';
        if (r.flag != "none") ++counts[r.flag];
    }
    run.write("zz_sweep.csv", os.str());
    run.flag("rows", rows.size());
    for (const auto& [k, v] : counts) run.flag(k, v);
}

// ---------------------------------------------------------------- calibrate

json matrix_json(const Matrix4c& m) {
    json re = json::array(), im = json::array();
    for (int i = 0; i < 4; ++i) {
        json rr = json::array(), ri = json::array();
        for (int j = 0; j < 4; ++j) {
            rr.push_back(num(m(i, j).real()));
            ri.push_back(num(m(i, j).imag()));
        }
        re.push_back(rr);
        im.push_back(ri);
    }
    return {{"re", re}, {"im", im}};
}

void cmd_calibrate(Run& run) {
    const RunConfig& cfg = run.config();
    if (!cfg.pulse) throw ConfigError("calibrate: 'pulse' must be configured");
    if (!cfg.crosstalk) throw ConfigError("calibrate: 'crosstalk' must be configured");
    const AxisSpec* amp = cfg.axis("amp_global");
    const AxisSpec* freq = cfg.axis("drive_freq");
    if (!amp || !freq) throw ConfigError("calibrate: sweep needs 'amp_global' and 'drive_freq' axes");
    for (const auto& a : cfg.sweep) {
        if (a.name != "amp_global" && a.name != "drive_freq") {
            throw ConfigError("calibrate: unsupported sweep axis '" + a.name + "'");
        }
    }
    RSweepConfig sc;
    sc.sys = cfg.system;
    sc.crosstalk = *cfg.crosstalk;
    sc.shape = *cfg.pulse;
    sc.phi_d = cfg.drive.phi_d;
    sc.amplitudes = amp->values();
    sc.drive_freqs = freq->values();
    sc.step = cfg.step_ns;
    sc.jobs = run.jobs();

    CzCalibration cal;
    try {
        cal = calibrate_cz(sc, cfg.calibration);
    } catch (const CalibrationFailure&) {
        throw;
    }
    std::ostringstream csv;
    write_rmap_csv(cal.map, csv);
    run.write("rmap.csv", csv.str());

    json r;
    r["selected"] = {{"amplitude", num(cal.amplitude)},
                     {"drive_freq_mhz", num(cal.drive_freq)},
                     {"target_detuning_mhz", num(cfg.system.target.freq_01 - cal.drive_freq)}};
    r["r_grid_max"] = num(cal.r_grid_max);
    r["r_refined"] = num(cal.r_refined);
    r["band"] = {{"threshold", num(cfg.calibration.band_threshold)},
                 {"lo_mhz", num(cal.band.lo)},
                 {"hi_mhz", num(cal.band.hi)},
                 {"width_mhz", num(cal.band.width())}};
    r["conditional_phase_rad"] = num(cal.conditional_phase);
    r["local_z"] = {{"phi_zi_rad", num(cal.phi_zi)}, {"phi_iz_rad", num(cal.phi_iz)}};
    r["fidelity_uncorrected"] = num(cal.fidelity_uncorrected);
    r["fidelity"] = num(cal.fidelity);
    r["leakage"] = num(cal.leakage);
    r["compiled_unitary"] = matrix_json(cal.compiled);
    r["flagged_cells"] = cal.map.flagged_count();
    run.write("calibration.json", r.dump(2) + "\n");
    run.flag("rmap_flagged", cal.map.flagged_count());
}

// ---------------------------------------------------------------- fit

json decay_json(const DecayFit& f) {
    return {{"a", num(f.a)},          {"sigma_a", num(f.sigma_a)}, {"p", num(f.p)},
            {"sigma_p", num(f.sigma_p)}, {"chi_square", num(f.chi_square)},
            {"clamped", f.clamped}};
}

json leakage_json(const LeakageFit& f) {
    return {{"a", num(f.a)},
            {"b", num(f.b)},
            {"gamma", num(f.gamma)},
            {"gamma_up", num(f.gamma_up)},
            {"gamma_down", num(f.gamma_down)},
            {"sigma_b", num(f.sigma_b)},
            {"sigma_gamma", num(f.sigma_gamma)},
            {"sigma_up", num(f.sigma_up)},
            {"sigma_down", num(f.sigma_down)},
            {"chi_square", num(f.chi_square)}};
}

DecayDataset load_decay(Run& run, const std::string& path, DecayKind kind) {
    std::istringstream in(run.ingest(path));
    return read_decay_csv(in, kind);
}

json input_ref(const Run& run, const std::string& path) {
    return {{"path", path}, {"digest", run.digest_of(path)}};
}

std::string require(const std::string& value, const char* flag, const std::string& kind) {
    if (value.empty()) throw ConfigError("fit " + kind + ": " + flag + " is required");
    return value;
}

json fit_crosstalk_report(Run& run) {
    const RunConfig& cfg = run.config();
    const auto path = require(run.opts().input, "--input", "crosstalk");
    std::istringstream in(run.ingest(path));
    const auto data = read_sweep_csv(in);
    const auto res = fit_crosstalk(data, cfg.system, cfg.drive.drive_freq, cfg.crosstalk_or_identity());
    const auto& xt = res.model.xt;
    json r;
    r["input"] = input_ref(run, path);
    r["points"] = data.size();
    r["drive_freq_mhz"] = num(cfg.drive.drive_freq);
    r["parameters"] = {{"c_ct", num(xt.c_ct)},     {"phi_ct", num(xt.phi_ct)},
                       {"c_tc", num(xt.c_tc)},     {"phi_tc", num(xt.phi_tc)},
                       {"theta_c", num(xt.theta_c)}, {"scale", num(res.model.scale)}};
    const char* names[] = {"c_ct", "phi_ct", "c_tc", "phi_tc", "theta_c", "scale"};
    json u;
    for (int i = 0; i < 6; ++i) u[names[i]] = num(res.uncertainty[static_cast<std::size_t>(i)]);
    r["uncertainties"] = u;
    r["chi_square"] = num(res.chi_square);
    r["residual_ss_mhz2"] = num(res.residual_ss);
    r["evaluations"] = res.evaluations;
    r["converged"] = res.converged;
    return r;
}

json fit_rb_report(Run& run) {
    const auto path = require(run.opts().input, "--input", "rb");
    const auto fit = fit_decay(load_decay(run, path, DecayKind::rb));
    const double d = run.opts().dim;
    json r = decay_json(fit);
    r["input"] = input_ref(run, path);
    r["dimension"] = run.opts().dim;
    r["error_per_clifford"] = num((1.0 - fit.p) * (d - 1.0) / d);
    r["process_infidelity"] = num((1.0 - fit.p) * (1.0 - 1.0 / (d * d)));
    if (fit.clamped) run.flag("clamped_fits", 1);
    return r;
}

json fit_irb_report(Run& run) {
    const auto& o = run.opts();
    json r;
    double p_ref = 0.0, p_int = 0.0;
    if (o.p_ref || o.p_int) {
        if (!o.p_ref || !o.p_int) throw ConfigError("fit irb: give both --p-ref and --p-int");
        p_ref = *o.p_ref;
        p_int = *o.p_int;
        r["source"] = "values";
    } else {
        const auto ref_path = require(o.reference, "--reference", "irb");
        const auto int_path = require(o.interleaved, "--interleaved", "irb");
        const auto ref = fit_decay(load_decay(run, ref_path, DecayKind::rb));
        const auto inter = fit_decay(load_decay(run, int_path, DecayKind::irb));
        r["source"] = "datasets";
        r["reference"] = decay_json(ref);
        r["reference"]["input"] = input_ref(run, ref_path);
        r["interleaved"] = decay_json(inter);
        r["interleaved"]["input"] = input_ref(run, int_path);
        p_ref = ref.p;
        p_int = inter.p;
        const std::size_t clamped = (ref.clamped ? 1u : 0u) + (inter.clamped ? 1u : 0u);
        if (clamped) run.flag("clamped_fits", clamped);
    }
    const auto est = interleaved_fidelity(p_ref, p_int, o.dim);
    r["dimension"] = o.dim;
    r["p_ref"] = num(p_ref);
    r["p_int"] = num(p_int);
    r["fidelity"] = num(est.fidelity);
    r["gate_error"] = num(1.0 - est.fidelity);
    r["warning"] = est.warning;
    if (est.warning) run.flag("fidelity_warnings", 1);
    return r;
}

json fit_cb_report(Run& run) {
    const auto& o = run.opts();
    const auto path = require(o.input, "--input", "cb");
    auto load = [&](const std::string& p) {
        std::istringstream in(run.ingest(p));
        const auto rows = read_cb_csv(in);
        std::map<std::string, double> decays;
        for (const auto& row : rows) {
            if (!decays.emplace(row.label, row.p).second) {
                throw IngestionError("duplicate Pauli label '" + row.label + "'", 0, 1);
            }
        }
        return std::pair{rows, decays};
    };
    const auto [rows, decays] = load(path);
    const auto cb = cb_analyze(decays, o.dim);
    json r;
    r["input"] = input_ref(run, path);
    r["dimension"] = o.dim;
    json labels = json::array();
    for (const auto& row : rows) {
        labels.push_back({{"label", row.label},
                          {"p", num(row.p)},
                          {"sigma", num(row.sigma)},
                          {"error_rate", num(cb.error_rates.at(row.label))}});
    }
    r["labels"] = labels;
    r["mean_decay"] = num(cb.mean_decay);
    r["process_infidelity"] = num(cb.process_infidelity);
    if (!o.reference.empty()) {
        const auto [ref_rows, ref_decays] = load(o.reference);
        const auto ref = cb_analyze(ref_decays, o.dim);
        const auto est = interleaved_fidelity(ref.mean_decay, cb.mean_decay, o.dim);
        r["reference"] = {{"input", input_ref(run, o.reference)},
                          {"mean_decay", num(ref.mean_decay)},
                          {"process_infidelity", num(ref.process_infidelity)}};
        r["fidelity"] = num(est.fidelity);
        r["gate_error"] = num(1.0 - est.fidelity);
        r["warning"] = est.warning;
        if (est.warning) run.flag("fidelity_warnings", 1);
    }
    return r;
}

json budget_json(const ErrorBudget& b) {
    return {{"e_f", num(b.e_f)}, {"e_s", num(b.e_s)}, {"e_u", num(b.e_u)}, {"floored", b.floored}};
}

json fit_xrb_report(Run& run) {
    const auto& o = run.opts();
    json r;
    ErrorBudget b;
    if (o.e_f || o.e_s) {
        if (!o.e_f || !o.e_s) throw ConfigError("fit xrb: give both --e-f and --e-s");
        b = ErrorBudget::from_infidelities(*o.e_f, *o.e_s);
        r["source"] = "infidelities";
    } else {
        double p_rb = 0.0, u = 0.0;
        if (o.p_rb || o.unitarity) {
            if (!o.p_rb || !o.unitarity) throw ConfigError("fit xrb: give both --p-rb and --unitarity");
            p_rb = *o.p_rb;
            u = *o.unitarity;
            r["source"] = "values";
        } else {
            const auto rb_path = require(o.input, "--input", "xrb");
            const auto pur_path = require(o.purity, "--purity", "xrb");
            const auto rb = fit_decay(load_decay(run, rb_path, DecayKind::rb));
            const auto pur = fit_decay(load_decay(run, pur_path, DecayKind::purity));
            r["source"] = "datasets";
            r["rb"] = decay_json(rb);
            r["rb"]["input"] = input_ref(run, rb_path);
            r["purity"] = decay_json(pur);
            r["purity"]["input"] = input_ref(run, pur_path);
            p_rb = rb.p;
            u = pur.p;
        }
        r["p_rb"] = num(p_rb);
        r["unitarity"] = num(u);
        b = xrb_decompose(p_rb, u, o.dim);
    }
    r["dimension"] = o.dim;
    r["budget"] = budget_json(b);
    if (b.floored) run.flag("budget_floored", 1);
    return r;
}

json fit_lrb_report(Run& run) {
    const auto& o = run.opts();
    json r;
    if (!o.input.empty()) {
        r["fit"] = leakage_json(lrb_fit(load_decay(run, o.input, DecayKind::leakage_pop)));
        r["fit"]["input"] = input_ref(run, o.input);
        return r;
    }
    const auto ref_path = require(o.reference, "--reference (or --input)", "lrb");
    const auto int_path = require(o.interleaved, "--interleaved", "lrb");
    const auto ref = lrb_fit(load_decay(run, ref_path, DecayKind::leakage_pop));
    const auto inter = lrb_fit(load_decay(run, int_path, DecayKind::leakage_pop));
    const auto lpg = leakage_per_gate(inter.gamma_up, ref.gamma_up);
    r["reference"] = leakage_json(ref);
    r["reference"]["input"] = input_ref(run, ref_path);
    r["interleaved"] = leakage_json(inter);
    r["interleaved"]["input"] = input_ref(run, int_path);
    r["leakage_per_gate"] = num(lpg.rate);
    r["leakage_per_gate_floored"] = lpg.floored;
    if (lpg.floored) run.flag("leakage_floored", 1);
    return r;
}

void cmd_fit(Run& run) {
    const auto& kind = run.opts().fit_kind;
    json r;
    if (kind == "crosstalk") r = fit_crosstalk_report(run);
    else if (kind == "rb") r = fit_rb_report(run);
    else if (kind == "irb") r = fit_irb_report(run);
    else if (kind == "cb") r = fit_cb_report(run);
    else if (kind == "xrb") r = fit_xrb_report(run);
    else if (kind == "lrb") r = fit_lrb_report(run);
    else throw ConfigError("fit: unknown kind '" + kind + "'");
    r["kind"] = kind;
    run.write("fit_" + kind + ".json", r.dump(2) + "\n");
}

// ---------------------------------------------------------------- synth, ramsey

void cmd_synth(Run& run) {
    const RunConfig& cfg = run.config();
    if (!cfg.synth) throw ConfigError("synth: 'synth' section must be configured");
    const auto& s = *cfg.synth;
    const auto data = synth_decay(s.model, s.lengths, s.shots, run.seed(), s.samples_per_length);
    std::ostringstream os;
    write_decay_csv(os, data);
    run.write("synth_decay.csv", os.str());
}

void cmd_ramsey(Run& run) {
    const RunConfig& cfg = run.config();
    DriveConfig drive;
    drive.drive_freq = cfg.drive.drive_freq;
    std::tie(drive.eps_c, drive.eps_t) =
        apply_crosstalk(cfg.crosstalk_or_identity(), cfg.drive.amp_c, cfg.drive.amp_t, cfg.drive.phi_d);
    const auto times = ramsey_time_grid(cfg.system, drive, cfg.ramsey.points, cfg.ramsey.periods);
    RamseyOptions ro;
    ro.ramp_ns = cfg.ramsey.ramp_ns;
    ro.step = cfg.step_ns;
    const auto res = ramsey_zz(cfg.system, drive, times, ro);
    std::ostringstream os;
    write_ramsey_trace(os, res);
    run.write("ramsey_trace.csv", os.str());
    json r;
    r["zeta_mhz"] = num(res.zeta);
    r["freq0_mhz"] = num(res.freq0);
    r["freq1_mhz"] = num(res.freq1);
    try {
        r["zeta_exact_mhz"] = num(zz_rate(cfg.system, drive));
    } catch (const LabelingFailure&) {
        r["zeta_exact_mhz"] = nullptr;
        run.flag("labeling_failure", 1);
    }
    r["points"] = times.size();
    run.write("ramsey.json", r.dump(2) + "\n");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Driven two-transmon ZZ simulation and benchmarking analysis", "starkzz"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--config", o.config_path, "JSON run configuration");
    app.add_option("--output-dir", o.output_dir,
                   std::string("Output directory (default: $") + output_dir_env + " or .)");
    app.add_option("--seed", o.seed, "RNG seed for synthetic data");
    app.add_option("--levels", o.levels, "Transmon levels kept per qubit")->check(CLI::Range(3, 20));
    app.add_option("--step-ns", o.step_ns, "Propagator time step in ns");
    app.add_option("--jobs", o.jobs, "Worker threads (default: available processors)")
        ->check(CLI::PositiveNumber);

    auto* zz = app.add_subcommand("zz-sweep", "ZZ rate over a parameter grid");
    auto* cal = app.add_subcommand("calibrate", "R-map sweep and CZ calibration");
    auto* fit = app.add_subcommand("fit", "Fit benchmarking or crosstalk data");
    fit->add_option("kind", o.fit_kind, "crosstalk|rb|irb|cb|xrb|lrb")
        ->required()
        ->check(CLI::IsMember({"crosstalk", "rb", "irb", "cb", "xrb", "lrb"}));
    fit->add_option("--input", o.input, "Primary CSV dataset");
    fit->add_option("--reference", o.reference, "Reference dataset (irb, cb, lrb)");
    fit->add_option("--interleaved", o.interleaved, "Interleaved dataset (irb, lrb)");
    fit->add_option("--purity", o.purity, "Purity decay dataset (xrb)");
    fit->add_option("--p-ref", o.p_ref, "Reference decay parameter (irb)");
    fit->add_option("--p-int", o.p_int, "Interleaved decay parameter (irb)");
    fit->add_option("--p-rb", o.p_rb, "RB decay parameter (xrb)");
    fit->add_option("--unitarity", o.unitarity, "Unitarity (xrb)");
    fit->add_option("--e-f", o.e_f, "Process infidelity (xrb)");
    fit->add_option("--e-s", o.e_s, "Stochastic infidelity (xrb)");
    fit->add_option("--dim", o.dim, "Hilbert-space dimension")->check(CLI::Range(2, 1 << 20));
    auto* syn = app.add_subcommand("synth", "Generate a synthetic decay dataset");
    auto* ram = app.add_subcommand("ramsey", "Simulated Ramsey ZZ measurement");
    for (auto* sub : {zz, cal, fit, syn, ram}) sub->fallthrough();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    std::string command;
    void (*fn)(Run&) = nullptr;
    if (zz->parsed()) { command = "zz-sweep"; fn = cmd_zz_sweep; }
    if (cal->parsed()) { command = "calibrate"; fn = cmd_calibrate; }
    if (fit->parsed()) { command = "fit " + o.fit_kind; fn = cmd_fit; }
    if (syn->parsed()) { command = "synth"; fn = cmd_synth; }
    if (ram->parsed()) { command = "ramsey"; fn = cmd_ramsey; }

    Run r(command, o);
    int code = exit_ok;
    std::string message;
    try {
        if (r.has_config()) r.config();
        fn(r);
    } catch (const IngestionError& e) {
        message = e.what();
        code = exit_usage;
    } catch (const ConfigError& e) {
        message = e.what();
        code = exit_usage;
    } catch (const std::exception& e) {
        message = e.what();
        code = exit_failure;
    }
    try {
        r.write_manifest(code == exit_ok ? "ok" : "error", message);
    } catch (const std::exception& e) {
        err << "starkzz: cannot write manifest: " << e.what() << '\n';
        if (code == exit_ok) code = exit_failure;
    }
    if (code != exit_ok) {
        err << "starkzz " << command << ": " << message << '\n';
    } else {
        out << "starkzz " << command << ": ok\n";
    }
    return code;
}

}  // namespace starkzz::cli
