#include "szego/experiments.hpp"

#include <fftw3.h>
#include <Eigen/Core>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "szego/csv.hpp"
#include "szego/error.hpp"
#include "szego/fit.hpp"
#include "szego/simd.hpp"
#include "szego/stable_manifold.hpp"

namespace szego {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kVersion = "0.1.0";

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_double(std::string_view key, std::string_view v) {
    const std::string t = trim(v);
    double x = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError("invalid number for '" + std::string(key) + "': '" + t + "'");
    }
    return x;
}

std::size_t parse_size(std::string_view key, std::string_view v) {
    const std::string t = trim(v);
    std::size_t x = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError("invalid count for '" + std::string(key) + "': '" + t + "'");
    }
    return x;
}

bool parse_bool(std::string_view key, std::string_view v) {
    const std::string t = trim(v);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ConfigError("invalid boolean for '" + std::string(key) + "': '" + t + "'");
}

std::vector<std::string> split_list(std::string_view v) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= v.size()) {
        const auto next = v.find(',', pos);
        const std::string item = trim(v.substr(pos, next == std::string_view::npos ? v.size() - pos : next - pos));
        if (!item.empty()) out.push_back(item);
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

std::string join(const std::vector<std::string>& items) {
    std::string s;
    for (std::size_t i = 0; i < items.size(); ++i) s += (i ? "," : "") + items[i];
    return s;
}

std::optional<WState> w_state_of(const InitialCondition& ic) {
    switch (ic.shape) {
    case Shape::Poles:
        if (ic.poles.size() != 1) return std::nullopt;
        return WState{ic.epsilon, ic.amplitude, ic.poles[0]};
    case Shape::Blaschke: {
        const cplx p = ic.poles.at(0);
        return WState{-p + ic.epsilon, 1.0 - std::norm(p), std::conj(p)};
    }
    case Shape::W:
        return WState{ic.w.b + ic.epsilon, ic.w.c, ic.w.p};
    case Shape::Gaussian:
        return std::nullopt;
    }
    return std::nullopt;
}

WState require_w(const InitialCondition& ic) {
    auto w = w_state_of(ic);
    if (!w) throw ConfigError("initial condition '" + std::string(shape_name(ic.shape)) + "' is not a point of W");
    w->validate();
    return *w;
}

CheckResult make_check(std::string name, double target, double fitted, double tol, bool gating = true) {
    CheckResult c;
    c.name = std::move(name);
    c.target = target;
    c.fitted = fitted;
    c.rel_dev = target != 0.0 ? std::abs(fitted - target) / std::abs(target) : std::abs(fitted);
    c.tolerance = tol;
    c.gating = gating;
    c.pass = c.rel_dev <= tol;
    return c;
}

// Passes when fitted <= bound.
CheckResult upper_bound_check(std::string name, double bound, double fitted, bool gating = true) {
    CheckResult c;
    c.name = std::move(name);
    c.target = bound;
    c.fitted = fitted;
    c.rel_dev = fitted;
    c.tolerance = bound;
    c.gating = gating;
    c.pass = fitted <= bound;
    return c;
}

CheckResult flag_check(std::string name, bool ok, bool gating = true) {
    CheckResult c;
    c.name = std::move(name);
    c.target = 1.0;
    c.fitted = ok ? 1.0 : 0.0;
    c.rel_dev = ok ? 0.0 : 1.0;
    c.gating = gating;
    c.pass = ok;
    return c;
}

CheckResult& with_window(CheckResult&& c, double a, double b, std::vector<CheckResult>& out) {
    c.window_begin = a;
    c.window_end = b;
    out.push_back(std::move(c));
    return out.back();
}

json checks_json(const std::vector<CheckResult>& checks) {
    json j = json::object();
    for (const auto& c : checks) {
        json e;
        e["target"] = c.target;
        e["fitted"] = c.fitted;
        e["rel_dev"] = c.rel_dev;
        e["window"] = json::array({c.window_begin, c.window_end});
        e["tolerance"] = c.tolerance;
        e["gating"] = c.gating;
        e["pass"] = c.pass;
        j[c.name] = e;
    }
    return j;
}

std::string timestamp_utc() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct ArtifactWriter {
    std::filesystem::path dir;
    RunReport& report;

    std::ofstream open(const std::string& name) {
        std::ofstream os(dir / name, std::ios::binary);
        if (!os) throw Error("cannot write " + (dir / name).string());
        report.artifacts.push_back(name);
        return os;
    }
    void write_json(const std::string& name, const json& j) { open(name) << j.dump(2) << '\n'; }
};

void write_common(ArtifactWriter& out, const ExperimentConfig& cfg, const RunReport& report) {
    json fit;
    fit["preset"] = report.preset;
    fit["checks"] = checks_json(report.checks);
    fit["pass"] = report.passed();
    out.write_json("fit.json", fit);

    json meta;
    meta["preset"] = report.preset;
    json conf = json::object();
    for (const auto& [k, v] : config_entries(cfg)) conf[k] = v;
    meta["config"] = conf;
    json versions;
    versions["szego"] = kVersion;
    versions["fftw"] = std::string(fftw_version);
    versions["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION);
    meta["versions"] = versions;
    meta["simd"] = std::string(simd::backend_name(simd::active_backend()));
    meta["created"] = timestamp_utc();
    out.write_json("meta.json", meta);
}

std::size_t exponent_index(SolverConfig& solver, double s) {
    auto& e = solver.sobolev_exponents;
    const auto it = std::find(e.begin(), e.end(), s);
    if (it != e.end()) return static_cast<std::size_t>(it - e.begin());
    e.push_back(s);
    return e.size() - 1;
}

double max_relative_drift(const std::vector<double>& v) {
    double d = 0.0;
    for (double x : v) d = std::max(d, std::abs(x - v.front()));
    return v.front() != 0.0 ? d / std::abs(v.front()) : d;
}

void window(const std::vector<double>& t, const std::vector<double>& y, double a, double b, std::vector<double>& tw,
            std::vector<double>& yw) {
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= a && t[i] <= b) {
            tw.push_back(t[i]);
            yw.push_back(y[i]);
        }
    }
}

void run_pde(const ExperimentConfig& cfg, RunReport& report, ArtifactWriter& out) {
    SolverConfig solver = cfg.solver;
    if (cfg.paper_horizon && cfg.preset == Preset::Gaussian) solver.t_end = 1000.0;
    const std::size_t h1 = exponent_index(solver, 1.0);
    const HardyState u0 = build_initial(cfg.ic, solver.grid_size);
    const double alpha = solver.alpha;

    SpectrumReport spec;
    spec.spectrum = k_spectrum(u0, cfg.spectrum);
    spec.momentum = momentum(u0);
    spec.verdict = explosion_criterion(u0, spec.spectrum);
    {
        auto os = out.open("spectrum.csv");
        write_spectrum_csv(os, spec.spectrum);
    }
    out.open("verdict.json") << verdict_json(spec) << '\n';

    const EvolveResult run = evolve(u0, solver);
    {
        auto os = out.open("diagnostics.csv");
        run.series.write_csv(os);
    }
    const auto t = run.series.times();
    const auto l2 = run.series.l2_sq();
    const auto mom = run.series.momentum();
    const auto hs = run.series.hs_sq(h1);
    const double t_end = t.back();
    const double drift = max_relative_drift(mom);
    const double lyap = check_lyapunov(run.series, alpha);
    auto& checks = report.checks;
    checks.push_back(flag_check("resolved", !run.resolution_lost, false));

    std::vector<double> tw, hw;
    window(t, hs, 0.5 * t_end, t_end, tw, hw);
    const LinearFit lf = fit_line(tw, hw);

    switch (cfg.preset) {
    case Preset::SinglePole:
    case Preset::Custom: {
        const bool single = cfg.preset == Preset::SinglePole;
        const double M = momentum(u0);
        const double target = asymptotic_constants(alpha, M).growth_coeff(1.0);
        with_window(make_check("h1_slope", target, lf.slope, cfg.tol.slope_rel, single), 0.5 * t_end, t_end, checks);
        checks.push_back(upper_bound_check("momentum_drift", cfg.tol.momentum_drift, drift, single));
        checks.push_back(upper_bound_check("lyapunov_residual", cfg.tol.lyapunov, lyap, single));
        checks.push_back(flag_check("verdict_explodes_strict", spec.verdict.verdict == Verdict::ExplodesStrict, single));
        break;
    }
    case Preset::TwoPoles:
    case Preset::Gaussian: {
        if (cfg.preset == Preset::TwoPoles) {
            checks.push_back(make_check("k_rank", 2.0, static_cast<double>(spec.spectrum.rank()), 0.0));
        }
        with_window(upper_bound_check("h1_linear_fit_r2_deficit", 1.0 - cfg.tol.r2_min, 1.0 - lf.r_squared),
                    0.5 * t_end, t_end, checks);
        auto& s = with_window(flag_check("h1_slope_positive", lf.slope > 0.0), 0.5 * t_end, t_end, checks);
        s.fitted = lf.slope;
        s.target = 0.0;
        const bool gaussian = cfg.preset == Preset::Gaussian;
        checks.push_back(upper_bound_check("momentum_drift", gaussian ? 1e-8 : cfg.tol.momentum_drift, drift, gaussian));
        checks.push_back(upper_bound_check("lyapunov_residual", cfg.tol.lyapunov, lyap, false));
        break;
    }
    case Preset::Baby: {
        const double eps2 = std::norm(u0[0]);
        const double l2_min = *std::min_element(l2.begin(), l2.end());
        auto& drop = with_window(upper_bound_check("l2_min", 1.0, l2_min), 0.0, t_end, checks);
        drop.rel_dev = (1.0 + eps2) - l2_min;  // mass lost below the initial value
        const double M = momentum(u0);
        const AsymptoticConstants k = asymptotic_constants(alpha, M);
        const cplx dq{-alpha, -1.0};
        const double t1 = 30.0, t2 = 40.0;
        const double rate = (std::log(std::abs(linearized_q0(alpha, M, 1.0, dq, t2))) -
                             std::log(std::abs(linearized_q0(alpha, M, 1.0, dq, t1)))) /
                            (t2 - t1);
        auto& c = with_window(make_check("q0_growth_rate", k.lambda_plus.real(), rate, 0.0), t1, t2, checks);
        c.rel_dev = std::abs(rate - k.lambda_plus.real());
        c.tolerance = cfg.tol.closed_form;
        c.pass = c.rel_dev <= c.tolerance;
        checks.push_back(upper_bound_check("lyapunov_residual", cfg.tol.lyapunov, lyap, false));
        break;
    }
    default:
        break;
    }
}

void run_kappa(const ExperimentConfig& cfg, RunReport& report, ArtifactWriter& out) {
    const WState w = require_w(cfg.ic);
    const double M = w.momentum();
    const double alpha = cfg.solver.alpha;
    const ReducedTrajectory traj = integrate_reduced(reduce(w), alpha, M, cfg.ode_dt, cfg.solver.t_end, cfg.ode_stride);
    {
        auto os = out.open("diagnostics.csv");
        os << "t,beta,gamma,re_zeta,im_zeta\n";
        for (const auto& r : traj.records) {
            os << format_double(r.t) << ',' << format_double(r.r.beta) << ',' << format_double(r.r.gamma) << ','
               << format_double(r.r.zeta.real()) << ',' << format_double(r.r.zeta.imag()) << '\n';
        }
    }
    const double t_end = traj.records.back().t;
    const double kappa = asymptotic_constants(alpha, M).kappa;
    const double fitted = gamma_tail_fit(traj, 0.5 * t_end, t_end);
    with_window(make_check("kappa", kappa, fitted, cfg.tol.kappa_rel), 0.5 * t_end, t_end, report.checks);
    double defect = 0.0;
    for (const auto& r : traj.records) defect = std::max(defect, std::abs(constraint_defect(r.r, M)));
    report.checks.push_back(upper_bound_check("constraint_defect", 1e-8 * M * M * M, defect, false));
}

void run_stable(const ExperimentConfig& cfg, RunReport& report, ArtifactWriter& out) {
    StableManifoldOptions opt;
    opt.t_start = cfg.t_start;
    opt.t_end_back = cfg.t_end_back;
    opt.dt = cfg.ode_dt;
    const StableManifoldTrajectory traj =
        stable_manifold_trajectory(cfg.beta_inf, cfg.solver.alpha, cfg.momentum, opt);
    {
        auto os = out.open("diagnostics.csv");
        traj.write_csv(os);
    }
    const StableFitReport fit = stable_manifold_fit(traj);
    with_window(make_check("decay_rate", fit.decay_target, fit.decay_rate, cfg.tol.stable_rel), fit.window_begin,
                fit.window_end, report.checks);
    with_window(make_check("delta_beta_ratio", fit.ratio_target, fit.ratio, cfg.tol.stable_rel), traj.t_start,
                traj.t_start, report.checks);
    auto& rt = with_window(upper_bound_check("roundtrip_residual", cfg.tol.roundtrip,
                                             stable_manifold_roundtrip(traj, cfg.ode_dt)),
                           traj.records.front().t, traj.t_start, report.checks);
    rt.target = 0.0;
}

}  // namespace

std::string_view preset_name(Preset p) {
    switch (p) {
    case Preset::SinglePole: return "single_pole";
    case Preset::TwoPoles: return "two_poles";
    case Preset::Gaussian: return "gaussian";
    case Preset::Baby: return "baby";
    case Preset::KappaFit: return "kappa_fit";
    case Preset::StableManifold: return "stable_manifold";
    case Preset::Custom: return "custom";
    }
    return "?";
}

Preset parse_preset(std::string_view name) {
    for (Preset p : {Preset::SinglePole, Preset::TwoPoles, Preset::Gaussian, Preset::Baby, Preset::KappaFit,
                     Preset::StableManifold, Preset::Custom}) {
        if (preset_name(p) == name) return p;
    }
    throw ConfigError("unknown preset '" + std::string(name) + "'");
}

std::string_view shape_name(Shape s) {
    switch (s) {
    case Shape::Poles: return "poles";
    case Shape::Gaussian: return "gaussian";
    case Shape::Blaschke: return "blaschke";
    case Shape::W: return "w";
    }
    return "?";
}

Shape parse_shape(std::string_view name) {
    for (Shape s : {Shape::Poles, Shape::Gaussian, Shape::Blaschke, Shape::W}) {
        if (shape_name(s) == name) return s;
    }
    throw ConfigError("unknown shape '" + std::string(name) + "'");
}

void InitialCondition::validate() const {
    if ((shape == Shape::Poles || shape == Shape::Blaschke) && poles.empty()) {
        throw ConfigError("shape '" + std::string(shape_name(shape)) + "' needs at least one pole");
    }
    for (const cplx& p : poles) {
        if (!(std::abs(p) < 1.0)) throw ConfigError("pole " + format_complex(p) + " must satisfy |p| < 1");
    }
    if (!(width > 0.0)) throw ConfigError("width must be positive");
    if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be nonnegative");
    if (shape == Shape::W) {
        if (!(std::abs(w.p) < 1.0)) throw ConfigError("p must satisfy |p| < 1");
        if (w.c == cplx{}) throw ConfigError("c must be nonzero");
    }
}

void ExperimentConfig::validate() const {
    ic.validate();
    try {
        solver.validate();
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (!(ode_dt > 0.0)) throw ConfigError("ode_dt must be positive");
    if (ode_stride == 0) throw ConfigError("ode_stride must be positive");
    if (!(beta_inf > 0.0)) throw ConfigError("beta_inf must be positive");
    if (!(momentum > 0.0)) throw ConfigError("momentum must be positive");
    if (t_start && !(*t_start > t_end_back)) throw ConfigError("t_start must exceed t_end_back");
}

ExperimentConfig preset_config(Preset p) {
    ExperimentConfig cfg;
    cfg.preset = p;
    switch (p) {
    case Preset::SinglePole:
    case Preset::Custom:
        break;
    case Preset::TwoPoles:
        cfg.ic.poles = {cplx{0.7, 0.0}, cplx{0.8, 0.0}};
        break;
    case Preset::Gaussian:
        cfg.ic.shape = Shape::Gaussian;
        cfg.solver.t_end = 100.0;
        break;
    case Preset::Baby:
        cfg.ic.shape = Shape::W;
        cfg.ic.w = WState{0.0, 1.0, 0.0};
        cfg.ic.epsilon = 0.05;
        cfg.solver.grid_size = 1024;
        break;
    case Preset::KappaFit:
        cfg.solver.t_end = 500.0;
        cfg.ode_stride = 100;
        break;
    case Preset::StableManifold:
        cfg.ode_stride = 1;
        break;
    }
    return cfg;
}

cplx parse_complex(std::string_view text) {
    std::string s;
    for (char ch : text) {
        if (ch != ' ' && ch != '\t') s += ch;
    }
    if (s.empty()) throw ConfigError("empty complex number");
    const auto bad = [&] { return ConfigError("invalid complex number '" + std::string(text) + "'"); };
    auto read = [&](std::size_t& pos, double& x) {
        // from_chars rejects a leading '+'
        std::size_t start = pos;
        if (s[start] == '+') ++start;
        if (start < s.size() && s[start] == 'i') {
            x = 1.0;
            pos = start;
            return;
        }
        if (start + 1 < s.size() && s[start] == '-' && s[start + 1] == 'i') {
            x = -1.0;
            pos = start + 1;
            return;
        }
        const auto [ptr, ec] = std::from_chars(s.data() + start, s.data() + s.size(), x);
        if (ec != std::errc()) throw bad();
        pos = static_cast<std::size_t>(ptr - s.data());
    };
    std::size_t pos = 0;
    double first = 0.0;
    read(pos, first);
    if (pos == s.size()) return {first, 0.0};
    if (s[pos] == 'i' && pos + 1 == s.size()) return {0.0, first};
    if (s[pos] != '+' && s[pos] != '-') throw bad();
    double second = 0.0;
    read(pos, second);
    if (pos + 1 != s.size() || s[pos] != 'i') throw bad();
    return {first, second};
}

std::string format_complex(cplx z) {
    if (z.imag() == 0.0) return format_double(z.real());
    std::string im = format_double(z.imag());
    if (im[0] != '-') im = "+" + im;
    return format_double(z.real()) + im + "i";
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
    const std::string v = trim(value);
    if (key == "preset") {
        const bool horizon = cfg.paper_horizon;
        const std::string dir = cfg.output_dir;
        cfg = preset_config(parse_preset(v));
        cfg.paper_horizon = horizon;
        cfg.output_dir = dir;
    } else if (key == "shape") {
        cfg.ic.shape = parse_shape(v);
    } else if (key == "poles") {
        cfg.ic.poles.clear();
        for (const auto& item : split_list(v)) cfg.ic.poles.push_back(parse_complex(item));
    } else if (key == "amplitude") {
        cfg.ic.amplitude = parse_complex(v);
    } else if (key == "width") {
        cfg.ic.width = parse_double(key, v);
    } else if (key == "epsilon") {
        cfg.ic.epsilon = parse_double(key, v);
    } else if (key == "b") {
        cfg.ic.w.b = parse_complex(v);
    } else if (key == "c") {
        cfg.ic.w.c = parse_complex(v);
    } else if (key == "p") {
        cfg.ic.w.p = parse_complex(v);
    } else if (key == "alpha") {
        cfg.solver.alpha = parse_double(key, v);
    } else if (key == "dt") {
        cfg.solver.dt = parse_double(key, v);
    } else if (key == "n" || key == "grid_size") {
        cfg.solver.grid_size = parse_size(key, v);
    } else if (key == "t_end") {
        cfg.solver.t_end = parse_double(key, v);
    } else if (key == "krasny_threshold") {
        cfg.solver.krasny_threshold = parse_double(key, v);
    } else if (key == "krasny_mode") {
        if (v == "absolute") {
            cfg.solver.krasny_mode = KrasnyMode::Absolute;
        } else if (v == "relative") {
            cfg.solver.krasny_mode = KrasnyMode::RelativeToInitialMax;
        } else {
            throw ConfigError("krasny_mode must be 'absolute' or 'relative'");
        }
    } else if (key == "record_stride") {
        cfg.solver.record_stride = parse_size(key, v);
    } else if (key == "sobolev") {
        cfg.solver.sobolev_exponents.clear();
        for (const auto& item : split_list(v)) cfg.solver.sobolev_exponents.push_back(parse_double(key, item));
    } else if (key == "dealias") {
        cfg.solver.dealias = parse_bool(key, v);
    } else if (key == "blowup_l2") {
        cfg.solver.blowup_l2 = parse_double(key, v);
    } else if (key == "resolution_tol") {
        cfg.solver.resolution_tol = parse_double(key, v);
    } else if (key == "spectrum_size") {
        cfg.spectrum.size = parse_size(key, v);
    } else if (key == "cluster_tol") {
        cfg.spectrum.cluster_tol = parse_double(key, v);
    } else if (key == "rank_cutoff") {
        cfg.spectrum.rank_cutoff = parse_double(key, v);
    } else if (key == "ode_dt") {
        cfg.ode_dt = parse_double(key, v);
    } else if (key == "ode_stride") {
        cfg.ode_stride = parse_size(key, v);
    } else if (key == "beta_inf") {
        cfg.beta_inf = parse_double(key, v);
    } else if (key == "momentum") {
        cfg.momentum = parse_double(key, v);
    } else if (key == "t_start") {
        if (v == "auto") {
            cfg.t_start.reset();
        } else {
            cfg.t_start = parse_double(key, v);
        }
    } else if (key == "t_end_back") {
        cfg.t_end_back = parse_double(key, v);
    } else if (key == "output_dir") {
        cfg.output_dir = v;
    } else if (key == "paper_horizon") {
        cfg.paper_horizon = parse_bool(key, v);
    } else if (key == "tol_slope") {
        cfg.tol.slope_rel = parse_double(key, v);
    } else if (key == "tol_drift") {
        cfg.tol.momentum_drift = parse_double(key, v);
    } else if (key == "tol_lyapunov") {
        cfg.tol.lyapunov = parse_double(key, v);
    } else if (key == "tol_r2") {
        cfg.tol.r2_min = parse_double(key, v);
    } else if (key == "tol_kappa") {
        cfg.tol.kappa_rel = parse_double(key, v);
    } else if (key == "tol_stable") {
        cfg.tol.stable_rel = parse_double(key, v);
    } else if (key == "tol_roundtrip") {
        cfg.tol.roundtrip = parse_double(key, v);
    } else if (key == "tol_closed_form") {
        cfg.tol.closed_form = parse_double(key, v);
    } else {
        throw ConfigError("unknown key '" + std::string(key) + "'");
    }
}

ExperimentConfig parse_config(std::istream& in, const std::string& source, std::optional<Preset> preset) {
    struct Line {
        std::size_t number;
        std::string key, value;
    };
    std::vector<Line> lines;
    std::string raw;
    std::size_t number = 0;
    while (std::getline(in, raw)) {
        ++number;
        const auto hash = raw.find('#');
        const std::string text = trim(std::string_view(raw).substr(0, hash));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source + ":" + std::to_string(number) + ": expected 'key = value'");
        }
        const std::string key = trim(std::string_view(text).substr(0, eq));
        if (key.empty()) throw ConfigError(source + ":" + std::to_string(number) + ": missing key");
        lines.push_back({number, key, trim(std::string_view(text).substr(eq + 1))});
    }
    ExperimentConfig cfg;
    auto apply = [&](const Line& l) {
        try {
            apply_setting(cfg, l.key, l.value);
        } catch (const Error& e) {
            throw ConfigError(source + ":" + std::to_string(l.number) + ": " + e.what());
        }
    };
    if (preset) {
        cfg = preset_config(*preset);
    } else {
        for (const auto& l : lines) {
            if (l.key == "preset") apply(l);
        }
    }
    for (const auto& l : lines) {
        if (l.key != "preset") apply(l);
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path, std::optional<Preset> preset) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, path, preset);
}

std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> e;
    auto d = [&](const char* k, double x) { e.emplace_back(k, format_double(x)); };
    auto z = [&](const char* k, std::size_t x) { e.emplace_back(k, std::to_string(x)); };
    e.emplace_back("preset", std::string(preset_name(cfg.preset)));
    e.emplace_back("shape", std::string(shape_name(cfg.ic.shape)));
    std::vector<std::string> poles;
    for (const cplx& p : cfg.ic.poles) poles.push_back(format_complex(p));
    e.emplace_back("poles", join(poles));
    e.emplace_back("amplitude", format_complex(cfg.ic.amplitude));
    d("width", cfg.ic.width);
    d("epsilon", cfg.ic.epsilon);
    e.emplace_back("b", format_complex(cfg.ic.w.b));
    e.emplace_back("c", format_complex(cfg.ic.w.c));
    e.emplace_back("p", format_complex(cfg.ic.w.p));
    d("alpha", cfg.solver.alpha);
    d("dt", cfg.solver.dt);
    z("n", cfg.solver.grid_size);
    d("t_end", cfg.solver.t_end);
    d("krasny_threshold", cfg.solver.krasny_threshold);
    e.emplace_back("krasny_mode", cfg.solver.krasny_mode == KrasnyMode::Absolute ? "absolute" : "relative");
    z("record_stride", cfg.solver.record_stride);
    std::vector<std::string> sob;
    for (double s : cfg.solver.sobolev_exponents) sob.push_back(format_double(s));
    e.emplace_back("sobolev", join(sob));
    e.emplace_back("dealias", cfg.solver.dealias ? "true" : "false");
    d("blowup_l2", cfg.solver.blowup_l2);
    d("resolution_tol", cfg.solver.resolution_tol);
    z("spectrum_size", cfg.spectrum.size);
    d("cluster_tol", cfg.spectrum.cluster_tol);
    d("rank_cutoff", cfg.spectrum.rank_cutoff);
    d("ode_dt", cfg.ode_dt);
    z("ode_stride", cfg.ode_stride);
    d("beta_inf", cfg.beta_inf);
    d("momentum", cfg.momentum);
    e.emplace_back("t_start", cfg.t_start ? format_double(*cfg.t_start) : "auto");
    d("t_end_back", cfg.t_end_back);
    e.emplace_back("output_dir", cfg.output_dir);
    e.emplace_back("paper_horizon", cfg.paper_horizon ? "true" : "false");
    d("tol_slope", cfg.tol.slope_rel);
    d("tol_drift", cfg.tol.momentum_drift);
    d("tol_lyapunov", cfg.tol.lyapunov);
    d("tol_r2", cfg.tol.r2_min);
    d("tol_kappa", cfg.tol.kappa_rel);
    d("tol_stable", cfg.tol.stable_rel);
    d("tol_roundtrip", cfg.tol.roundtrip);
    d("tol_closed_form", cfg.tol.closed_form);
    return e;
}

HardyState build_initial(const InitialCondition& ic, std::size_t grid_size) {
    ic.validate();
    HardyState u(grid_size);
    switch (ic.shape) {
    case Shape::Poles: {
        std::vector<cplx> c(grid_size / 2);
        for (const cplx& p : ic.poles) {
            cplx term = ic.amplitude;
            for (std::size_t k = 1; k < c.size(); ++k) {
                c[k] += term;
                term *= p;
            }
        }
        u = HardyState(std::move(c), grid_size);
        break;
    }
    case Shape::Gaussian: {
        const double w = ic.width;
        const cplx amp = ic.amplitude;
        u = project([w, amp](double x) { return amp * std::exp(-w * x * x); }, grid_size);
        break;
    }
    case Shape::Blaschke:
    case Shape::W: {
        WState w = *w_state_of(ic);
        w.b -= ic.epsilon;  // added below with the other shapes
        u = w_to_hardy(w, grid_size);
        break;
    }
    }
    if (ic.epsilon != 0.0) {
        std::vector<cplx> c(u.coeffs().begin(), u.coeffs().end());
        c[0] += ic.epsilon;
        u = HardyState(std::move(c), grid_size);
    }
    return u;
}

bool RunReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.gating || c.pass; });
}

const CheckResult* RunReport::find(std::string_view name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

RunReport run_preset(const ExperimentConfig& cfg) {
    cfg.validate();
    RunReport report;
    report.preset = std::string(preset_name(cfg.preset));
    std::filesystem::create_directories(cfg.output_dir);
    ArtifactWriter out{cfg.output_dir, report};
    switch (cfg.preset) {
    case Preset::KappaFit:
        run_kappa(cfg, report, out);
        break;
    case Preset::StableManifold:
        run_stable(cfg, report, out);
        break;
    default:
        run_pde(cfg, report, out);
        break;
    }
    write_common(out, cfg, report);
    return report;
}

RunReport run_wode(const ExperimentConfig& cfg) {
    cfg.validate();
    const WState w = require_w(cfg.ic);
    RunReport report;
    report.preset = "wode";
    std::filesystem::create_directories(cfg.output_dir);
    ArtifactWriter out{cfg.output_dir, report};
    const double alpha = cfg.solver.alpha;
    const WTrajectory traj = integrate_w(w, alpha, cfg.ode_dt, cfg.solver.t_end, cfg.ode_stride);
    {
        auto os = out.open("diagnostics.csv");
        traj.write_csv(os);
    }
    const double M = w.momentum();
    std::vector<double> mom;
    for (const auto& r : traj.records) mom.push_back(r.momentum);
    report.checks.push_back(upper_bound_check("momentum_drift", 1e-10, max_relative_drift(mom)));
    const WRunClass cls = classify_w_run(traj);
    auto& c = report.checks.emplace_back(flag_check("classification", cls != WRunClass::Undetermined, false));
    c.fitted = static_cast<double>(cls);
    c.target = 0.0;
    report.checks.push_back(flag_check("near_boundary", !traj.near_boundary, false));
    if (cls == WRunClass::Exploding) {
        const AsymptoticConstants k = asymptotic_constants(alpha, M);
        for (double s : cfg.solver.sobolev_exponents) {
            if (!(s > 0.5)) continue;
            const SobolevFitReport r = wbis_endstate_check(traj, k, s);
            const std::string tag = format_label(s);
            with_window(make_check("hs_exponent_" + tag, r.exponent_target, r.exponent, cfg.tol.slope_rel, false),
                        r.window_begin, r.window_end, report.checks);
            with_window(make_check("hs_prefactor_" + tag, r.prefactor_target, r.prefactor, 2.0 * cfg.tol.slope_rel,
                                   false),
                        r.window_begin, r.window_end, report.checks);
            with_window(make_check("hs_loglog_slope_" + tag, r.exponent_target, r.loglog_slope, cfg.tol.slope_rel,
                                   false),
                        r.window_begin, r.window_end, report.checks);
        }
    }
    write_common(out, cfg, report);
    return report;
}

SpectrumReport run_spectrum(const ExperimentConfig& cfg) {
    cfg.validate();
    const HardyState u0 = build_initial(cfg.ic, cfg.solver.grid_size);
    SpectrumReport r;
    r.spectrum = k_spectrum(u0, cfg.spectrum);
    r.verdict = explosion_criterion(u0, r.spectrum);
    r.momentum = momentum(u0);
    return r;
}

std::string verdict_json(const SpectrumReport& r) {
    json j;
    j["l2_sq"] = r.verdict.l2_sq;
    j["momentum"] = r.momentum;
    j["f_value"] = r.verdict.f_value;
    j["verdict"] = std::string(verdict_name(r.verdict.verdict));
    j["u0_coeff_abs"] = r.verdict.u0_coeff_abs;
    j["tol"] = r.verdict.tol;
    j["rank"] = r.spectrum.rank();
    j["has_cluster"] = r.spectrum.has_cluster();
    j["gram_size"] = r.spectrum.size;
    j["tail_mass"] = r.spectrum.tail_mass;
    return j.dump(2);
}

double VerifyReport::max_residual() const {
    double m = 0.0;
    for (const auto& [name, r] : residuals) m = std::max(m, r);
    return m;
}

bool VerifyReport::passed(double tol) const {
    return std::all_of(residuals.begin(), residuals.end(), [tol](const auto& r) { return r.second <= tol; });
}

std::string VerifyReport::to_json() const {
    json j;
    j["alpha"] = alpha;
    j["M"] = M;
    j["s"] = s;
    const auto& k = constants;
    j["values"] = {{"a", k.a},
                   {"omega", k.omega},
                   {"kappa", k.kappa},
                   {"rho", k.rho},
                   {"lambda_plus", json::array({k.lambda_plus.real(), k.lambda_plus.imag()})},
                   {"lambda_minus", json::array({k.lambda_minus.real(), k.lambda_minus.imag()})},
                   {"decay_rate", k.decay_rate},
                   {"dist_rate", k.dist_rate},
                   {"growth_coeff", k.growth_coeff(s)}};
    json r = json::object();
    for (const auto& [name, v] : residuals) r[name] = v;
    j["residuals"] = r;
    j["max_residual"] = max_residual();
    j["pass"] = passed();
    return j.dump(2);
}

VerifyReport run_verify(double alpha, double M, double s) {
    VerifyReport rep;
    rep.alpha = alpha;
    rep.M = M;
    rep.s = s;
    rep.constants = asymptotic_constants(alpha, M);
    const auto& k = rep.constants;
    auto& r = rep.residuals;
    const cplx iMa{0.0, M * alpha};
    r.emplace_back("a_exceeds_alpha", k.a > alpha ? 0.0 : (alpha - k.a) / alpha);
    r.emplace_back("a_identity", std::abs(k.a * std::sqrt(k.a * k.a - alpha * alpha) - 2.0 * M * alpha) /
                                     (2.0 * M * alpha));
    r.emplace_back("lambda_sum", std::abs(k.lambda_plus + k.lambda_minus + alpha) / alpha);
    r.emplace_back("lambda_product", std::abs(k.lambda_plus * k.lambda_minus + iMa) / (M * alpha));
    for (const auto& [name, l] : {std::pair{"lambda_plus_root", k.lambda_plus}, {"lambda_minus_root", k.lambda_minus}}) {
        r.emplace_back(name, std::abs(l * l + alpha * l - iMa) / (M * alpha));
    }
    r.emplace_back("lambda_signs", (k.lambda_plus.real() > 0.0 && k.lambda_minus.real() < 0.0) ? 0.0 : 1.0);

    const Linearization lin = linearization_matrix(alpha, M);
    const auto closed = closed_form_eigenvalues(k);
    const double scale = alpha + k.a;
    r.emplace_back("trace_A", std::abs(lin.A.trace() - 4.0 * alpha) / (4.0 * alpha));
    cplx prod{1.0, 0.0};
    for (const cplx& l : closed) prod *= l;
    r.emplace_back("det_A", std::abs(lin.A.determinant() - prod) / std::abs(prod));
    // Greedy nearest matching of numerical to closed-form eigenvalues.
    std::array<bool, 4> used{};
    double worst = 0.0;
    for (const cplx& l : closed) {
        std::size_t best = 0;
        double dist = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < 4; ++j) {
            if (!used[j] && std::abs(lin.eigenvalues[j] - l) < dist) {
                dist = std::abs(lin.eigenvalues[j] - l);
                best = j;
            }
        }
        used[best] = true;
        worst = std::max(worst, dist / scale);
    }
    r.emplace_back("eigenvalues_A", worst);
    const Eigen::Vector4d v = k.stable_direction();
    r.emplace_back("stable_direction", (lin.A * v - scale * v).norm() / (scale * v.norm()));
    return rep;
}

}  // namespace szego
