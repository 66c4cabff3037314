#pragma once

// Experiment configuration, presets and the drivers behind the CLI.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "szego/hankel.hpp"
#include "szego/solver.hpp"
#include "szego/wmanifold.hpp"

namespace szego {

enum class Preset { SinglePole, TwoPoles, Gaussian, Baby, KappaFit, StableManifold, Custom };

std::string_view preset_name(Preset p);
Preset parse_preset(std::string_view name);  // ConfigError on unknown names

// poles:    amplitude * sum_i e^{ix} / (1 - p_i e^{ix})
// gaussian: amplitude * Pi exp(-width x^2)
// blaschke: (e^{ix} - p) / (1 - conj(p) e^{ix}) with p = poles[0]
// w:        b + c e^{ix} / (1 - p e^{ix}); the baby preset sets b = epsilon
enum class Shape { Poles, Gaussian, Blaschke, W };

std::string_view shape_name(Shape s);
Shape parse_shape(std::string_view name);

struct InitialCondition {
    Shape shape = Shape::Poles;
    std::vector<cplx> poles{cplx{0.5, 0.0}};
    cplx amplitude{1.0, 0.0};
    double width = 10.0;
    double epsilon = 0.0;
    WState w;

    void validate() const;
};

struct Tolerances {
    double slope_rel = 0.05;
    double momentum_drift = 1e-9;
    double lyapunov = 1e-5;
    double r2_min = 0.99;
    double kappa_rel = 0.05;
    double stable_rel = 0.01;
    double roundtrip = 1e-8;
    double closed_form = 1e-10;
};

struct ExperimentConfig {
    Preset preset = Preset::SinglePole;
    InitialCondition ic;
    SolverConfig solver;
    SpectrumOptions spectrum;
    Tolerances tol;
    // W and reduced ODE runs
    double ode_dt = 1e-3;
    std::size_t ode_stride = 10;
    // stable_manifold
    double beta_inf = 1.0;
    double momentum = 1.0;
    std::optional<double> t_start;
    double t_end_back = 0.0;
    std::string output_dir = "out";
    bool paper_horizon = false;

    void validate() const;
};

ExperimentConfig preset_config(Preset p);

// Applies one key = value setting. Throws ConfigError naming the key.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

// Flat "key = value" text, '#' starts a comment. A preset line, wherever it
// appears, selects the defaults; the other keys then apply in file order.
// A given preset replaces the one named in the file. Errors carry
// "source:line".
ExperimentConfig parse_config(std::istream& in, const std::string& source = "config",
                              std::optional<Preset> preset = std::nullopt);
ExperimentConfig load_config(const std::string& path, std::optional<Preset> preset = std::nullopt);

// Every effective setting in a fixed order, for echoing into metadata.
std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& cfg);

cplx parse_complex(std::string_view text);  // "0.5", "0.3-0.2i", "2i"
std::string format_complex(cplx z);

HardyState build_initial(const InitialCondition& ic, std::size_t grid_size);

struct CheckResult {
    std::string name;
    double target = 0.0;
    double fitted = 0.0;
    double rel_dev = 0.0;
    double tolerance = 0.0;
    double window_begin = 0.0;
    double window_end = 0.0;
    bool gating = true;  // reported only when false
    bool pass = true;
};

struct RunReport {
    std::string preset;
    std::vector<CheckResult> checks;
    std::vector<std::string> artifacts;

    bool passed() const;
    const CheckResult* find(std::string_view name) const;
};

// Runs the configured experiment and writes its artifacts into
// cfg.output_dir: diagnostics.csv, spectrum.csv, verdict.json, fit.json
// and meta.json, as far as they apply to the preset.
RunReport run_preset(const ExperimentConfig& cfg);

// The W-manifold ODE from the configured initial condition; needs a W shape.
RunReport run_wode(const ExperimentConfig& cfg);

struct SpectrumReport {
    KSpectrum spectrum;
    CriterionVerdict verdict;
    double momentum = 0.0;
};

SpectrumReport run_spectrum(const ExperimentConfig& cfg);
// {l2_sq, momentum, f_value, verdict, ...}
std::string verdict_json(const SpectrumReport& r);

struct VerifyReport {
    double alpha = 0.0;
    double M = 0.0;
    double s = 1.0;
    AsymptoticConstants constants;
    std::vector<std::pair<std::string, double>> residuals;

    double max_residual() const;
    bool passed(double tol = 1e-10) const;
    std::string to_json() const;
};

VerifyReport run_verify(double alpha, double M, double s = 1.0);

}  // namespace szego
