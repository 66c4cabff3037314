// szego: command-line front end for the damped Szego toolkit.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "szego/error.hpp"
#include "szego/experiments.hpp"
#include "szego/simd.hpp"
#include "szego/stable_manifold.hpp"

namespace {

enum Exit { kPass = 0, kChecksFailed = 1, kUsage = 2, kRuntime = 3 };

struct Common {
    std::string config;
    std::string preset;
    std::optional<double> alpha, dt, t_end;
    std::optional<std::size_t> n;
    std::string out;
    bool paper_horizon = false;
    std::vector<std::string> sets;
};

void add_common(CLI::App* app, Common& c, bool with_preset = true) {
    app->add_option("--config", c.config, "key = value configuration file")->check(CLI::ExistingFile);
    if (with_preset) app->add_option("--preset", c.preset, "preset name (comma list for simulate)");
    app->add_option("--alpha", c.alpha, "damping coefficient");
    app->add_option("--dt", c.dt, "time step");
    app->add_option("--n", c.n, "grid size N");
    app->add_option("--t-end", c.t_end, "final time");
    app->add_option("--out", c.out, "output directory");
    app->add_flag("--paper-horizon", c.paper_horizon, "gaussian preset runs to t = 1000");
    app->add_option("--set", c.sets, "extra key=value override, repeatable");
}

szego::ExperimentConfig make_config(const Common& c, std::optional<szego::Preset> preset) {
    szego::ExperimentConfig cfg;
    if (!c.config.empty()) {
        cfg = szego::load_config(c.config, preset);
    } else if (preset) {
        cfg = szego::preset_config(*preset);
    }
    if (c.alpha) cfg.solver.alpha = *c.alpha;
    if (c.dt) {
        cfg.solver.dt = *c.dt;
        cfg.ode_dt = *c.dt;
    }
    if (c.n) cfg.solver.grid_size = *c.n;
    if (c.t_end) cfg.solver.t_end = *c.t_end;
    if (!c.out.empty()) cfg.output_dir = c.out;
    if (c.paper_horizon) cfg.paper_horizon = true;
    for (const auto& s : c.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw szego::ConfigError("--set expects key=value, got '" + s + "'");
        szego::apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    cfg.validate();
    return cfg;
}

std::vector<szego::Preset> parse_presets(const std::string& list) {
    std::vector<szego::Preset> out;
    std::size_t pos = 0;
    while (pos <= list.size()) {
        const auto next = list.find(',', pos);
        const std::string item = list.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
        if (!item.empty()) out.push_back(szego::parse_preset(item));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

void print_report(const szego::RunReport& r, const std::string& dir) {
    std::printf("[%s] -> %s\n", r.preset.c_str(), dir.c_str());
    for (const auto& c : r.checks) {
        std::printf("  %-28s fitted=%-24.17g target=%-24.17g %s\n", c.name.c_str(), c.fitted, c.target,
                    !c.gating ? (c.pass ? "ok (reported)" : "off (reported)") : (c.pass ? "PASS" : "FAIL"));
    }
    std::printf("  %s\n", r.passed() ? "PASS" : "FAIL");
}

int simulate(const Common& c, std::size_t jobs) {
    std::vector<szego::Preset> presets = parse_presets(c.preset);
    if (presets.empty()) presets.push_back(c.config.empty() ? szego::Preset::SinglePole : make_config(c, {}).preset);
    std::vector<szego::ExperimentConfig> cfgs;
    for (auto p : presets) {
        auto cfg = make_config(c, p);
        if (presets.size() > 1) cfg.output_dir = (std::filesystem::path(cfg.output_dir) / szego::preset_name(p)).string();
        cfgs.push_back(std::move(cfg));
    }
    std::vector<int> status(cfgs.size(), kPass);
    std::mutex print_mutex;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < cfgs.size();) {
            try {
                const auto report = szego::run_preset(cfgs[i]);
                std::lock_guard lock(print_mutex);
                print_report(report, cfgs[i].output_dir);
                status[i] = report.passed() ? kPass : kChecksFailed;
            } catch (const szego::BlowUp& e) {
                std::lock_guard lock(print_mutex);
                std::fprintf(stderr, "%s: %s (t = %.17g)\n", std::string(szego::preset_name(cfgs[i].preset)).c_str(),
                             e.what(), e.time());
                status[i] = kRuntime;
            } catch (const szego::Error& e) {
                std::lock_guard lock(print_mutex);
                std::fprintf(stderr, "%s: %s\n", std::string(szego::preset_name(cfgs[i].preset)).c_str(), e.what());
                status[i] = kRuntime;
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t j = 1; j < std::min(jobs, cfgs.size()); ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    int worst = kPass;
    for (int s : status) worst = std::max(worst, s);
    return worst;
}

int criterion(const Common& c, bool full_spectrum) {
    const auto cfg = make_config(c, c.preset.empty() ? std::nullopt : std::optional(szego::parse_preset(c.preset)));
    const auto r = szego::run_spectrum(cfg);
    const std::string j = szego::verdict_json(r);
    std::cout << j << '\n';
    if (!c.out.empty()) {
        std::filesystem::create_directories(cfg.output_dir);
        std::ofstream(std::filesystem::path(cfg.output_dir) / "verdict.json") << j << '\n';
        if (full_spectrum) {
            std::ofstream os(std::filesystem::path(cfg.output_dir) / "spectrum.csv");
            szego::write_spectrum_csv(os, r.spectrum);
        }
    } else if (full_spectrum) {
        szego::write_spectrum_csv(std::cout, r.spectrum);
    }
    return kPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Damped cubic Szego equation toolkit"};
    app.require_subcommand(1);
    std::string simd = "auto";
    app.add_option("--simd", simd, "kernel backend")->check(CLI::IsMember({"auto", "scalar", "avx2"}));
    std::size_t jobs = 1;

    Common sim, crit, spec, wode, sm;
    auto* c_sim = app.add_subcommand("simulate", "run a preset experiment and write its artifacts");
    add_common(c_sim, sim);
    c_sim->add_option("--jobs", jobs, "presets run in parallel")->check(CLI::PositiveNumber);
    auto* c_crit = app.add_subcommand("criterion", "print the explosion verdict of the initial condition");
    add_common(c_crit, crit);
    auto* c_spec = app.add_subcommand("spectrum", "K_u^2 spectrum of the initial condition");
    add_common(c_spec, spec);
    auto* c_wode = app.add_subcommand("wode", "integrate the (b, c, p) system on W");
    add_common(c_wode, wode);
    auto* c_sm = app.add_subcommand("stable-manifold", "build a stable-manifold trajectory");
    add_common(c_sm, sm, false);
    double v_alpha = 1.0, v_m = 1.0, v_s = 1.0;
    auto* c_ver = app.add_subcommand("verify", "closed-form identity residuals");
    c_ver->add_option("--alpha", v_alpha, "damping coefficient")->check(CLI::PositiveNumber);
    c_ver->add_option("--M,--momentum", v_m, "momentum")->check(CLI::PositiveNumber);
    c_ver->add_option("--s", v_s, "Sobolev exponent for the growth constant");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simd == "scalar") szego::simd::set_backend(szego::simd::Backend::Scalar);
        if (simd == "avx2") szego::simd::set_backend(szego::simd::Backend::Avx2);

        if (*c_sim) return simulate(sim, jobs);
        if (*c_crit) return criterion(crit, false);
        if (*c_spec) return criterion(spec, true);
        if (*c_wode) {
            auto cfg = make_config(wode, wode.preset.empty() ? std::nullopt
                                                              : std::optional(szego::parse_preset(wode.preset)));
            const auto r = szego::run_wode(cfg);
            print_report(r, cfg.output_dir);
            return r.passed() ? kPass : kChecksFailed;
        }
        if (*c_sm) {
            auto cfg = make_config(sm, szego::Preset::StableManifold);
            const auto r = szego::run_preset(cfg);
            print_report(r, cfg.output_dir);
            return r.passed() ? kPass : kChecksFailed;
        }
        if (*c_ver) {
            const auto r = szego::run_verify(v_alpha, v_m, v_s);
            std::cout << r.to_json() << '\n';
            return r.passed() ? kPass : kChecksFailed;
        }
    } catch (const szego::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kUsage;
    } catch (const szego::BlowUp& e) {
        std::fprintf(stderr, "%s (t = %.17g)\n", e.what(), e.time());
        return kRuntime;
    } catch (const szego::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kRuntime;
    }
    return kUsage;
}
