// jspec: command-line front end for the Jacobi spectral toolkit.
//
// Subcommands: criteria | spectrum | limits | cfrac | verify | preset-list,
// plus an `indices` debug printer for the multi-index walk sets.
// Exit codes: 0 analysis complete, 1 verification failure, 2 usage/config error.

#include <CLI11.hpp>

#include <complex>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "jacobi/cfrac.hpp"
#include "jacobi/conditions.hpp"
#include "jacobi/config.hpp"
#include "jacobi/multiindex.hpp"
#include "jacobi/orthopoly.hpp"
#include "jacobi/report.hpp"
#include "jacobi/spectra.hpp"
#include "jacobi/verify.hpp"

namespace {

using jacobi::cli::AnalysisConfig;
using jacobi::cli::ConfigError;
using Json = nlohmann::json;

struct CommonOpts {
    std::string config_path;
    std::string preset;
    std::vector<std::string> params;
    std::string out_dir;
    std::string format;
    int m_max = -1;
    long seed = -1;
    int threads = -1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "analysis configuration file (JSON)");
    cmd->add_option("--preset", o.preset, "built-in coefficient family (see preset-list)");
    cmd->add_option("--param", o.params, "preset parameter key=value (repeatable)")->take_all();
    cmd->add_option("--out", o.out_dir, "output directory (default: $JSPEC_OUT or .)");
    cmd->add_option("--format", o.format, "report format: json | csv | both");
    cmd->add_option("--m-max", o.m_max, "largest recursion depth m for the criteria battery");
    cmd->add_option("--seed", o.seed, "seed for randomized sweeps");
    cmd->add_option("--threads", o.threads, "worker threads for grid scans (0 = serial)");
}

jacobi::cli::ParamMap parse_params(const std::vector<std::string>& kvs) {
    jacobi::cli::ParamMap out;
    for (const auto& kv : kvs) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--param expects key=value, got '" + kv + "'");
        out[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
    return out;
}

AnalysisConfig load_config(const CommonOpts& o) {
    AnalysisConfig cfg;
    if (!o.config_path.empty() && !o.preset.empty())
        throw ConfigError("--config and --preset are mutually exclusive");
    if (!o.config_path.empty()) {
        std::ifstream f(o.config_path);
        if (!f) throw ConfigError("cannot read config file: " + o.config_path);
        Json j;
        try {
            f >> j;
        } catch (const Json::exception& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        cfg = jacobi::cli::parse_config(j);
    } else if (!o.preset.empty()) {
        cfg.doc = jacobi::cli::make_preset(o.preset, parse_params(o.params));
        cfg.spec = jacobi::cli::realize(cfg.doc);
    } else {
        throw ConfigError("one of --config or --preset is required");
    }
    if (o.m_max > 0) cfg.m_max = o.m_max;
    if (!o.format.empty()) cfg.format = o.format;
    if (o.seed >= 0) cfg.seed = static_cast<unsigned long>(o.seed);
    if (o.threads >= 0) cfg.threads = o.threads;
    if (!o.out_dir.empty()) {
        cfg.out_dir = o.out_dir;
    } else if (const char* env = std::getenv("JSPEC_OUT"); env && *env && o.config_path.empty()) {
        cfg.out_dir = env;
    }
    cfg.validate();
    return cfg;
}

std::filesystem::path out_file(const AnalysisConfig& cfg, const std::string& name) {
    std::filesystem::create_directories(cfg.out_dir);
    return std::filesystem::path(cfg.out_dir) / name;
}

int cmd_criteria(const CommonOpts& o) {
    const AnalysisConfig cfg = load_config(o);
    const auto battery = jacobi::conditions::run_battery(*cfg.spec, cfg.m_max, cfg.numeric_range);
    const Json j = jacobi::report::criteria_json(battery, cfg.doc.source);
    jacobi::report::write_atomic(out_file(cfg, "criteria.json"), j.dump(2) + "\n");
    const std::string table = jacobi::report::criteria_table(battery);
    jacobi::report::write_atomic(out_file(cfg, "criteria.txt"), table);
    std::cout << table;
    return 0;
}

int cmd_spectrum(const CommonOpts& o) {
    const AnalysisConfig cfg = load_config(o);
    if (cfg.format != "json") {
        jacobi::report::write_atomic(
            out_file(cfg, "spectrum.csv"),
            jacobi::report::spectrum_csv(*cfg.spec, cfg.truncations, cfg.window_lo, cfg.window_hi,
                                         cfg.eig_tol));
        const long n_max = std::min<long>(cfg.truncations.back(), 2000);
        jacobi::report::write_atomic(out_file(cfg, "sumsq.csv"),
                                     jacobi::report::sumsq_csv(*cfg.spec, n_max));
    }
    if (cfg.format != "csv") {
        const Json j = jacobi::report::spectrum_json(*cfg.spec, cfg.truncations, cfg.window_lo,
                                                     cfg.window_hi, cfg.eig_tol);
        jacobi::report::write_atomic(out_file(cfg, "spectrum.json"), j.dump(2) + "\n");
    }
    std::cout << "spectrum report written to " << cfg.out_dir << "\n";
    return 0;
}

int cmd_limits(const CommonOpts& o) {
    const AnalysisConfig cfg = load_config(o);
    const auto rep = jacobi::spectra::limit_points(*cfg.spec, cfg.truncations, cfg.window_lo,
                                                   cfg.window_hi, cfg.cluster_tol, cfg.eig_tol);
    if (cfg.format != "json")
        jacobi::report::write_atomic(out_file(cfg, "limits.csv"), jacobi::report::limits_csv(rep));
    if (cfg.format != "csv")
        jacobi::report::write_atomic(out_file(cfg, "limits.json"),
                                     jacobi::report::limits_json(rep).dump(2) + "\n");
    std::cout << rep.candidates.size() << " candidate limit point(s) in [" << cfg.window_lo << ", "
              << cfg.window_hi << "]\n";
    return 0;
}

int cmd_cfrac(const CommonOpts& o) {
    const AnalysisConfig cfg = load_config(o);
    const auto grid = cfg.grid.points();
    std::vector<jacobi::cfrac::CFEvaluation> evals;
    if (cfg.threads > 1 && grid.size() > 1) {
        // per-lambda evaluations are independent; results assembled by index
        const std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(cfg.threads), grid.size());
        std::vector<std::future<std::vector<jacobi::cfrac::CFEvaluation>>> futs;
        const std::size_t chunk = (grid.size() + nw - 1) / nw;
        for (std::size_t w = 0; w < nw; ++w) {
            const std::size_t lo = w * chunk, hi = std::min(grid.size(), lo + chunk);
            if (lo >= hi) break;
            futs.push_back(std::async(std::launch::async, [&, lo, hi] {
                const std::vector<std::complex<double>> part(grid.begin() + static_cast<std::ptrdiff_t>(lo),
                                                             grid.begin() + static_cast<std::ptrdiff_t>(hi));
                return jacobi::cfrac::convergence_scan(*cfg.spec, part, cfg.cf_N_max, cfg.cf_tail_tol,
                                                       cfg.eig_tol);
            }));
        }
        for (auto& f : futs) {
            auto part = f.get();
            evals.insert(evals.end(), part.begin(), part.end());
        }
    } else {
        evals = jacobi::cfrac::convergence_scan(*cfg.spec, grid, cfg.cf_N_max, cfg.cf_tail_tol, cfg.eig_tol);
    }
    if (cfg.format != "json")
        jacobi::report::write_atomic(out_file(cfg, "cfrac.csv"), jacobi::report::cfrac_csv(evals));
    if (cfg.format != "csv")
        jacobi::report::write_atomic(out_file(cfg, "cfrac.json"),
                                     jacobi::report::cfrac_json(evals).dump(2) + "\n");
    long converged = 0;
    for (const auto& e : evals) converged += e.converged ? 1 : 0;
    std::cout << converged << "/" << evals.size() << " grid points converged\n";
    return 0;
}

int cmd_verify(long seed, bool inject_fault, double tol_scale, bool full) {
    jacobi::verify::Params prm = full ? jacobi::verify::acceptance_params() : jacobi::verify::Params{};
    if (seed >= 0) prm.seed = static_cast<unsigned long>(seed);
    prm.inject_fault = inject_fault;
    prm.tol_scale = tol_scale;
    const auto results = jacobi::verify::run_all(prm);
    bool all = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << "  " << r.name << "  (" << r.detail << ")  ["
                  << r.seconds << " s]\n";
        all = all && r.pass;
    }
    std::cout << (all ? "verification passed" : "verification FAILED") << "\n";
    return all ? 0 : 1;
}

int cmd_indices(const std::string& variant, int m) {
    using namespace jacobi::multiindex;
    Variant v;
    if (variant == "I")
        v = Variant::I;
    else if (variant == "Ihat")
        v = Variant::IHat;
    else if (variant == "I+")
        v = Variant::IPlus;
    else if (variant == "Ihat+")
        v = Variant::IHatPlus;
    else
        throw ConfigError("variant must be one of: I, Ihat, I+, Ihat+");
    if (m < 1 || m > 16) throw ConfigError("m must be in [1, 16] for printing");
    const auto set = generate(v, m);
    std::cout << variant << " m=" << m << " (" << set.size() << " elements)\n";
    for (const auto& p : set) std::cout << "  " << to_string(p) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"jspec: spectral analysis of unbounded symmetric tridiagonal operators"};
    app.require_subcommand(1);

    CommonOpts criteria_o, spectrum_o, limits_o, cfrac_o;
    add_common(app.add_subcommand("criteria", "evaluate the self-adjointness criteria battery"), criteria_o);
    add_common(app.add_subcommand("spectrum", "truncation spectra and eigenvector diagnostics"), spectrum_o);
    add_common(app.add_subcommand("limits", "estimate limit points of truncation eigenvalues"), limits_o);
    add_common(app.add_subcommand("cfrac", "continued-fraction convergence scan"), cfrac_o);

    auto* verify_cmd = app.add_subcommand("verify", "run the cross-module identity suites");
    long v_seed = -1;
    bool v_fault = false, v_full = false;
    double v_tol_scale = 1.0;
    verify_cmd->add_option("--seed", v_seed, "seed for the randomized sweeps");
    verify_cmd->add_flag("--inject-fault", v_fault, "corrupt one input (the suites must then fail)");
    verify_cmd->add_option("--tol-scale", v_tol_scale, "scales every tolerance (0 cannot pass)");
    verify_cmd->add_flag("--full", v_full, "full-size sweeps (acceptance sizes)");

    app.add_subcommand("preset-list", "list the built-in coefficient families");

    auto* indices_cmd = app.add_subcommand("indices", "print a multi-index walk set");
    std::string ix_variant = "I+";
    int ix_m = 3;
    indices_cmd->add_option("--variant", ix_variant, "I | Ihat | I+ | Ihat+");
    indices_cmd->add_option("--m", ix_m, "walk length m");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand("criteria")) return cmd_criteria(criteria_o);
        if (app.got_subcommand("spectrum")) return cmd_spectrum(spectrum_o);
        if (app.got_subcommand("limits")) return cmd_limits(limits_o);
        if (app.got_subcommand("cfrac")) return cmd_cfrac(cfrac_o);
        if (app.got_subcommand("verify")) return cmd_verify(v_seed, v_fault, v_tol_scale, v_full);
        if (app.got_subcommand("preset-list")) {
            for (const auto& name : jacobi::cli::preset_names())
                std::cout << name << "\n    " << jacobi::cli::preset_doc(name) << "\n";
            return 0;
        }
        if (app.got_subcommand("indices")) return cmd_indices(ix_variant, ix_m);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
