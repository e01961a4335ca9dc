#include "fellerlab/approximation.hpp"
#include "fellerlab/config.hpp"
#include "fellerlab/constants.hpp"
#include "fellerlab/error.hpp"
#include "fellerlab/format.hpp"
#include "fellerlab/formbound.hpp"
#include "fellerlab/harness.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace feller;

namespace {

struct Globals {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    int threads = 0;
};

ExperimentConfig load(const Globals& g) {
    ExperimentConfig cfg;
    if (!g.config.empty()) {
        std::ifstream is(g.config);
        if (!is) throw InvalidArgument("cannot read config " + g.config);
        std::stringstream ss;
        ss << is.rdbuf();
        cfg = parse_config(ss.str());
    }
    if (!g.out.empty()) cfg.output = g.out;
    if (g.seed) cfg.seed = *g.seed;
    return cfg;
}

std::ofstream open_out(const fs::path& p) {
    fs::create_directories(p.parent_path());
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    if (!os) throw InvalidArgument("cannot write " + p.string());
    return os;
}

int cmd_solve(const ExperimentConfig& cfg) {
    const fs::path out = cfg.output;
    const auto field = build_drift(cfg.drift);
    const Grid grid = build_grid(cfg.grid);
    const auto f = build_initial(cfg.initial, grid);
    for (double m : cfg.m_list) {
        const auto src = mollified_source(field, m, grid, cfg.width);
        // Keep the (s, t) lattice states only; the step count can be large.
        const int lattice = cfg.params.lattice;
        Trajectory traj;
        traj.s = cfg.s;
        traj.step = cfg.dt;
        traj.states.push_back({cfg.s, f});
        const long long steps = step_count(cfg.s, cfg.T, cfg.dt);
        const long long every = steps / lattice;
        long long k = 0;
        SolverOptions opts;
        opts.store_states = false;
        opts.observer = [&](const ScalarState& st) {
            if (++k % every == 0) traj.states.push_back(st);
        };
        evolve(src, grid, cfg.s, cfg.T, make_state(grid, cfg.s, f), cfg.dt, opts);
        const std::string stem = "solve_m" + fmt_double(m);
        auto csv = open_out(out / (stem + ".csv"));
        write_csv(csv, traj);
        auto bin = open_out(out / (stem + ".bin"));
        write_binary(bin, traj, grid);
        const auto& last = traj.states.back();
        std::cout << "m=" << fmt_double(m) << " t=" << fmt_double(last.time)
                  << " sup=" << fmt_double(lp_norm(last, grid, INFINITY)) << " l2=" << fmt_double(lp_norm(last, grid, 2.0))
                  << " -> " << (out / stem).string() << ".{csv,bin}\n";
    }
    return 0;
}

int cmd_formbound(const ExperimentConfig& cfg) {
    const auto field = build_drift(cfg.drift);
    const Grid grid = build_grid(cfg.grid);
    FormBoundOptions opts;
    opts.seed = cfg.seed;
    opts.tol = cfg.params.formbound_tol;
    opts.max_iter = cfg.params.formbound_max_iter;
    auto os = open_out(fs::path(cfg.output) / "formbound.csv");
    os << "m,width," << formbound_csv_header() << '\n';
    for (double m : cfg.m_list) {
        const auto moll = mollify(field, m, grid, cfg.s, cfg.width);
        const auto rep = estimate_beta(moll.samples, grid, opts);
        os << fmt_double(m) << ',' << fmt_double(moll.width) << ',' << formbound_csv_row(rep) << '\n';
        std::cout << "m=" << fmt_double(m) << " beta_hat=" << fmt_double(rep.beta_hat)
                  << " iterations=" << rep.iterations << '\n';
    }
    const auto info = drift::known_form_bound(*field);
    if (info.beta) std::cout << "catalog beta=" << fmt_double(*info.beta) << " (" << drift::to_string(info.provenance) << ")\n";
    return 0;
}

int report(const SuiteResult& r) {
    std::cout << "ledger: " << r.ledger.string() << "\npassed=" << r.passed << " failed=" << r.failed
              << " skipped=" << r.skipped << '\n';
    return r.all_pass() ? 0 : 1;
}

int cmd_constants(const ExperimentConfig& cfg) {
    namespace c = constants;
    const double beta = cfg.params.beta.value_or(0.04);
    std::ostringstream os;
    os << "name,value\n";
    for (double q : {2.0, 3.0, 4.0, c::kInf}) os << "omega_q=" << fmt_double(q) << ',' << fmt_double(c::omega(q)) << '\n';
    for (int d = 3; d <= 6; ++d) os << "beta_threshold_d=" << d << ',' << fmt_double(c::beta_threshold(d)) << '\n';
    os << "lp_threshold_beta=" << fmt_double(beta) << ',' << fmt_double(c::lp_threshold(beta)) << '\n';
    const auto mp = c::moser_params(beta, 2.0, cfg.params.sigma_prime, cfg.drift.d, 10);
    os << "moser_k," << fmt_double(mp.k) << "\nmoser_a," << fmt_double(mp.a) << "\nmoser_alpha," << fmt_double(mp.alpha)
       << "\nmoser_gamma_inf_bound," << fmt_double(mp.gamma_inf_bound) << "\nmoser_Gamma_bound,"
       << fmt_double(mp.Gamma_bound) << '\n';
    for (std::size_t l = 0; l < mp.p_seq.size(); ++l) os << "moser_p_" << l + 1 << ',' << fmt_double(mp.p_seq[l]) << '\n';
    std::cout << os.str();
    auto file = open_out(fs::path(cfg.output) / "constants.csv");
    file << os.str();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Verification harness for parabolic equations with form-bounded drift"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, "Experiment config file")->check(CLI::ExistingFile);
    app.add_option("--out", g.out, "Output directory (overrides run.output)");
    app.add_option("--seed", g.seed, "Seed (overrides run.seed)");
    app.add_option("--threads", g.threads, "OpenMP threads (0 = runtime default)")->check(CLI::NonNegativeNumber);

    auto* solve = app.add_subcommand("solve", "Evolve the regularized problem for every m and export trajectories");
    auto* formbound = app.add_subcommand("formbound", "Estimate form-bounds of the regularized drifts");
    auto* verify = app.add_subcommand("verify", "Run the configured checks and write the ledger");
    auto* consts = app.add_subcommand("constants", "Print thresholds and iteration exponents");
    auto* counter = app.add_subcommand("counterexample", "Run the explicit non-uniqueness checks");
    auto* plot = app.add_subcommand("plotdata", "Write plot data from a ledger or a trajectory");
    std::string kind, input;
    plot->add_option("--kind", kind, "norm_vs_time | beta_vs_eps | cauchy_heatmap | decay_vs_t0")->required();
    plot->add_option("--input", input, "Ledger CSV or binary trajectory (default <out>/ledger.csv)");
    app.fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    try {
        if (g.threads > 0) omp_set_num_threads(g.threads);
        ExperimentConfig cfg = load(g);
        if (*solve) return cmd_solve(cfg);
        if (*formbound) return cmd_formbound(cfg);
        if (*verify) return report(run_suite(cfg, cfg.output));
        if (*consts) return cmd_constants(cfg);
        if (*counter) {
            cfg.checks = {"counterexample"};
            return report(run_suite(cfg, fs::path(cfg.output) / "counterexample"));
        }
        if (*plot) {
            const fs::path in = input.empty() ? fs::path(cfg.output) / "ledger.csv" : fs::path(input);
            const PlotKind k = parse_plot_kind(kind);
            const fs::path out = fs::path(cfg.output) / (std::string(to_string(k)) + ".dat");
            emit_plot_data(in, k, out);
            std::cout << out.string() << '\n';
            return 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
