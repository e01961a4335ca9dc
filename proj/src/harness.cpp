#include "fellerlab/harness.hpp"

#include "fellerlab/approximation.hpp"
#include "fellerlab/error.hpp"
#include "fellerlab/format.hpp"
#include "fellerlab/formbound.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace feller {

namespace {

// CSV-safe free text: no commas, no line breaks.
std::string clean(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ' ';
    return s;
}

std::string kv(const std::string& key, double v) { return key + "=" + fmt_double(v); }

struct LedgerRecord {
    std::string name;
    double measured = 0.0;
    std::string descriptors;

    std::optional<std::string> field(const std::string& key) const {
        std::istringstream is(descriptors);
        std::string item;
        while (std::getline(is, item, ';')) {
            const auto eq = item.find('=');
            if (eq != std::string::npos && item.substr(0, eq) == key) return item.substr(eq + 1);
        }
        return std::nullopt;
    }
    double number(const std::string& key) const {
        auto v = field(key);
        if (!v) throw InvalidArgument("ledger row '" + name + "' lacks descriptor '" + key + "'");
        return std::stod(*v);
    }
};

std::vector<LedgerRecord> read_ledger(std::istream& is) {
    std::vector<LedgerRecord> rows;
    std::string line;
    bool header = true;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (header) {
            require(line == ledger_header(), "plot data: input is not a ledger of schema version " +
                                                 std::to_string(kLedgerSchemaVersion));
            header = false;
            continue;
        }
        std::vector<std::string> cols;
        std::istringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cols.push_back(c);
        if (line.back() == ',') cols.emplace_back();
        require(cols.size() == 7, "plot data: malformed ledger row '" + line + "'");
        if (cols[4] == "skip") continue;
        rows.push_back({cols[1], cols[2].empty() ? 0.0 : std::stod(cols[2]), cols[6]});
    }
    return rows;
}

void plot_header(PlotKind kind, std::ostream& out) {
    switch (kind) {
    case PlotKind::norm_vs_time:
        out << "# L2 norm of the regularized solutions against time, one block per m;\n"
               "# the curves stay below the initial norm and collapse as m grows\n"
               "# time l2_norm\n";
        break;
    case PlotKind::beta_vs_eps:
        out << "# form-bound estimate of the inverse-square drift cut off below radius eps;\n"
               "# the estimate grows toward the sharp Hardy constant as eps shrinks\n"
               "# eps beta_hat\n";
        break;
    case PlotKind::cauchy_heatmap:
        out << "# pairwise distances between regularized solutions u_m, u_n (max over the time lattice);\n"
               "# small off-diagonal entries for large m, n indicate convergence of the approximation\n";
        break;
    case PlotKind::decay_vs_t0:
        out << "# sup norm at time t0 of the explicit nonzero solution with the log-singular drift;\n"
               "# it vanishes like t0^(kappa - d/2), so zero initial data admit a second solution\n"
               "# t0 supnorm\n";
        break;
    }
}

const char* plot_row_name(PlotKind kind) {
    switch (kind) {
    case PlotKind::norm_vs_time: return "trajectory.norm";
    case PlotKind::beta_vs_eps: return "formbound.beta_vs_eps";
    case PlotKind::cauchy_heatmap: return "cauchy.entry";
    case PlotKind::decay_vs_t0: return "counterexample.sup_at_t0";
    }
    return "";
}

// Runs one check body; module errors become a skip row naming the cause.
template <class F>
void guarded(LedgerWriter& ledger, const std::string& name, F&& body) {
    try {
        body();
    } catch (const std::exception& e) {
        ledger.skip(name, e.what());
    }
}

Grid grid_of(const LoadedTrajectory& t) {
    if (t.kind == GridKind::radial) return Grid::radial({t.d, t.extent, t.n});
    return Grid::tensor3({t.extent, t.n});
}

}  // namespace

std::string ledger_header() { return "schema_version,name,measured,bound,pass,slack,descriptors"; }

std::string ledger_row(const CheckReport& r) {
    std::ostringstream os;
    os << kLedgerSchemaVersion << ',' << clean(r.name) << ',' << fmt_double(r.measured) << ','
       << (r.bound ? fmt_double(*r.bound) : std::string()) << ',' << (r.pass ? "true" : "false") << ','
       << fmt_double(r.slack) << ',' << clean(r.descriptors);
    return os.str();
}

std::string skip_row(const std::string& name, const std::string& cause) {
    return std::to_string(kLedgerSchemaVersion) + "," + clean(name) + ",,,skip,," + "cause=" + clean(cause);
}

LedgerWriter::LedgerWriter(std::ostream& os) : os_(&os) { *os_ << ledger_header() << '\n'; }

void LedgerWriter::append(const CheckReport& rep) {
    std::lock_guard lock(mu_);
    *os_ << ledger_row(rep) << '\n' << std::flush;
    (rep.pass ? passed_ : failed_)++;
}

void LedgerWriter::skip(const std::string& name, const std::string& cause) {
    std::lock_guard lock(mu_);
    *os_ << skip_row(name, cause) << '\n' << std::flush;
    ++skipped_;
}

double resolve_beta(const ExperimentConfig& cfg, const DriftField& field, const Grid& grid) {
    if (cfg.params.beta) return *cfg.params.beta;
    const auto info = drift::known_form_bound(field);
    if (info.beta) return *info.beta;
    const DriftPtr alias(DriftPtr{}, &field);
    const auto moll = mollify(alias, cfg.m_list.back(), grid, cfg.s, cfg.width);
    FormBoundOptions opts;
    opts.seed = cfg.seed;
    opts.tol = cfg.params.formbound_tol;
    opts.max_iter = cfg.params.formbound_max_iter;
    return estimate_beta(moll.samples, grid, opts).beta_hat;
}

SuiteResult run_suite(const ExperimentConfig& cfg, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    SuiteResult result;
    result.ledger = out_dir / "ledger.csv";
    std::ofstream file(result.ledger, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(file), "run_suite: cannot open " + result.ledger.string());
    LedgerWriter ledger(file);
    auto finish = [&] {
        result.passed = ledger.passed();
        result.failed = ledger.failed();
        result.skipped = ledger.skipped();
        return result;
    };
    if (cfg.checks.empty()) return finish();

    DriftPtr field;
    std::optional<Grid> grid;
    std::vector<double> f;
    try {
        field = build_drift(cfg.drift);
        grid = build_grid(cfg.grid);
        f = build_initial(cfg.initial, *grid);
    } catch (const std::exception& e) {
        for (const auto& c : cfg.checks) ledger.skip(c, std::string("setup: ") + e.what());
        return finish();
    }
    const Grid& g = *grid;
    const auto& P = cfg.params;
    const double s = cfg.s, T = cfg.T;
    auto snap = [&](double t) { return s + std::round((t - s) / cfg.dt) * cfg.dt; };

    // One regularized run per m; a failing m only takes its own checks down.
    std::vector<std::optional<RunSpec>> runs(cfg.m_list.size());
    std::vector<std::string> run_errors(cfg.m_list.size());
    for (std::size_t i = 0; i < runs.size(); ++i) {
        try {
            RunSpec r;
            r.grid = &g;
            r.drift = mollified_source(field, cfg.m_list[i], g, cfg.width);
            r.f = f;
            r.dt = cfg.dt;
            r.label = "m" + fmt_double(cfg.m_list[i]);
            runs[i] = std::move(r);
        } catch (const std::exception& e) {
            run_errors[i] = std::string("mollify: ") + e.what();
        }
    }
    auto all_runs = [&] {
        std::vector<RunSpec> out;
        for (std::size_t i = 0; i < runs.size(); ++i) {
            if (!runs[i]) throw InvalidArgument("m=" + fmt_double(cfg.m_list[i]) + " unavailable (" + run_errors[i] + ")");
            out.push_back(*runs[i]);
        }
        return out;
    };
    auto per_m = [&](const std::string& name, auto&& body) {
        for (std::size_t i = 0; i < runs.size(); ++i) {
            if (!runs[i]) {
                ledger.skip(name, run_errors[i] + ";m=" + fmt_double(cfg.m_list[i]));
                continue;
            }
            guarded(ledger, name, [&] { body(*runs[i], cfg.m_list[i]); });
        }
    };

    std::optional<double> beta_cache;
    auto beta = [&] {
        if (!beta_cache) beta_cache = resolve_beta(cfg, *field, g);
        return *beta_cache;
    };

    // Lattice states of each run: exported once and reused by the norm rows.
    std::vector<double> lattice;
    for (int i = 0; i <= P.lattice; ++i) lattice.push_back(snap(s + (T - s) * i / P.lattice));
    std::map<std::size_t, Trajectory> lattice_traj;
    auto lattice_run = [&](std::size_t i) -> const Trajectory& {
        auto it = lattice_traj.find(i);
        if (it != lattice_traj.end()) return it->second;
        Trajectory traj;
        traj.s = s;
        traj.step = cfg.dt;
        traj.states.push_back({s, runs[i]->f});
        SolverOptions opts = runs[i]->opts;
        opts.store_states = false;
        std::size_t next = 1;
        opts.observer = [&](const ScalarState& st) {
            if (next < lattice.size() && std::abs(st.time - lattice[next]) <= 1e-9 * std::max(1.0, T)) {
                traj.states.push_back(st);
                ++next;
            }
        };
        evolve(runs[i]->drift, g, s, T, make_state(g, s, runs[i]->f), cfg.dt, opts);
        return lattice_traj.emplace(i, std::move(traj)).first->second;
    };

    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (!runs[i]) continue;
        guarded(ledger, "export", [&] {
            const auto path = out_dir / ("traj_m" + fmt_double(cfg.m_list[i]) + ".bin");
            std::ofstream os(path, std::ios::binary | std::ios::trunc);
            require(static_cast<bool>(os), "cannot open " + path.string());
            write_binary(os, lattice_run(i), g);
        });
    }

    for (const auto& check : cfg.checks) {
        if (check == "E1") {
            per_m("E1", [&](const RunSpec& run, double) {
                const double r = snap(s + P.e1_r * (T - s));
                if (!field->time_dependent()) {
                    ledger.append(check_E1(run, s, r, T));
                    return;
                }
                // Frozen-per-step drifts compose only up to O(dt): log the defect, judge its rate.
                CheckReport defect = check_E1(run, s, r, T, std::numeric_limits<double>::infinity());
                ledger.append(CheckReport::logged("E1.composition_defect", defect.measured, true, defect.descriptors));
                ledger.append(check_E1_richardson(run, s, T));
            });
        } else if (check == "E2") {
            per_m("E2", [&](const RunSpec& run, double) { ledger.append(check_E2(run, s, P.e2_deltas)); });
        } else if (check == "E3") {
            per_m("E3", [&](const RunSpec& run, double) {
                for (const auto& rep : check_E3(run, s, T)) ledger.append(rep);
            });
        } else if (check == "weak") {
            per_m("weak", [&](const RunSpec& run, double) {
                SpaceTimeBump psi;
                psi.t_a = s + 0.2 * (T - s);
                psi.t_b = s + 0.8 * (T - s);
                psi.rho = std::min(1.0, 0.5 * g.extent());
                const Trajectory traj = run.run(s, T);
                double scale = 0.0;
                const double res = weak_residual(traj, g, run.drift, psi, &scale);
                const double rel = scale > 0.0 ? std::abs(res) / scale : std::abs(res);
                ledger.append(CheckReport::bounded("weak.residual", rel, P.weak_tol, 0.0,
                                                   describe_run(run) + ";" + kv("raw", res) + ";" + kv("scale", scale)));
            });
        } else if (check == "apriori") {
            guarded(ledger, "apriori", [&] {
                const auto sweep = apriori_sweep(all_runs(), beta(), P.apriori_q, P.apriori_alpha, T, P.lattice);
                for (const auto& rep : sweep.reports) ledger.append(rep);
            });
        } else if (check == "lp") {
            per_m("lp", [&](const RunSpec& run, double) {
                for (double p : P.lp_p) ledger.append(lp_ratio(run, p, beta(), s, T));
            });
        } else if (check == "cauchy") {
            guarded(ledger, "cauchy", [&] {
                const auto rs = all_runs();
                for (CauchyNorm norm : {CauchyNorm::supL2, CauchyNorm::supC}) {
                    const auto res = cauchy_matrix(rs, cfg.m_list, norm, T, P.lattice, P.cauchy_slack);
                    ledger.append(res.report);
                    const char* nn = norm == CauchyNorm::supL2 ? "supL2" : "supC";
                    for (std::size_t a = 0; a < res.matrix.size(); ++a)
                        for (std::size_t b = 0; b < res.matrix.size(); ++b)
                            ledger.append(CheckReport::logged(
                                "cauchy.entry", res.matrix[a][b], true,
                                std::string("norm=") + nn + ";i=" + std::to_string(a) + ";j=" + std::to_string(b) +
                                    ";" + kv("m_i", cfg.m_list[a]) + ";" + kv("m_j", cfg.m_list[b])));
                }
            });
        } else if (check == "iteration") {
            guarded(ledger, "iteration", [&] {
                const auto rs = all_runs();
                const auto& m = cfg.m_list;
                const std::size_t c0 = rs.size() >= 3 ? 1 : 0;
                auto terms = [&](std::size_t i) {
                    return iteration_terms(rs[i], rs[i + 1], m[i], m[i + 1], beta(), P.iteration_p, P.iteration_alpha,
                                           P.sigma_prime, s, T);
                };
                const IterationTerms calib = terms(0);
                const IterationTerms chk = c0 == 0 ? calib : terms(c0);
                const auto reps = P.iteration_C0 ? iteration_inequality_check(*P.iteration_C0, calib, chk)
                                                 : iteration_inequality_check(calib, chk);
                for (const auto& rep : reps) ledger.append(rep);
            });
        } else if (check == "formbound") {
            per_m("formbound", [&](const RunSpec&, double m) {
                FormBoundOptions opts;
                opts.seed = cfg.seed;
                opts.tol = P.formbound_tol;
                opts.max_iter = P.formbound_max_iter;
                const auto moll = mollify(field, m, g, s, cfg.width);
                const auto rep = estimate_beta(moll.samples, g, opts);
                const std::string desc = std::string("drift=") + field->describe() + ";" + kv("m", m) + ";" +
                                         kv("width", moll.width) + ";iterations=" + std::to_string(rep.iterations) +
                                         ";" + kv("residual", rep.residual) + ";grid=" + rep.grid;
                ledger.append(CheckReport::logged("formbound.beta_hat", rep.beta_hat, true, desc));
                // Discrete (C2): the regularized field stays within beta + 1/m.
                ledger.append(CheckReport::bounded("formbound.c2", rep.beta_hat, beta() + 1.0 / m, 0.0,
                                                   desc + ";" + kv("beta", beta())));
            });
        } else if (check == "hardy_eps") {
            guarded(ledger, "hardy_eps", [&] {
                require(cfg.drift.kind == "hardy", "hardy_eps needs drift.kind = hardy");
                FormBoundOptions opts;
                opts.seed = cfg.seed;
                opts.tol = P.formbound_tol;
                opts.max_iter = P.formbound_max_iter;
                const double a = cfg.drift.a * std::sqrt(cfg.drift.beta_scale);
                std::vector<std::pair<double, double>> pts;
                for (double eps : P.formbound_eps) {
                    const auto rep = hardy_beta(cfg.drift.d, a, eps, P.formbound_R, P.formbound_n, opts);
                    pts.emplace_back(eps, rep.beta_hat);
                    ledger.append(CheckReport::logged(
                        "formbound.beta_vs_eps", rep.beta_hat, true,
                        kv("eps", eps) + ";" + kv("a", a) + ";" + kv("R", P.formbound_R) + ";n=" +
                            std::to_string(P.formbound_n) + ";iterations=" + std::to_string(rep.iterations)));
                }
                std::sort(pts.begin(), pts.end());  // eps ascending
                bool monotone = true;
                for (std::size_t i = 1; i < pts.size(); ++i) monotone = monotone && pts[i - 1].second > pts[i].second;
                const double sharp = std::pow(2.0 * a / (cfg.drift.d - 2.0), 2);
                ledger.append(CheckReport::logged("formbound.eps_monotone", pts.front().second, monotone,
                                                  kv("sharp", sharp) + ";" + kv("eps_min", pts.front().first)));
            });
        } else if (check == "counterexample") {
            guarded(ledger, "counterexample", [&] {
                const int d = cfg.drift.d;
                const Grid ce = Grid::radial({d, P.ce_r_max, P.ce_n});
                for (const auto& rep : counterexample_check(P.ce_kappa, P.ce_alpha, d, ce, P.ce_t0, P.ce_t1, P.ce_dt))
                    ledger.append(rep);
                for (double t0 : P.ce_decay_t0) {
                    double sup = 0.0;
                    for (std::size_t i = 0; i < ce.size(); ++i)
                        sup = std::max(sup, drift::explicit_solution_radial(P.ce_kappa, P.ce_alpha, d, t0, ce.radius(i)));
                    ledger.append(CheckReport::logged("counterexample.sup_at_t0", sup, true,
                                                      kv("t0", t0) + ";" + kv("kappa", P.ce_kappa) + ";" +
                                                          kv("alpha", P.ce_alpha) + ";d=" + std::to_string(d)));
                }
                guarded(ledger, "counterexample.decay_exponent", [&] {
                    ledger.append(counterexample_decay(P.ce_kappa, P.ce_alpha, d, ce, P.ce_decay_t0));
                });
            });
        } else if (check == "norms") {
            for (std::size_t i = 0; i < runs.size(); ++i) {
                if (!runs[i]) {
                    ledger.skip("norms", run_errors[i]);
                    continue;
                }
                guarded(ledger, "norms", [&] {
                    for (const auto& st : lattice_run(i).states)
                        ledger.append(CheckReport::logged("trajectory.norm", lp_norm(st, g, 2.0), true,
                                                          kv("m", cfg.m_list[i]) + ";" + kv("time", st.time) + ";" +
                                                              kv("sup", lp_norm(st, g, INFINITY))));
                });
            }
        } else {
            ledger.skip(check, "unknown check");
        }
    }
    return finish();
}

PlotKind parse_plot_kind(const std::string& name) {
    for (PlotKind k : {PlotKind::norm_vs_time, PlotKind::beta_vs_eps, PlotKind::cauchy_heatmap, PlotKind::decay_vs_t0})
        if (name == to_string(k)) return k;
    throw InvalidArgument("unknown plot kind '" + name + "'");
}

const char* to_string(PlotKind kind) {
    switch (kind) {
    case PlotKind::norm_vs_time: return "norm_vs_time";
    case PlotKind::beta_vs_eps: return "beta_vs_eps";
    case PlotKind::cauchy_heatmap: return "cauchy_heatmap";
    case PlotKind::decay_vs_t0: return "decay_vs_t0";
    }
    return "";
}

void write_plot_data(std::istream& is, PlotKind kind, std::ostream& out) {
    const auto rows = read_ledger(is);
    plot_header(kind, out);
    if (rows.empty()) return;
    std::vector<LedgerRecord> sel;
    for (const auto& r : rows)
        if (r.name == plot_row_name(kind)) sel.push_back(r);
    if (sel.empty()) throw InvalidArgument(std::string("missing rows: the ledger has no '") + plot_row_name(kind) + "' rows");

    switch (kind) {
    case PlotKind::norm_vs_time: {
        std::map<double, std::vector<std::pair<double, double>>> by_m;
        for (const auto& r : sel) by_m[r.number("m")].emplace_back(r.number("time"), r.measured);
        bool first = true;
        for (const auto& [m, pts] : by_m) {
            if (!first) out << "\n\n";
            first = false;
            out << "# m=" << fmt_double(m) << '\n';
            for (const auto& [t, v] : pts) out << fmt_double(t) << ' ' << fmt_double(v) << '\n';
        }
        break;
    }
    case PlotKind::beta_vs_eps:
    case PlotKind::decay_vs_t0: {
        const char* key = kind == PlotKind::beta_vs_eps ? "eps" : "t0";
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : sel) pts.emplace_back(r.number(key), r.measured);
        std::sort(pts.begin(), pts.end());
        for (const auto& [x, y] : pts) out << fmt_double(x) << ' ' << fmt_double(y) << '\n';
        break;
    }
    case PlotKind::cauchy_heatmap: {
        std::map<std::string, std::map<std::pair<int, int>, double>> by_norm;
        std::map<std::string, std::map<int, double>> ms;
        for (const auto& r : sel) {
            const auto norm = r.field("norm").value_or("?");
            const int i = static_cast<int>(r.number("i")), j = static_cast<int>(r.number("j"));
            by_norm[norm][{i, j}] = r.measured;
            ms[norm][i] = r.number("m_i");
        }
        bool first = true;
        for (const auto& [norm, cells] : by_norm) {
            if (!first) out << "\n\n";
            first = false;
            out << "# norm=" << norm << " m:";
            for (const auto& [i, m] : ms[norm]) out << ' ' << fmt_double(m);
            out << '\n';
            const int k = static_cast<int>(ms[norm].size());
            for (int i = 0; i < k; ++i) {
                for (int j = 0; j < k; ++j) {
                    auto it = cells.find({i, j});
                    require(it != cells.end(), "missing rows: cauchy entry (" + std::to_string(i) + ", " +
                                                   std::to_string(j) + ") for norm " + norm);
                    out << (j ? " " : "") << fmt_double(it->second);
                }
                out << '\n';
            }
        }
        break;
    }
    }
}

void write_norm_vs_time(const LoadedTrajectory& traj, std::ostream& out) {
    const Grid g = grid_of(traj);
    plot_header(PlotKind::norm_vs_time, out);
    for (const auto& st : traj.traj.states) out << fmt_double(st.time) << ' ' << fmt_double(lp_norm(st, g, 2.0)) << '\n';
}

void emit_plot_data(const std::filesystem::path& input, PlotKind kind, const std::filesystem::path& out) {
    std::ifstream is(input, std::ios::binary);
    require(static_cast<bool>(is), "plot data: cannot open " + input.string());
    char magic[8] = {};
    is.read(magic, sizeof magic);
    const bool binary = is.gcount() == 8 && std::memcmp(magic, "FLTRAJ01", 8) == 0;
    is.clear();
    is.seekg(0);
    if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
    std::ofstream os(out, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(os), "plot data: cannot open " + out.string());
    if (binary) {
        require(kind == PlotKind::norm_vs_time, "plot data: trajectories only give norm_vs_time");
        write_norm_vs_time(read_binary(is), os);
        return;
    }
    write_plot_data(is, kind, os);
}

}  // namespace feller
