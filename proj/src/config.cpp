#include "fellerlab/config.hpp"

#include "fellerlab/error.hpp"
#include "fellerlab/format.hpp"
#include "fellerlab/solver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace feller {

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues) {
    std::string out = "invalid configuration:";
    for (const auto& i : issues) {
        out += "\n  ";
        if (i.line > 0) out += "line " + std::to_string(i.line) + ": ";
        out += i.message;
    }
    return out;
}

// Value-level failure; the parser attaches the line.
struct BadValue {
    std::string message;
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

double parse_real(const std::string& v) {
    double out = 0.0;
    const char* end = v.data() + v.size();
    auto res = std::from_chars(v.data(), end, out);
    if (v.empty() || res.ec != std::errc() || res.ptr != end) throw BadValue{"expected a number, got '" + v + "'"};
    if (std::isnan(out)) throw BadValue{"nan is not allowed"};
    return out;
}

long long parse_int(const std::string& v) {
    long long out = 0;
    const char* end = v.data() + v.size();
    auto res = std::from_chars(v.data(), end, out);
    if (v.empty() || res.ec != std::errc() || res.ptr != end) throw BadValue{"expected an integer, got '" + v + "'"};
    return out;
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> out;
    if (trim(v).empty()) return out;
    std::string item;
    std::istringstream is(v);
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (item.empty()) throw BadValue{"empty list element"};
        out.push_back(item);
    }
    return out;
}

// Range predicate with a human-readable description.
struct Range {
    std::function<bool(double)> ok;
    std::string text;
};

Range any_finite() { return {[](double x) { return std::isfinite(x); }, "a finite number"}; }
Range positive() { return {[](double x) { return std::isfinite(x) && x > 0.0; }, "> 0"}; }
Range nonneg() { return {[](double x) { return std::isfinite(x) && x >= 0.0; }, ">= 0"}; }
Range open_unit() { return {[](double x) { return x > 0.0 && x < 1.0; }, "in (0, 1)"}; }
Range at_least(double lo) {
    return {[lo](double x) { return std::isfinite(x) && x >= lo; }, ">= " + fmt_double(lo)};
}
Range exponent() { return {[](double x) { return x >= 1.0; }, ">= 1 (inf allowed)"}; }
Range int_range(long long lo, long long hi) {
    return {[lo, hi](double x) { return x >= lo && x <= hi; },
            "in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]"};
}

void check_range(double x, const Range& r) {
    if (!r.ok(x)) throw BadValue{"value " + fmt_double(x) + " out of range: must be " + r.text};
}

struct Field {
    std::string section;
    std::string key;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

template <class Acc>
Field real_field(std::string sec, std::string key, Acc acc, Range range) {
    return {std::move(sec), std::move(key),
            [acc](const ExperimentConfig& c) { return fmt_double(acc(const_cast<ExperimentConfig&>(c))); },
            [acc, range](ExperimentConfig& c, const std::string& v) {
                const double x = parse_real(v);
                check_range(x, range);
                acc(c) = x;
            }};
}

template <class Acc>
Field int_field(std::string sec, std::string key, Acc acc, long long lo, long long hi) {
    return {std::move(sec), std::move(key),
            [acc](const ExperimentConfig& c) { return std::to_string(acc(const_cast<ExperimentConfig&>(c))); },
            [acc, lo, hi](ExperimentConfig& c, const std::string& v) {
                const long long x = parse_int(v);
                check_range(static_cast<double>(x), int_range(lo, hi));
                acc(c) = static_cast<int>(x);
            }};
}

template <class Acc>
Field enum_field(std::string sec, std::string key, Acc acc, std::vector<std::string> allowed) {
    return {std::move(sec), std::move(key),
            [acc](const ExperimentConfig& c) { return acc(const_cast<ExperimentConfig&>(c)); },
            [acc, allowed](ExperimentConfig& c, const std::string& v) {
                if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
                    std::string all;
                    for (const auto& a : allowed) all += (all.empty() ? "" : "|") + a;
                    throw BadValue{"unknown value '" + v + "', expected one of " + all};
                }
                acc(c) = v;
            }};
}

// "auto" (empty optional) or a number in range.
template <class Acc>
Field optional_real_field(std::string sec, std::string key, Acc acc, Range range) {
    return {std::move(sec), std::move(key),
            [acc](const ExperimentConfig& c) {
                const auto& o = acc(const_cast<ExperimentConfig&>(c));
                return o ? fmt_double(*o) : std::string("auto");
            },
            [acc, range](ExperimentConfig& c, const std::string& v) {
                if (v == "auto") {
                    acc(c).reset();
                    return;
                }
                const double x = parse_real(v);
                check_range(x, range);
                acc(c) = x;
            }};
}

template <class Acc>
Field real_list_field(std::string sec, std::string key, Acc acc, Range range, bool increasing) {
    return {std::move(sec), std::move(key),
            [acc](const ExperimentConfig& c) {
                std::string out;
                for (double x : acc(const_cast<ExperimentConfig&>(c))) out += (out.empty() ? "" : ",") + fmt_double(x);
                return out;
            },
            [acc, range, increasing](ExperimentConfig& c, const std::string& v) {
                std::vector<double> xs;
                for (const auto& item : split_list(v)) {
                    const double x = parse_real(item);
                    check_range(x, range);
                    xs.push_back(x);
                }
                if (xs.empty()) throw BadValue{"list must not be empty"};
                if (increasing)
                    for (std::size_t i = 1; i < xs.size(); ++i)
                        if (!(xs[i] > xs[i - 1])) throw BadValue{"list must be strictly increasing"};
                acc(c) = std::move(xs);
            }};
}

const std::vector<Field>& schema() {
    using C = ExperimentConfig;
    static const std::vector<Field> fields = [] {
        std::vector<Field> f;
        f.push_back({"run", "seed", [](const C& c) { return std::to_string(c.seed); },
                     [](C& c, const std::string& v) {
                         std::uint64_t x = 0;
                         const char* end = v.data() + v.size();
                         auto res = std::from_chars(v.data(), end, x);
                         if (v.empty() || res.ec != std::errc() || res.ptr != end)
                             throw BadValue{"expected an unsigned integer, got '" + v + "'"};
                         c.seed = x;
                     }});
        f.push_back({"run", "output", [](const C& c) { return c.output; },
                     [](C& c, const std::string& v) {
                         if (v.empty()) throw BadValue{"output directory must not be empty"};
                         c.output = v;
                     }});

        f.push_back(enum_field("drift", "kind", [](C& c) -> std::string& { return c.drift.kind; },
                               {"zero", "constant", "hardy", "split", "annulus", "time_log", "log_counterexample",
                                "admissible"}));
        f.push_back(int_field("drift", "d", [](C& c) -> int& { return c.drift.d; }, 3, 16));
        f.push_back(real_field("drift", "beta_scale", [](C& c) -> double& { return c.drift.beta_scale; }, nonneg()));
        f.push_back(real_field("drift", "c", [](C& c) -> double& { return c.drift.c; }, any_finite()));
        f.push_back(real_field("drift", "a", [](C& c) -> double& { return c.drift.a; }, any_finite()));
        f.push_back(real_field("drift", "C1", [](C& c) -> double& { return c.drift.C1; }, any_finite()));
        f.push_back(real_field("drift", "C2", [](C& c) -> double& { return c.drift.C2; }, any_finite()));
        f.push_back(int_field("drift", "n", [](C& c) -> int& { return c.drift.n; }, 1, 16));
        f.push_back(real_field("drift", "C", [](C& c) -> double& { return c.drift.C; }, any_finite()));
        f.push_back(real_field("drift", "delta", [](C& c) -> double& { return c.drift.delta; }, open_unit()));
        f.push_back(real_field("drift", "a_exp", [](C& c) -> double& { return c.drift.a_exp; }, nonneg()));
        f.push_back(real_field("drift", "a2", [](C& c) -> double& { return c.drift.a2; }, any_finite()));
        f.push_back(real_field("drift", "t0", [](C& c) -> double& { return c.drift.t0; }, any_finite()));
        f.push_back(real_field("drift", "eps", [](C& c) -> double& { return c.drift.eps; }, positive()));
        f.push_back(real_field("drift", "kappa", [](C& c) -> double& { return c.drift.kappa; }, positive()));
        f.push_back(real_field("drift", "alpha", [](C& c) -> double& { return c.drift.alpha; }, positive()));

        f.push_back(enum_field("grid", "kind", [](C& c) -> std::string& { return c.grid.kind; }, {"radial", "tensor3"}));
        f.push_back(int_field("grid", "d", [](C& c) -> int& { return c.grid.d; }, 3, 16));
        f.push_back(real_field("grid", "r_max", [](C& c) -> double& { return c.grid.r_max; }, positive()));
        f.push_back(real_field("grid", "L", [](C& c) -> double& { return c.grid.L; }, positive()));
        f.push_back(int_field("grid", "n", [](C& c) -> int& { return c.grid.n; }, 4, 1 << 20));

        f.push_back(real_list_field("approx", "m_list", [](C& c) -> std::vector<double>& { return c.m_list; },
                                    at_least(1.0), true));
        f.push_back(optional_real_field("approx", "width", [](C& c) -> std::optional<double>& { return c.width; },
                                        positive()));

        f.push_back(real_field("time", "s", [](C& c) -> double& { return c.s; }, nonneg()));
        f.push_back(real_field("time", "T", [](C& c) -> double& { return c.T; }, positive()));
        f.push_back(real_field("time", "dt", [](C& c) -> double& { return c.dt; }, positive()));

        f.push_back(enum_field("initial", "kind", [](C& c) -> std::string& { return c.initial.kind; },
                               {"gaussian", "shell", "eigenmode", "indicator"}));
        f.push_back(real_field("initial", "width", [](C& c) -> double& { return c.initial.width; }, positive()));
        f.push_back(real_field("initial", "radius", [](C& c) -> double& { return c.initial.radius; }, positive()));
        f.push_back(real_field("initial", "center", [](C& c) -> double& { return c.initial.center; }, any_finite()));

        f.push_back({"checks", "list",
                     [](const C& c) {
                         std::string out;
                         for (const auto& x : c.checks) out += (out.empty() ? "" : ",") + x;
                         return out;
                     },
                     [](C& c, const std::string& v) {
                         auto items = split_list(v);
                         for (const auto& i : items)
                             if (std::find(known_checks().begin(), known_checks().end(), i) == known_checks().end())
                                 throw BadValue{"unknown check '" + i + "'"};
                         for (std::size_t i = 0; i < items.size(); ++i)
                             for (std::size_t j = 0; j < i; ++j)
                                 if (items[i] == items[j]) throw BadValue{"check '" + items[i] + "' listed twice"};
                         c.checks = std::move(items);
                     }});
        auto P = [](auto member) { return [member](C& c) -> auto& { return c.params.*member; }; };
        f.push_back(optional_real_field("checks", "beta", P(&CheckParams::beta), nonneg()));
        f.push_back(real_field("checks", "e1_r", P(&CheckParams::e1_r), open_unit()));
        f.push_back(real_list_field("checks", "e2_deltas", P(&CheckParams::e2_deltas), positive(), false));
        f.push_back(real_list_field("checks", "lp_p", P(&CheckParams::lp_p), exponent(), false));
        f.push_back(real_field("checks", "apriori_q", P(&CheckParams::apriori_q), at_least(2.0)));
        f.push_back(real_field("checks", "apriori_alpha", P(&CheckParams::apriori_alpha),
                               {[](double x) { return x >= 0.0 && x <= 1.0; }, "in [0, 1]"}));
        f.push_back(int_field("checks", "lattice", P(&CheckParams::lattice), 1, 64));
        f.push_back(real_field("checks", "iteration_p", P(&CheckParams::iteration_p), positive()));
        f.push_back(real_field("checks", "iteration_alpha", P(&CheckParams::iteration_alpha),
                               {[](double x) { return x >= 0.0 && x < 1.0; }, "in [0, 1)"}));
        f.push_back(real_field("checks", "sigma_prime", P(&CheckParams::sigma_prime), positive()));
        f.push_back(optional_real_field("checks", "iteration_C0", P(&CheckParams::iteration_C0), nonneg()));
        f.push_back(real_field("checks", "cauchy_slack", P(&CheckParams::cauchy_slack), nonneg()));
        f.push_back(real_field("checks", "weak_tol", P(&CheckParams::weak_tol), positive()));
        f.push_back(real_list_field("checks", "formbound_eps", P(&CheckParams::formbound_eps), positive(), false));
        f.push_back(real_field("checks", "formbound_R", P(&CheckParams::formbound_R), positive()));
        f.push_back(int_field("checks", "formbound_n", P(&CheckParams::formbound_n), 4, 1 << 20));
        f.push_back(real_field("checks", "formbound_tol", P(&CheckParams::formbound_tol), positive()));
        f.push_back(int_field("checks", "formbound_max_iter", P(&CheckParams::formbound_max_iter), 1, 100000000));
        f.push_back(real_field("checks", "ce_kappa", P(&CheckParams::ce_kappa), positive()));
        f.push_back(real_field("checks", "ce_alpha", P(&CheckParams::ce_alpha), positive()));
        f.push_back(real_field("checks", "ce_t0", P(&CheckParams::ce_t0), open_unit()));
        f.push_back(real_field("checks", "ce_t1", P(&CheckParams::ce_t1), open_unit()));
        f.push_back(real_field("checks", "ce_dt", P(&CheckParams::ce_dt), positive()));
        f.push_back(real_field("checks", "ce_r_max", P(&CheckParams::ce_r_max), positive()));
        f.push_back(int_field("checks", "ce_n", P(&CheckParams::ce_n), 4, 1 << 20));
        f.push_back(real_list_field("checks", "ce_decay_t0", P(&CheckParams::ce_decay_t0), open_unit(), false));
        return f;
    }();
    return fields;
}

bool integral_ratio(double span, double dt) {
    const double q = span / dt;
    return std::abs(q - std::round(q)) <= 1e-9 * std::max(1.0, q);
}

double initial_value(const InitialSpec& spec, double r_from_center, double r_from_origin, const Grid& grid) {
    if (spec.kind == "gaussian") return std::exp(-r_from_center * r_from_center / (2.0 * spec.width * spec.width));
    if (spec.kind == "shell") {
        const double z = (r_from_origin - spec.radius) / spec.width;
        return std::exp(-0.5 * z * z);
    }
    if (spec.kind == "indicator") return 0.5 * (1.0 - std::tanh((r_from_center - spec.radius) / spec.width));
    // eigenmode of the computational domain, peak value 1
    const double R = grid.extent();
    if (grid.kind() == GridKind::radial) {
        const double z = 3.141592653589793 * r_from_origin / R;
        return z == 0.0 ? 1.0 : std::sin(z) / z;
    }
    return 0.0;  // tensor3 handled per axis
}

// Cross-field validation; each issue names the line of the key it blames.
void validate(const ExperimentConfig& c, const std::map<std::string, int>& lines, std::vector<ConfigIssue>& issues) {
    auto line_of = [&](const std::string& key) {
        auto it = lines.find(key);
        return it == lines.end() ? 0 : it->second;
    };
    if (c.grid.kind == "radial" && c.grid.d != c.drift.d)
        issues.push_back({line_of("grid.d"), "grid.d (" + std::to_string(c.grid.d) + ") must equal drift.d (" +
                                                 std::to_string(c.drift.d) + ")"});
    if (c.grid.kind == "tensor3" && c.drift.d != 3)
        issues.push_back({line_of("drift.d"), "tensor3 grids need drift.d = 3"});
    if (!(c.T > c.s)) issues.push_back({line_of("time.T"), "time.T must exceed time.s"});
    else if (!integral_ratio(c.T - c.s, c.dt))
        issues.push_back({line_of("time.dt"), "time.dt must divide T - s"});
    else if (!integral_ratio((c.T - c.s) / c.params.lattice, c.dt))
        issues.push_back({line_of("checks.lattice"), "the (s, t) lattice spacing (T - s)/lattice must be a multiple of dt"});
    if (c.grid.kind == "radial" && c.initial.center != 0.0)
        issues.push_back({line_of("initial.center"), "radial grids need initial.center = 0"});
    if (c.params.ce_t1 <= c.params.ce_t0)
        issues.push_back({line_of("checks.ce_t1"), "checks.ce_t1 must exceed checks.ce_t0"});
    else if (!integral_ratio(c.params.ce_t1 - c.params.ce_t0, c.params.ce_dt))
        issues.push_back({line_of("checks.ce_dt"), "checks.ce_dt must divide ce_t1 - ce_t0"});
    try {
        build_drift(c.drift);
    } catch (const std::exception& e) {
        issues.push_back({line_of("drift.kind"), std::string("drift: ") + e.what()});
    }
    try {
        const Grid g = build_grid(c.grid);
        if (c.width && *c.width < 2.0 * g.spacing())
            issues.push_back({line_of("approx.width"), "approx.width must be at least two grid spacings (" +
                                                           fmt_double(2.0 * g.spacing()) + ")"});
        // Dirichlet data at the outer boundary stand in for decay at infinity.
        InitialSpec probe = c.initial;
        const double edge = g.extent() - (g.kind() == GridKind::tensor3 ? std::abs(c.initial.center) : 0.0);
        double at_edge = 0.0;
        if (c.initial.kind != "eigenmode") at_edge = initial_value(probe, edge, g.extent(), g);
        if (!(at_edge < 1e-10))
            issues.push_back({line_of("initial.kind"), "initial data are " + fmt_double(at_edge) +
                                                           " at the outer boundary; enlarge the domain (need < 1e-10)"});
    } catch (const std::exception& e) {
        issues.push_back({line_of("grid.kind"), std::string("grid: ") + e.what()});
    }
    const bool wants_iteration = std::find(c.checks.begin(), c.checks.end(), "iteration") != c.checks.end();
    if (wants_iteration && c.m_list.size() < 3 && !c.params.iteration_C0)
        issues.push_back({line_of("approx.m_list"), "the iteration check needs three m values (or a frozen iteration_C0)"});
    if (wants_iteration && c.m_list.size() < 2)
        issues.push_back({line_of("approx.m_list"), "the iteration check needs two m values"});
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

const std::vector<std::string>& known_checks() {
    static const std::vector<std::string> names{"E1",     "E2",   "E3",        "weak",      "apriori",
                                                "lp",     "cauchy", "iteration", "formbound", "hardy_eps",
                                                "counterexample", "norms"};
    return names;
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::vector<ConfigIssue> issues;
    std::map<std::string, int> seen;  // "section.key" -> line
    std::map<std::string, const Field*> by_name;
    std::vector<std::string> sections;
    for (const auto& f : schema()) {
        by_name[f.section + "." + f.key] = &f;
        if (std::find(sections.begin(), sections.end(), f.section) == sections.end()) sections.push_back(f.section);
    }

    std::istringstream is(text);
    std::string raw;
    std::string section;
    bool section_known = false;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') {
                issues.push_back({line, "malformed section header '" + body + "'"});
                section.clear();
                section_known = false;
                continue;
            }
            section = trim(body.substr(1, body.size() - 2));
            section_known = std::find(sections.begin(), sections.end(), section) != sections.end();
            if (!section_known) issues.push_back({line, "unknown section [" + section + "]"});
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            issues.push_back({line, "expected 'key = value', got '" + body + "'"});
            continue;
        }
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (section.empty()) {
            issues.push_back({line, "key '" + key + "' appears before any section"});
            continue;
        }
        if (!section_known) continue;  // already reported at the header
        const std::string full = section + "." + key;
        auto it = by_name.find(full);
        if (it == by_name.end()) {
            issues.push_back({line, "unknown key '" + key + "' in section [" + section + "]"});
            continue;
        }
        if (auto prev = seen.find(full); prev != seen.end()) {
            issues.push_back({line, "duplicate key '" + full + "' at lines " + std::to_string(prev->second) + " and " +
                                        std::to_string(line)});
            continue;
        }
        seen[full] = line;
        try {
            it->second->set(cfg, value);
        } catch (const BadValue& e) {
            issues.push_back({line, full + ": " + e.message});
        }
    }
    if (issues.empty()) validate(cfg, seen, issues);
    if (!issues.empty()) throw ConfigError(std::move(issues));
    return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    std::string section;
    for (const auto& f : schema()) {
        if (f.section != section) {
            if (!section.empty()) os << '\n';
            section = f.section;
            os << '[' << section << "]\n";
        }
        os << f.key << " = " << f.get(cfg) << '\n';
    }
    return os.str();
}

DriftPtr build_drift(const DriftSpec& s) {
    require(std::isfinite(s.beta_scale) && s.beta_scale >= 0.0, "beta_scale must be finite and >= 0");
    DriftPtr base;
    if (s.kind == "zero") base = drift::zero(s.d);
    else if (s.kind == "constant") base = drift::constant(s.d, s.c);
    else if (s.kind == "hardy") base = drift::hardy(s.d, s.a);
    else if (s.kind == "split") base = drift::split(s.d, s.C1, s.C2, s.n);
    else if (s.kind == "annulus") base = drift::annulus(s.d, s.C, s.delta, s.a_exp);
    else if (s.kind == "time_log") base = drift::time_log(s.d, s.a2, s.t0, s.eps);
    else if (s.kind == "log_counterexample") base = drift::log_counterexample(s.d, s.kappa, s.alpha);
    else if (s.kind == "admissible") base = drift::admissible(s.d, s.a, {}, s.a2, s.t0, s.eps);
    else throw InvalidArgument("unknown drift kind '" + s.kind + "'");
    if (s.beta_scale == 1.0) return base;
    if (s.beta_scale == 0.0) return drift::zero(s.d);
    return drift::scaled(std::sqrt(s.beta_scale), base);
}

Grid build_grid(const GridConfig& s) {
    if (s.kind == "radial") return Grid::radial({s.d, s.r_max, s.n});
    if (s.kind == "tensor3") return Grid::tensor3({s.L, s.n});
    throw InvalidArgument("unknown grid kind '" + s.kind + "'");
}

std::vector<double> build_initial(const InitialSpec& spec, const Grid& grid) {
    std::vector<double> v(grid.size());
    std::vector<double> x(grid.dimension());
    const double e = 1.0 / std::sqrt(static_cast<double>(grid.dimension()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        grid.point(i, x);
        double rc = 0.0;
        for (double xi : x) rc += (xi - spec.center * e) * (xi - spec.center * e);
        rc = std::sqrt(rc);
        if (spec.kind == "eigenmode" && grid.kind() == GridKind::tensor3) {
            double prod = 1.0;
            for (double xi : x) prod *= std::cos(3.141592653589793 * xi / (2.0 * grid.extent()));
            v[i] = prod;
        } else {
            v[i] = initial_value(spec, rc, grid.radius(i), grid);
        }
    }
    return make_state(grid, 0.0, std::move(v)).values;
}

}  // namespace feller
