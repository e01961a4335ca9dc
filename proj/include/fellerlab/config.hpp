#pragma once

// Flat sectioned key-value configuration:
//
//   [section]
//   key = value   # comment
//
// Every key is typed and range-checked; all violations are collected with
// their line numbers before anything runs.

#include "fellerlab/drift.hpp"
#include "fellerlab/grid.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace feller {

struct DriftSpec {
    std::string kind = "zero";  // zero constant hardy split annulus time_log log_counterexample admissible
    int d = 3;
    double beta_scale = 1.0;    // field multiplied by sqrt(beta_scale), so beta scales by beta_scale
    double c = 1.0;             // constant
    double a = 1.0;             // hardy, admissible
    double C1 = 1.0, C2 = 0.0;  // split
    int n = 1;                  // split
    double C = 1.0, delta = 0.6, a_exp = 0.25;  // annulus
    double a2 = 1.0, t0 = 0.0, eps = 1.0;       // time_log, admissible
    double kappa = 2.0, alpha = 1.0;            // log_counterexample

    bool operator==(const DriftSpec&) const = default;
};

struct GridConfig {
    std::string kind = "radial";  // radial tensor3
    int d = 3;
    double r_max = 8.0;
    double L = 4.0;
    int n = 256;

    bool operator==(const GridConfig&) const = default;
};

struct InitialSpec {
    std::string kind = "gaussian";  // gaussian shell eigenmode indicator
    double width = 0.5;
    double radius = 1.0;
    double center = 0.0;  // offset along e/|e|; tensor3 only

    bool operator==(const InitialSpec&) const = default;
};

struct CheckParams {
    std::optional<double> beta;  // form-bound used by the checks; empty = known value or estimate
    double e1_r = 0.25;          // split point at s + e1_r (T - s)
    std::vector<double> e2_deltas{4e-3, 2e-3, 1e-3};
    std::vector<double> lp_p{2.0, 3.0, std::numeric_limits<double>::infinity()};
    double apriori_q = 2.0;
    double apriori_alpha = 1.0;
    int lattice = 8;
    double iteration_p = 2.5;
    double iteration_alpha = 0.4;
    double sigma_prime = 1.25;
    std::optional<double> iteration_C0;  // frozen constant; empty = calibrate on the first m pair
    double cauchy_slack = 0.05;
    std::vector<double> formbound_eps{1e-3, 5e-4, 2.5e-4};
    double formbound_R = 50.0;
    int formbound_n = 4096;
    double formbound_tol = 1e-9;
    int formbound_max_iter = 20000;
    double weak_tol = 1e-2;  // relative to the test-function scale
    double ce_kappa = 2.0, ce_alpha = 1.0;
    double ce_t0 = 0.1, ce_t1 = 0.5, ce_dt = 1e-4, ce_r_max = 8.0;
    int ce_n = 4096;
    std::vector<double> ce_decay_t0{1e-2, 1e-3, 1e-4};

    bool operator==(const CheckParams&) const = default;
};

struct ExperimentConfig {
    std::uint64_t seed = 0;
    std::string output = "out";
    DriftSpec drift;
    GridConfig grid;
    std::vector<double> m_list{8.0, 16.0, 32.0, 64.0};
    std::optional<double> width;  // mollifier radius; empty = auto
    double s = 0.0;
    double T = 1.0;
    double dt = 1e-3;
    InitialSpec initial;
    std::vector<std::string> checks;
    CheckParams params;

    bool operator==(const ExperimentConfig&) const = default;
};

struct ConfigIssue {
    int line = 0;  // 0 when the issue is not tied to one line
    std::string message;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<ConfigIssue> issues);
    const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<ConfigIssue> issues_;
};

/// Check names accepted in [checks] list.
const std::vector<std::string>& known_checks();

/// Throws ConfigError listing every violation.
ExperimentConfig parse_config(const std::string& text);
/// Canonical text: every key in schema order; parse(serialize(c)) == c.
std::string serialize_config(const ExperimentConfig& cfg);

DriftPtr build_drift(const DriftSpec& spec);
Grid build_grid(const GridConfig& spec);
std::vector<double> build_initial(const InitialSpec& spec, const Grid& grid);

}  // namespace feller
