#include "fellerlab/config.hpp"

#include <doctest.h>

#include <random>
#include <string>

using namespace feller;

namespace {

const char* kMinimal = R"(# zero drift, one positivity check
[run]
seed = 3

[drift]
kind = zero
d = 3

[grid]
kind = radial
d = 3
r_max = 4
n = 256

[time]
T = 0.8
dt = 0.01

[checks]
list = E3
)";

std::vector<ConfigIssue> issues_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.issues();
    }
    return {};
}

bool mentions(const std::vector<ConfigIssue>& issues, const std::string& needle) {
    for (const auto& i : issues)
        if (i.message.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("minimal config parses with defaults elsewhere") {
    const auto cfg = parse_config(kMinimal);
    CHECK(cfg.seed == 3);
    CHECK(cfg.drift.kind == "zero");
    CHECK(cfg.grid.n == 256);
    CHECK(cfg.T == 0.8);
    REQUIRE(cfg.checks.size() == 1);
    CHECK(cfg.checks[0] == "E3");
    CHECK(cfg.m_list == std::vector<double>{8.0, 16.0, 32.0, 64.0});
    CHECK_FALSE(cfg.width.has_value());
}

TEST_CASE("a range violation names its line") {
    std::string text = kMinimal;
    text.replace(text.find("zero\nd = 3\n"), 11, "zero\nd = 3\nbeta_scale = -1\n");
    const auto issues = issues_of(text);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].line == 8);
    CHECK(issues[0].message.find("beta_scale") != std::string::npos);
}

TEST_CASE("duplicate keys report both lines") {
    const auto issues = issues_of(std::string(kMinimal) + "list = E1\n");
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].message.find("duplicate key 'checks.list' at lines 20 and 21") != std::string::npos);
}

TEST_CASE("every violation is collected") {
    std::string text = kMinimal;
    text += "bogus = 1\n[nowhere]\nx = 1\n";
    text.replace(text.find("n = 256"), 7, "n = many");
    text.replace(text.find("kind = zero"), 11, "kind = swirl");
    const auto issues = issues_of(text);
    CHECK(issues.size() >= 4);
    CHECK(mentions(issues, "bogus"));
    CHECK(mentions(issues, "nowhere"));
    CHECK(mentions(issues, "many"));
    CHECK(mentions(issues, "swirl"));
    for (const auto& i : issues) CHECK(i.line > 0);
}

TEST_CASE("keys outside sections and malformed lines") {
    CHECK_FALSE(issues_of("seed = 1\n").empty());
    CHECK_FALSE(issues_of(std::string(kMinimal) + "no equals sign here\n").empty());
    CHECK_FALSE(issues_of(std::string(kMinimal) + "lp_p = 2, 0.5\n").empty());
    CHECK(issues_of(std::string(kMinimal) + "lp_p = 2, inf\n").empty());
}

TEST_CASE("cross-field rules") {
    std::string bad_dims = kMinimal;
    bad_dims.replace(bad_dims.find("[grid]\nkind = radial\nd = 3"), 26, "[grid]\nkind = radial\nd = 4");
    CHECK(mentions(issues_of(bad_dims), "d"));

    std::string bad_dt = kMinimal;
    bad_dt.replace(bad_dt.find("dt = 0.01"), 9, "dt = 0.03");
    CHECK_FALSE(issues_of(bad_dt).empty());

    std::string bad_check = kMinimal;
    bad_check.replace(bad_check.find("list = E3"), 9, "list = E3, E9");
    CHECK(mentions(issues_of(bad_check), "E9"));
}

TEST_CASE("serialize then parse is a fixed point") {
    std::mt19937_64 gen(42);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        auto cfg = parse_config(kMinimal);
        cfg.seed = gen();
        cfg.drift.kind = trial % 2 ? "hardy" : "annulus";
        cfg.drift.beta_scale = u(gen);
        cfg.drift.a = 0.1 + u(gen);
        cfg.drift.C = u(gen);
        cfg.drift.delta = 0.1 + 0.8 * u(gen);
        cfg.grid.n = 64 + static_cast<int>(gen() % 512);
        cfg.grid.r_max = 4.0 + 4.0 * u(gen);
        cfg.m_list = {4.0 + u(gen), 16.0, 32.0 + u(gen)};
        if (trial % 3 == 0) cfg.width = 0.5 + u(gen);
        cfg.params.lp_p = {2.0, 2.0 + 10.0 * u(gen), INFINITY};
        if (trial % 4 == 0) cfg.params.beta = u(gen);
        if (trial % 5 == 0) cfg.params.iteration_C0 = u(gen);
        cfg.initial.width = 0.1 + 0.2 * u(gen);
        cfg.checks = {"E1", "E3", "weak"};
        const auto text = serialize_config(cfg);
        const auto back = parse_config(text);
        CHECK(back == cfg);
        CHECK(serialize_config(back) == text);
    }
}

TEST_CASE("builders") {
    const auto cfg = parse_config(kMinimal);
    const auto grid = build_grid(cfg.grid);
    CHECK(grid.size() == 257);
    const auto f = build_initial(cfg.initial, grid);
    CHECK(f.size() == grid.size());
    CHECK(f.front() == doctest::Approx(1.0));
    CHECK(f.back() == 0.0);

    DriftSpec spec;
    spec.kind = "hardy";
    spec.beta_scale = 0.25;
    const auto field = build_drift(spec);
    const std::vector<double> x{2.0, 0.0, 0.0};
    std::vector<double> out(3);
    field->eval(0.0, x, out);
    CHECK(out[0] == doctest::Approx(0.5 * 0.5));  // sqrt(0.25) * a / |x|
    spec.beta_scale = 0.0;
    build_drift(spec)->eval(0.0, x, out);
    CHECK(out[0] == 0.0);
}
