// Exercises the shared library strictly through its C interface.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <riskdiv.h>

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

namespace {

struct Model {
    rd_model* h = nullptr;
    ~Model() { rd_model_destroy(h); }
};

}  // namespace

TEST_SUITE("capi") {

TEST_CASE("model lifecycle, densities and validation") {
    Model m;
    REQUIRE(rd_model_create_double_exponential(2.0, &m.h) == RD_OK);
    CHECK(rd_model_pdf(m.h, 2.0) == doctest::Approx(0.5));
    CHECK(rd_model_cdf(m.h, 2.0) == doctest::Approx(0.5));
    CHECK(rd_model_mean_positive_part(m.h) == doctest::Approx(2.0676676416183).epsilon(1e-12));
    double rho = 0.0;
    REQUIRE(rd_model_entropic_premium(m.h, 1.0, &rho) == RD_OK);
    CHECK(rho == doctest::Approx(1.4403842120646).epsilon(1e-12));
    CHECK(rd_model_validate(m.h, nullptr, 0) == 0);

    Model bad;
    REQUIRE(rd_model_create_left_exponential(1.0, 0.5, &bad.h) == RD_OK);
    int codes[2];
    REQUIRE(rd_model_validate(bad.h, codes, 2) == 1);
    CHECK(codes[0] == RD_VIOLATION_SHIFT_RATE);
    CHECK(std::string(rd_violation_describe(codes[0])) == "ShiftRateViolation");

    rd_model* fail_h = nullptr;
    CHECK(rd_model_create_left_exponential(-2.0, 0.5, &fail_h) == RD_ERR_INVALID_ARGUMENT);
    CHECK(std::strlen(rd_last_error()) > 0);

    const double nodes[] = {0.0, 1.0};
    const double dens[] = {1.0, 1.0};
    Model tab;
    REQUIRE(rd_model_create_tabulated(nodes, dens, 2, &tab.h) == RD_OK);
    REQUIRE(rd_model_validate(tab.h, codes, 2) == 1);
    CHECK(codes[0] == RD_VIOLATION_RUIN_IMPOSSIBLE);
    CHECK(rd_model_has_boundary_density_jump(tab.h) == 1);
}

TEST_CASE("bbar, xi_star and the auto grid") {
    Model m;
    REQUIRE(rd_model_create_double_exponential(2.0, &m.h) == RD_OK);
    double bb = 0.0, xs = 0.0;
    REQUIRE(rd_bbar(m.h, 0.9, &bb) == RD_OK);
    REQUIRE(rd_xi_star(m.h, 0.9, &xs) == RD_OK);
    CHECK(bb == doctest::Approx(0.9 * rd_model_mean_positive_part(m.h) / 0.1));
    CHECK(xs == doctest::Approx(bb / 0.1));
    double step = 0.0;
    size_t n = 0;
    REQUIRE(rd_auto_grid(m.h, 0.9, &step, &n) == RD_OK);
    CHECK(step == doctest::Approx(bb / 2000.0));
    CHECK(step * double(n - 1) >= xs + 5.0 * step);
}

TEST_CASE("finite solve matches the two-stage closed form") {
    Model m;
    REQUIRE(rd_model_create_double_exponential(2.0, &m.h) == RD_OK);
    double bb = 0.0, xs = 0.0;
    rd_bbar(m.h, 0.9, &bb);
    rd_xi_star(m.h, 0.9, &xs);
    const double step = bb / 60.0;
    const auto n = static_cast<size_t>(std::ceil(xs / step)) + 7;

    rd_finite* f = nullptr;
    REQUIRE(rd_solve_finite(m.h, 0.9, 1.0, step, n, 2, &f) == RD_OK);
    CHECK(rd_finite_size(f) == n);
    CHECK(rd_finite_horizon(f) == 2);
    std::vector<double> j2(n), a1(n);
    REQUIRE(rd_finite_values(f, 2, j2.data()) == RD_OK);
    REQUIRE(rd_finite_actions(f, 1, a1.data()) == RD_OK);
    CHECK(rd_finite_values(f, 3, j2.data()) == RD_ERR_INVALID_ARGUMENT);
    double expect = 0.0;
    for (size_t i = 0; i < n; i += 17) {
        REQUIRE(rd_two_stage_value(m.h, 0.9, 1.0, step * double(i), &expect) == RD_OK);
        CHECK(j2[i] == doctest::Approx(expect).epsilon(1e-10));
        CHECK(a1[i] == step * double(i));
    }

    double est = 0.0, se = 0.0;
    REQUIRE(rd_nested_mc(f, m.h, 0.9, 1.0, 0.0, 20000, 1000, 7, &est, &se) == RD_OK);
    rd_two_stage_value(m.h, 0.9, 1.0, 0.0, &expect);
    CHECK(std::abs(est - expect) <= 4.0 * se);
    double est2 = 0.0, se2 = 0.0;
    REQUIRE(rd_nested_mc(f, m.h, 0.9, 1.0, 0.0, 20000, 1000, 7, &est2, &se2) == RD_OK);
    CHECK(est == est2);  // fixed seed reproduces bit for bit
    rd_finite_destroy(f);
}

TEST_CASE("infinite solve, bands and policy iteration agree") {
    Model m;
    REQUIRE(rd_model_create_double_exponential(2.0, &m.h) == RD_OK);
    double bb = 0.0, xs = 0.0;
    rd_bbar(m.h, 0.9, &bb);
    rd_xi_star(m.h, 0.9, &xs);
    const double step = bb / 60.0;
    const auto n = static_cast<size_t>(std::ceil(xs / step)) + 7;

    rd_solution* vi = nullptr;
    REQUIRE(rd_solve_infinite(m.h, 0.9, 0.2, step, n, 1e-7, &vi) == RD_OK);
    rd_solve_report rep;
    rd_solution_report(vi, &rep);
    CHECK(rep.certified_error <= 1e-7);
    CHECK(rep.iterations > 0);
    CHECK(rd_solution_step(vi) == step);

    std::vector<double> values(n), actions(n);
    rd_solution_values(vi, values.data());
    rd_solution_actions(vi, actions.data());
    for (size_t i = 0; i < n; ++i) {
        CHECK(values[i] >= step * double(i) - 1e-9);
        CHECK(values[i] <= step * double(i) + bb + 1e-9);
    }

    rd_bands* bands = nullptr;
    REQUIRE(rd_bands_extract(actions.data(), n, step, 0.0, &bands) == RD_OK);
    CHECK(rd_bands_xi(bands) == doctest::Approx(rep.xi_estimate));
    CHECK(rd_bands_classify(bands) == RD_POLICY_BARRIER);
    CHECK(rd_bands_action(bands, rd_bands_xi(bands) + 1.0) == doctest::Approx(1.0));
    CHECK(rd_policy_xi(actions.data(), n, step, 0.0) == doctest::Approx(rep.xi_estimate));
    rd_bands_destroy(bands);

    rd_solution* pi = nullptr;
    REQUIRE(rd_solve_policy_iteration(m.h, 0.9, 0.2, step, n, 1e-7, &pi) == RD_OK);
    std::vector<double> pi_values(n);
    rd_solution_values(pi, pi_values.data());
    for (size_t i = 0; i < n; i += 13) CHECK(std::abs(pi_values[i] - values[i]) <= 1e-6);
    const size_t gaps = rd_solution_gap_count(pi);
    CHECK(gaps > 0);
    std::vector<double> g(gaps);
    rd_solution_gaps(pi, g.data());
    for (size_t k = 1; k < gaps; ++k) CHECK(g[k] <= g[k - 1] + 1e-12);

    rd_solution_destroy(pi);
    rd_solution_destroy(vi);

    rd_solution* too_short = nullptr;
    CHECK(rd_solve_infinite(m.h, 0.9, 0.2, step, 16, 1e-7, &too_short) == RD_ERR_GRID_TOO_SHORT);
}

TEST_CASE("case-study surface") {
    CHECK(rd_status_name(RD_OK) == std::string("ok"));
    int regime = -1;
    REQUIRE(rd_exp_case_regime(6.0, 1.1, 0.99, 6.0, &regime) == RD_OK);
    CHECK(regime == RD_REGIME_PAY_ALL);
    REQUIRE(rd_exp_case_regime(6.0, 1.1, 0.99, 0.1, &regime) == RD_OK);
    CHECK(regime == RD_REGIME_INTERIOR_BARRIER);

    double value = 0.0;
    REQUIRE(rd_exp_barrier_value(6.0, 1.1, 0.99, 0.1, &value) == RD_OK);
    CHECK(value == doctest::Approx((1.1 + std::log(1.0 - 0.1 / (0.99 * 6.0)) / 0.1) /
                                   (1.0 / 0.99 - 1.0)));
    CHECK(rd_exp_barrier_value(6.0, 1.1, 0.99, 6.0, &value) == RD_ERR_REGIME);

    Model m;
    REQUIRE(rd_model_create_double_exponential(1.2, &m.h) == RD_OK);
    double q0 = 0.0, q2 = 0.0;
    REQUIRE(rd_three_stage_barrier(m.h, 0.99, 0.0, &q0) == RD_OK);
    REQUIRE(rd_three_stage_barrier(m.h, 0.99, 2.0, &q2) == RD_OK);
    CHECK(q0 > 0.0);
    CHECK(q2 == 0.0);  // high risk aversion collapses the barrier
}

TEST_CASE("risk-neutral oracle surface") {
    Model m;
    REQUIRE(rd_model_create_double_exponential(2.0, &m.h) == RD_OK);
    double bb = 0.0, xs = 0.0;
    rd_bbar(m.h, 0.8, &bb);
    rd_xi_star(m.h, 0.8, &xs);
    const double step = bb / 40.0;
    const auto n = static_cast<size_t>(std::ceil(xs / step)) + 7;
    std::vector<double> w(n);
    REQUIRE(rd_risk_neutral_values(m.h, 0.8, step, n, 1e-6, w.data()) == RD_OK);

    rd_solution* vi = nullptr;
    REQUIRE(rd_solve_infinite(m.h, 0.8, 0.0, step, n, 1e-6, &vi) == RD_OK);
    std::vector<double> values(n);
    rd_solution_values(vi, values.data());
    for (size_t i = 0; i < n; i += 7) CHECK(std::abs(w[i] - values[i]) <= 2e-6);
    rd_solution_destroy(vi);

    double xi = -1.0;
    REQUIRE(rd_risk_neutral_xi(m.h, 0.8, step, n, 1e-6, &xi) == RD_OK);
    CHECK(xi > 0.0);

    int major = 0, minor = 0, patch = 0;
    rd_version(&major, &minor, &patch);
    CHECK(major >= 1);
}

}  // TEST_SUITE
