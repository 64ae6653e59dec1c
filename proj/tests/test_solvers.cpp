#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/case_studies.hpp"
#include "core/policy_structure.hpp"
#include "core/risk_neutral_vi.hpp"
#include "core/solvers.hpp"
#include "oracles.hpp"

using namespace riskdiv;

namespace {

SurplusGrid covering_grid(const IncrementModel& m, const RiskParams& p, double step_frac) {
    const double step = bbar(m, p) * step_frac;
    const auto n = static_cast<std::size_t>(std::ceil(xi_star(m, p) / step)) + 7;
    return SurplusGrid(step, n);
}

double sup_value_diff(const ValueFn& a, const ValueFn& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.grid.n_nodes; ++i)
        d = std::max(d, std::abs(a.value_at(i) - b.value_at(i)));
    return d;
}

}  // namespace

TEST_SUITE("horizon_solvers") {

TEST_CASE("one-stage problem pays everything") {
    auto m = IncrementModel::double_exponential(2.0);
    RiskParams p(0.9, 1.0);
    auto grid = covering_grid(m, p, 1.0 / 50.0);
    auto fh = finite_horizon_solve(1, p, m, grid);
    REQUIRE(fh.values.size() == 1);
    for (std::size_t i = 0; i < grid.n_nodes; ++i) {
        CHECK(fh.values[0].value_at(i) == grid.x(i));  // J_1 = id exactly
        CHECK(fh.policies[0].actions[i] == grid.x(i));
    }
}

TEST_CASE("two-stage value matches the closed form") {
    RiskParams p(0.99, 1.0);
    auto m = IncrementModel::double_exponential(2.0);
    auto grid = covering_grid(m, p, 1.0 / 100.0);
    auto fh = finite_horizon_solve(2, p, m, grid);
    for (std::size_t i = 0; i < grid.n_nodes; i += 23) {
        CHECK(std::abs(fh.values[1].value_at(i) - two_stage_closed_form(grid.x(i), p, m)) < 1e-8);
        CHECK(fh.policies[0].actions[i] == grid.x(i));  // pay out everything first
    }

    RiskParams p0(0.99, 0.0);
    auto fh0 = finite_horizon_solve(2, p0, m, grid);
    for (std::size_t i = 0; i < grid.n_nodes; i += 23)
        CHECK(std::abs(fh0.values[1].value_at(i) -
                       (grid.x(i) + p0.beta * m.mean_positive_part())) < 1e-8);
}

TEST_CASE("finite-horizon values increase with the horizon") {
    auto m = IncrementModel::double_exponential(1.2);
    RiskParams p(0.9, 0.3);
    auto grid = covering_grid(m, p, 1.0 / 60.0);
    auto fh = finite_horizon_solve(5, p, m, grid);
    for (std::size_t n = 1; n < fh.values.size(); ++n)
        for (std::size_t i = 0; i < grid.n_nodes; ++i)
            CHECK(fh.values[n].value_at(i) >= fh.values[n - 1].value_at(i) - 1e-12);
}

TEST_CASE("infinite-horizon solve: contraction certificate and invariants") {
    auto m = IncrementModel::double_exponential(2.0);
    RiskParams p(0.9, 0.5);
    auto grid = covering_grid(m, p, 1.0 / 120.0);
    auto sol = infinite_horizon_solve(p, m, grid, 1e-8);
    const auto& r = sol.report.residual_history;

    for (std::size_t k = 2; k < r.size(); ++k)
        CHECK(r[k] <= p.beta * r[k - 1] + 1e-10);
    CHECK(sol.report.certified_error ==
          doctest::Approx(sol.report.final_residual * p.beta / (1.0 - p.beta)));
    CHECK(sol.report.certified_error <= 1e-8);

    const double bb = bbar(m, p);
    auto sm = check_s_membership(sol.value, bb, 1e-8);
    CHECK(sm.ok);
    CHECK(sol.report.xi_estimate <= xi_star(m, p) + grid.step);
    CHECK(sol.report.tail_extension_error ==
          doctest::Approx(p.beta * std::abs(bb - sol.value.bounded.back())));

    // dominates every finite-horizon value (monotone approximation)
    auto fh = finite_horizon_solve(6, p, m, grid);
    for (const auto& jn : fh.values)
        for (std::size_t i = 0; i < grid.n_nodes; i += 17)
            CHECK(sol.value.value_at(i) >= jn.value_at(i) - 1e-10);
}

TEST_CASE("warm start converges to the same fixed point") {
    auto m = IncrementModel::double_exponential(2.0);
    RiskParams p(0.9, 0.5);
    auto grid = covering_grid(m, p, 1.0 / 60.0);
    const double tol = 1e-9;
    auto cold = infinite_horizon_solve(p, m, grid, tol);
    std::vector<double> warm(grid.n_nodes, bbar(m, p));
    auto hot = infinite_horizon_solve(p, m, grid, tol, warm);
    CHECK(sup_value_diff(cold.value, hot.value) <= 2.0 * tol);
}

TEST_CASE("rerunning at tol/10 moves the value by at most the certified error") {
    auto m = IncrementModel::double_exponential(1.2);
    RiskParams p(0.9, 0.2);
    auto grid = covering_grid(m, p, 1.0 / 60.0);
    auto loose = infinite_horizon_solve(p, m, grid, 1e-5);
    auto tight = infinite_horizon_solve(p, m, grid, 1e-6);
    CHECK(sup_value_diff(loose.value, tight.value) <= loose.report.certified_error + 1e-12);
}

TEST_CASE("pay-all regime of the left-sided exponential model") {
    RiskParams p(0.99, 6.0);  // gamma >= beta * lambda
    auto m = IncrementModel::left_exponential(6.0, 1.1);
    auto grid = covering_grid(m, p, 1.0 / 40.0);
    auto sol = infinite_horizon_solve(p, m, grid, 1e-6);
    for (std::size_t i = 0; i < grid.n_nodes; ++i)
        CHECK(sol.policy.actions[i] == grid.x(i));
}

TEST_CASE("solver rejects invalid models and short grids") {
    RiskParams p(0.9, 1.0);
    auto bad = IncrementModel::left_exponential(1.0, 0.5);  // lambda d <= 1
    CHECK_THROWS_AS(infinite_horizon_solve(p, bad, SurplusGrid(0.1, 1000), 1e-6), Error);
    auto m = IncrementModel::double_exponential(2.0);
    CHECK_THROWS_AS(infinite_horizon_solve(p, m, SurplusGrid(0.1, 50), 1e-6), Error);
    auto ruinless = IncrementModel::tabulated({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0});
    CHECK_THROWS_AS(finite_horizon_solve(2, p, ruinless, SurplusGrid(0.1, 50)), Error);
}

TEST_CASE("policy evaluation: pay-all matches the scalar recursion") {
    auto m = IncrementModel::double_exponential(2.0);
    auto grid = covering_grid(m, RiskParams(0.9, 0.0), 1.0 / 60.0);
    for (double gamma : {0.0, 1.0}) {
        RiskParams p(0.9, gamma);
        auto j = policy_evaluation(PolicyFn::pay_all(grid), p, m, 1e-10);
        const double c_star = oracle::pay_all_value_offset(m, p.beta, gamma);
        for (std::size_t i = 0; i < grid.n_nodes; i += 19)
            CHECK(j.bounded[i] == doctest::Approx(c_star).epsilon(1e-8));
    }
}

TEST_CASE("policy evaluation of the solver policy reproduces the value function") {
    auto m = IncrementModel::double_exponential(2.0);
    RiskParams p(0.9, 0.2);
    auto grid = covering_grid(m, p, 1.0 / 80.0);
    const double tol = 1e-8;
    auto sol = infinite_horizon_solve(p, m, grid, tol);
    auto j_alpha = policy_evaluation(sol.policy, p, m, tol);
    CHECK(sup_value_diff(j_alpha, sol.value) <= tol + sol.report.certified_error);
}

TEST_CASE("policy improvement from pay-all never lowers the value") {
    auto m = IncrementModel::double_exponential(2.0);
    RiskParams p(0.9, 0.2);
    auto grid = covering_grid(m, p, 1.0 / 80.0);
    const PolicyFn alpha = PolicyFn::pay_all(grid);
    auto j_alpha = policy_evaluation(alpha, p, m, 1e-10);
    auto delta = policy_improvement_step(alpha, j_alpha, p, m);
    auto j_delta = policy_evaluation(delta, p, m, 1e-10);
    for (std::size_t i = 0; i < grid.n_nodes; ++i) {
        CHECK(j_delta.value_at(i) >= j_alpha.value_at(i) - 1e-9);
        // delta(x - delta(x)) = 0 at grid resolution
        CHECK(delta.actions[delta.retained_index(i)] <= 0.5 * grid.step);
    }
}

TEST_CASE("policy improvement checks its preconditions") {
    auto m = IncrementModel::double_exponential(2.0);
    RiskParams p(0.9, 0.5);
    auto grid = covering_grid(m, p, 1.0 / 40.0);
    // J below id violates the precondition
    std::vector<double> neg(grid.n_nodes, -1.0);
    CHECK_THROWS_AS(policy_improvement_step(PolicyFn::pay_all(grid), ValueFn(grid, neg), p, m),
                    Error);
    // alpha = 0 pays nothing above xi_star
    std::vector<double> zero(grid.n_nodes, 0.0);
    CHECK_THROWS_AS(policy_improvement_step(PolicyFn(grid, zero), ValueFn::identity(grid), p, m),
                    Error);
}

TEST_CASE("policy iteration agrees with value iteration") {
    RiskParams p(0.9, 0.2);
    auto m = IncrementModel::double_exponential(2.0);
    auto grid = covering_grid(m, p, 1.0 / 80.0);
    const double tol = 1e-7;
    auto vi = infinite_horizon_solve(p, m, grid, tol);
    auto pi = policy_iteration(p, m, grid, tol);
    CHECK(sup_value_diff(vi.value, pi.value) <=
          2.0 * tol + vi.report.certified_error + pi.report.certified_error);
    // improvement sequence is pointwise nondecreasing
    for (std::size_t k = 1; k < pi.value_history.size(); ++k)
        for (std::size_t i = 0; i < grid.n_nodes; i += 13)
            CHECK(pi.value_history[k][i] >= pi.value_history[k - 1][i] - 1e-9);
}

TEST_CASE("risk-neutral policy iteration matches the independent comparator") {
    RiskParams p(0.9, 0.0);
    auto m = IncrementModel::double_exponential(2.0);
    auto grid = covering_grid(m, p, 1.0 / 40.0);
    const double tol = 1e-7;
    auto pi = policy_iteration(p, m, grid, tol);
    auto rn = risk_neutral_vi(m, p.beta, grid, tol);
    CHECK(sup_value_diff(pi.value, rn) <= 2.0 * tol + pi.report.certified_error);
}

TEST_CASE("auto grid covers xi_star with the documented resolution") {
    auto m = IncrementModel::double_exponential(2.0);
    RiskParams p(0.8, 1.0);
    auto g = auto_grid(m, p);
    CHECK(g.step == doctest::Approx(bbar(m, p) / 2000.0));
    CHECK(g.x_max() >= xi_star(m, p) + 5.0 * g.step);
}

}  // TEST_SUITE
