#include "core/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "core/policy_structure.hpp"

namespace riskdiv {

namespace {

double sup_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

void require_solvable(const IncrementModel& model, const RiskParams& params,
                      const SurplusGrid& grid) {
    const auto violations = model.validate_assumptions();
    if (!violations.empty()) {
        std::string what = "model violates assumptions:";
        for (auto v : violations) what += std::string(" ") + violation_name(v);
        throw Error(ErrorCode::ModelInvalid, what);
    }
    const double xs = xi_star(model, params);
    if (grid.x_max() < xs + 5.0 * grid.step)
        throw Error(ErrorCode::GridTooShort,
                    "grid must reach xi_star + 5 steps (xi_star = " + std::to_string(xs) + ")");
}

SurplusGrid auto_grid(const IncrementModel& model, const RiskParams& params) {
    const double bb = bbar(model, params);
    if (!(bb > 0.0))
        throw Error(ErrorCode::ModelInvalid, "auto_grid: model has E[Z^+] = 0");
    const double step = bb / 2000.0;
    const double x_max = xi_star(model, params) + 10.0 * step;
    const auto n = static_cast<std::size_t>(std::ceil(x_max / step)) + 1;
    return SurplusGrid(step, n);
}

std::size_t default_max_iterations(const IncrementModel& model, const RiskParams& params,
                                   double tol) {
    const double bb = bbar(model, params);
    if (!(bb > 0.0)) return 8;
    const double banach = std::ceil(std::log(tol * (1.0 - params.beta) / bb) / std::log(params.beta));
    return 10 * static_cast<std::size_t>(std::max(1.0, banach));
}

FiniteHorizonResult finite_horizon_solve(std::size_t horizon, const RiskParams& params,
                                         const IncrementModel& model, const SurplusGrid& grid) {
    if (horizon < 1)
        throw Error(ErrorCode::InvalidArgument, "finite_horizon_solve: horizon must be >= 1");
    require_solvable(model, params, grid);

    FiniteHorizonResult out;
    out.values.reserve(horizon);
    std::vector<PolicyFn> by_horizon;
    by_horizon.reserve(horizon);

    // One payment left: pay everything.
    out.values.push_back(ValueFn::identity(grid));
    by_horizon.push_back(PolicyFn::pay_all(grid));
    for (std::size_t n = 2; n <= horizon; ++n) {
        auto [v, a] = bellman_T(out.values.back(), params, model);
        out.values.push_back(std::move(v));
        by_horizon.push_back(std::move(a));
    }
    // Decision epoch t of an N-stage problem has N - t + 1 payments left.
    out.policies.reserve(horizon);
    for (std::size_t t = 1; t <= horizon; ++t) out.policies.push_back(by_horizon[horizon - t]);
    return out;
}

InfiniteHorizonResult infinite_horizon_solve(const RiskParams& params, const IncrementModel& model,
                                             const SurplusGrid& grid, double tol,
                                             const std::optional<std::vector<double>>& warm_start) {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "infinite_horizon_solve: tol must be > 0");
    require_solvable(model, params, grid);
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<double> b = warm_start.value_or(std::vector<double>(grid.n_nodes, 0.0));
    if (b.size() != grid.n_nodes)
        throw Error(ErrorCode::InvalidArgument, "infinite_horizon_solve: warm start size mismatch");

    const double threshold = tol * (1.0 - params.beta) / params.beta;
    const std::size_t max_iter = default_max_iterations(model, params, tol);
    SolveReport report;

    std::vector<std::size_t> last_argmax;
    for (std::size_t k = 1; k <= max_iter; ++k) {
        const HProfile p = build_h_profile(ValueFn(grid, b), params, model);
        const double r = sup_diff(p.prefix_max, b);
        b = p.prefix_max;
        last_argmax = p.argmax_index;
        report.iterations = k;
        report.final_residual = r;
        report.residual_history.push_back(r);
        if (r <= threshold) break;
        if (k == max_iter) {
            report.wall_time_seconds = seconds_since(t0);
            throw MaxIterExceeded("infinite_horizon_solve: no convergence within iteration budget",
                                  report);
        }
    }

    std::vector<double> actions(grid.n_nodes);
    for (std::size_t i = 0; i < grid.n_nodes; ++i)
        actions[i] = grid.x(i) - grid.x(last_argmax[i]);
    PolicyFn policy(grid, std::move(actions));

    report.certified_error = report.final_residual * params.beta / (1.0 - params.beta);
    report.xi_estimate = extract_xi(policy, 0.5 * grid.step);
    report.tail_extension_error = params.beta * std::abs(bbar(model, params) - b.back());
    report.wall_time_seconds = seconds_since(t0);
    return {ValueFn(grid, std::move(b)), std::move(policy), std::move(report)};
}

ValueFn policy_evaluation(const PolicyFn& alpha, const RiskParams& params,
                          const IncrementModel& model, double tol, SolveReport* report_out) {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "policy_evaluation: tol must be > 0");
    const SurplusGrid grid = alpha.grid;
    require_solvable(model, params, grid);
    const auto t0 = std::chrono::steady_clock::now();

    ValueFn v = ValueFn::identity(grid);
    const double threshold = tol * (1.0 - params.beta) / params.beta;
    const std::size_t max_iter = default_max_iterations(model, params, tol);
    SolveReport report;

    for (std::size_t k = 1; k <= max_iter; ++k) {
        ValueFn next = operator_L(v, alpha, params, model);
        const double r = sup_diff(next.bounded, v.bounded);
        v = std::move(next);
        report.iterations = k;
        report.final_residual = r;
        report.residual_history.push_back(r);
        if (r <= threshold) break;
        if (k == max_iter) {
            report.wall_time_seconds = seconds_since(t0);
            throw MaxIterExceeded("policy_evaluation: no convergence within iteration budget", report);
        }
    }
    report.certified_error = report.final_residual * params.beta / (1.0 - params.beta);
    report.xi_estimate = extract_xi(alpha, 0.5 * grid.step);
    report.tail_extension_error = params.beta * std::abs(bbar(model, params) - v.bounded.back());
    report.wall_time_seconds = seconds_since(t0);
    if (report_out) *report_out = report;
    return v;
}

PolicyFn policy_improvement_step(const PolicyFn& alpha, const ValueFn& j_alpha,
                                 const RiskParams& params, const IncrementModel& model) {
    if (alpha.grid != j_alpha.grid)
        throw Error(ErrorCode::InvalidArgument, "policy_improvement_step: grid mismatch");
    const double tol_num = 1e-8;
    for (double bi : j_alpha.bounded)
        if (bi < -tol_num)
            throw Error(ErrorCode::PreconditionViolated, "policy improvement requires J_alpha >= id");
    const double xs = xi_star(model, params);
    for (std::size_t i = 0; i < alpha.grid.n_nodes; ++i) {
        const double x = alpha.grid.x(i);
        if (x > xs && alpha.actions[i] < x - xs - tol_num)
            throw Error(ErrorCode::PreconditionViolated,
                        "policy improvement requires alpha(x) >= x - xi_star above xi_star");
    }

    const HProfile p = build_h_profile(j_alpha, params, model);
    std::vector<double> actions(alpha.grid.n_nodes);
    for (std::size_t i = 0; i < alpha.grid.n_nodes; ++i)
        actions[i] = alpha.grid.x(i) - alpha.grid.x(p.argmax_index[i]);
    return PolicyFn(alpha.grid, std::move(actions));
}

PolicyIterationResult policy_iteration(const RiskParams& params, const IncrementModel& model,
                                       const SurplusGrid& grid, double tol) {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "policy_iteration: tol must be > 0");
    require_solvable(model, params, grid);
    const auto t0 = std::chrono::steady_clock::now();
    const double eval_tol = tol / 10.0;
    const std::size_t max_outer = default_max_iterations(model, params, tol);

    PolicyIterationResult out;
    PolicyFn alpha = PolicyFn::pay_all(grid);
    ValueFn j = policy_evaluation(alpha, params, model, eval_tol);
    out.value_history.push_back(j.bounded);

    for (std::size_t k = 1; k <= max_outer; ++k) {
        PolicyFn delta = policy_improvement_step(alpha, j, params, model);
        const bool same_rule = delta.actions == alpha.actions;
        ValueFn j_next = same_rule ? j : policy_evaluation(delta, params, model, eval_tol);
        const double gap = sup_diff(j_next.bounded, j.bounded);
        out.value_gaps.push_back(gap);
        out.value_history.push_back(j_next.bounded);
        alpha = std::move(delta);
        j = std::move(j_next);
        out.report.iterations = k;
        out.report.final_residual = gap;
        out.report.residual_history.push_back(gap);
        if (same_rule || gap <= tol) break;
        if (k == max_outer)
            throw MaxIterExceeded("policy_iteration: no convergence within iteration budget",
                                  out.report);
    }

    out.report.certified_error = out.report.final_residual * params.beta / (1.0 - params.beta);
    out.report.xi_estimate = extract_xi(alpha, 0.5 * grid.step);
    out.report.tail_extension_error = params.beta * std::abs(bbar(model, params) - j.bounded.back());
    out.report.wall_time_seconds = seconds_since(t0);
    out.policy = std::move(alpha);
    out.value = std::move(j);
    return out;
}

}  // namespace riskdiv
