#pragma once

#include <optional>
#include <vector>

#include "core/dp_operators.hpp"

namespace riskdiv {

struct SolveReport {
    std::size_t iterations = 0;
    double final_residual = 0.0;
    double certified_error = 0.0;  // final_residual * beta / (1 - beta)
    double xi_estimate = 0.0;
    double tail_extension_error = 0.0;  // beta * |bbar - b(x_max)|
    double wall_time_seconds = 0.0;
    std::vector<double> residual_history;
};

struct MaxIterExceeded : Error {
    MaxIterExceeded(const std::string& what, SolveReport partial_)
        : Error(ErrorCode::MaxIterExceeded, what), partial(std::move(partial_)) {}
    SolveReport partial;
};

struct FiniteHorizonResult {
    std::vector<ValueFn> values;     // J_1 .. J_N
    std::vector<PolicyFn> policies;  // time-indexed alpha*_1 .. alpha*_N
};

struct InfiniteHorizonResult {
    ValueFn value;
    PolicyFn policy;
    SolveReport report;
};

struct PolicyIterationResult {
    PolicyFn policy;
    ValueFn value;
    SolveReport report;
    std::vector<double> value_gaps;          // sup-norm gap per improvement
    std::vector<std::vector<double>> value_history;  // bounded parts of J_{delta_k}
};

/// Throws ModelInvalid / GridTooShort unless the model passes A1-A3 and the
/// grid reaches xi_star + 5 steps.
void require_solvable(const IncrementModel& model, const RiskParams& params,
                      const SurplusGrid& grid);

/// Grid with step = bbar/2000 and x_max = xi_star + 10 steps.
SurplusGrid auto_grid(const IncrementModel& model, const RiskParams& params);

std::size_t default_max_iterations(const IncrementModel& model, const RiskParams& params,
                                   double tol);

/// J_1 = id (pay everything), J_{n+1} = T J_n; policies are time-indexed.
FiniteHorizonResult finite_horizon_solve(std::size_t horizon, const RiskParams& params,
                                         const IncrementModel& model, const SurplusGrid& grid);

/// Iterates the bounded part b <- U b from b = 0 (or a warm start) until
/// ||b_{k+1} - b_k|| <= tol (1-beta)/beta, certifying ||b - b*|| <= tol.
InfiniteHorizonResult infinite_horizon_solve(const RiskParams& params, const IncrementModel& model,
                                             const SurplusGrid& grid, double tol,
                                             const std::optional<std::vector<double>>& warm_start = {});

/// Fixed point of L_alpha via contraction iteration (modulus beta).
ValueFn policy_evaluation(const PolicyFn& alpha, const RiskParams& params,
                          const IncrementModel& model, double tol, SolveReport* report = nullptr);

/// Largest maximiser delta of a -> a + Gamma_alpha(x - a); checks the
/// preconditions J_alpha >= id and alpha(x) >= x - xi_star above xi_star.
PolicyFn policy_improvement_step(const PolicyFn& alpha, const ValueFn& j_alpha,
                                 const RiskParams& params, const IncrementModel& model);

/// Alternates evaluation and improvement from alpha(x) = x; stops when the
/// improvement returns the same rule or the value gap drops below tol.
PolicyIterationResult policy_iteration(const RiskParams& params, const IncrementModel& model,
                                       const SurplusGrid& grid, double tol);

}  // namespace riskdiv
