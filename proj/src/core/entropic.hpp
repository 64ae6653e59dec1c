#pragma once

#include <span>
#include <vector>

#include "core/grid.hpp"
#include "core/increment_model.hpp"

namespace riskdiv {

/// Discount factor and risk-aversion coefficient. gamma = 0 selects the exact
/// risk-neutral expectation branch instead of a small-gamma limit.
struct RiskParams {
    double beta;
    double gamma;

    RiskParams(double beta_, double gamma_) : beta(beta_), gamma(gamma_) {
        if (!(beta > 0.0 && beta < 1.0))
            throw Error(ErrorCode::InvalidArgument, "RiskParams: beta must lie in (0,1)");
        if (!(gamma >= 0.0))
            throw Error(ErrorCode::InvalidArgument, "RiskParams: gamma must be >= 0");
    }
};

/// Universal bound on the bounded part of any attainable value:
/// bbar = beta * E[Z^+] / (1 - beta).
double bbar(const IncrementModel& model, const RiskParams& params);

/// A-priori cap on the no-payout threshold: xi_star = bbar / (1 - beta).
double xi_star(const IncrementModel& model, const RiskParams& params);

/// Entropic certainty equivalent of a discrete distribution,
/// -(1/gamma) ln sum w_i e^{-gamma v_i}, computed with min-shift so that
/// gamma * max|v| up to ~700 stays finite. gamma = 0 returns the mean.
/// Weights must be nonnegative and sum to 1 within 1e-12.
double certainty_equivalent(std::span<const double> values, std::span<const double> weights,
                            double gamma);

/// ln R(v, u) where R(v,u) = integral_0^inf e^{-gamma v(w)} g(w - u) dw
///                          + e^{-gamma ruin_value} G(-u),
/// with v linearly interpolated between grid nodes and extended beyond the
/// grid by a constant bounded part. Requires gamma > 0 and 0 <= u <= x_max.
double log_risk_integral(const ValueFn& v, double u, const IncrementModel& model, double gamma,
                         double ruin_value = 0.0);

/// R(v, u) itself (in (0, 1] whenever v >= 0 and ruin_value >= 0).
double risk_integral(const ValueFn& v, double u, const IncrementModel& model, double gamma,
                     double ruin_value = 0.0);

/// Risk-neutral branch: E[v(u + Z); Z >= -u] + ruin_value * G(-u).
double expected_continuation(const ValueFn& v, double u, const IncrementModel& model,
                             double ruin_value = 0.0);

/// Gamma(v)(u): -(beta/gamma) ln R(v,u) for gamma > 0, the discounted
/// expectation branch for gamma = 0.
double gamma_transform(const ValueFn& v, double u, const RiskParams& params,
                       const IncrementModel& model, double ruin_value = 0.0);

/// Gamma(v)(u_i) for every grid node u_i in one O(n) pass (exponential-branch
/// densities use running prefix/suffix integrals; tabulated densities are
/// integrated per node over their bounded support).
std::vector<double> continuation_profile(const ValueFn& v, const RiskParams& params,
                                         const IncrementModel& model, double ruin_value = 0.0);

}  // namespace riskdiv
