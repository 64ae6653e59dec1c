#pragma once

#include <span>
#include <utility>
#include <vector>

#include "core/entropic.hpp"
#include "core/grid.hpp"

namespace riskdiv {

/// One-variable profile of the Bellman supremum after the substitution
/// u = x - a: h(u) = -u + Gamma(v)(u). The supremum at x_i is the running
/// maximum of h over u-nodes <= i; the reported maximiser is the smallest
/// u (largest dividend) attaining it within the tie tolerance.
struct HProfile {
    SurplusGrid grid;
    std::vector<double> h;
    std::vector<double> prefix_max;
    std::vector<std::size_t> argmax_index;
};

/// Relative tie tolerance for the argmax selection.
inline constexpr double kTieRelTol = 1e-10;

struct PrefixScan {
    std::vector<double> prefix_max;
    std::vector<std::size_t> argmax;
};

/// Running maximum with largest-dividend tie rule: argmax[i] is the smallest
/// j <= i with h[j] >= prefix_max[i] - tie_tol*(1+|prefix_max[i]|).
PrefixScan prefix_max_scan(std::span<const double> h, double tie_rel_tol = kTieRelTol);

HProfile build_h_profile(const ValueFn& v, const RiskParams& params, const IncrementModel& model);

/// Bellman operator: (Tv)(x_i) = x_i + prefix_max_i, together with the
/// largest-maximiser policy a_i = x_i - u*_i.
std::pair<ValueFn, PolicyFn> bellman_T(const ValueFn& v, const RiskParams& params,
                                       const IncrementModel& model);

/// Action of T on bounded parts: (Ub)(x_i) = prefix_max of h built from
/// v = id + b. A beta-contraction in the sup norm.
std::vector<double> operator_U(std::span<const double> bounded, const SurplusGrid& grid,
                               const RiskParams& params, const IncrementModel& model);

/// One-policy operator: (L_alpha v)(x_i) = a_i + Gamma(v)(x_i - a_i).
ValueFn operator_L(const ValueFn& v, const PolicyFn& alpha, const RiskParams& params,
                   const IncrementModel& model);

}  // namespace riskdiv
