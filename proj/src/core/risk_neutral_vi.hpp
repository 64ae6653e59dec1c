#pragma once

#include "core/grid.hpp"
#include "core/increment_model.hpp"
#include "core/solvers.hpp"

namespace riskdiv {

/// Independently coded risk-neutral comparator. Solves
///   W(x) = sup_{a in [0,x]} { a + beta * integral_{a-x}^inf W(x-a+z) nu(dz) }
/// to its fixed point with windowed Gauss-Legendre quadrature in z-space; no
/// code is shared with the entropic integral kernel.
ValueFn risk_neutral_vi(const IncrementModel& model, double beta, const SurplusGrid& grid,
                        double tol, SolveReport* report = nullptr);

/// No-payout threshold of the greedy rule extracted from the risk-neutral
/// fixed point (largest node whose greedy action is below step/2).
double risk_neutral_xi(const IncrementModel& model, double beta, const SurplusGrid& grid,
                       double tol);

}  // namespace riskdiv
