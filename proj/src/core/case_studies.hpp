#pragma once

#include <span>
#include <string>
#include <vector>

#include "core/entropic.hpp"
#include "core/grid.hpp"

namespace riskdiv {

enum class ExpRegime {
    PayAll,                    // gamma/(beta*lambda) >= 1
    InteriorBarrierExpected,   // ratio < 1; the h'(0+) sign decides at solve time
    BoundaryCase,              // reserved for the deferred sign test; never returned here
};

/// Regime of the left-sided exponential case: pay-all whenever
/// gamma/(beta*lambda) >= 1 (boundary included).
ExpRegime exp_case_regime(double lambda, double d, const RiskParams& params);

/// Value at an interior barrier p: J(p) = [d + (1/gamma) ln(1 - gamma/(beta*lambda))]
/// / (1/beta - 1); the gamma -> 0 limit substitutes -1/(beta*lambda) for the
/// log term. Throws RegimeViolation when gamma/(beta*lambda) >= 1.
double exp_barrier_value_closed_form(double lambda, double d, const RiskParams& params);

/// J_2(x) = x + beta * rho(Z^+); expectation at gamma = 0.
double two_stage_closed_form(double x, const RiskParams& params, const IncrementModel& model);

/// Stage-one objective of the three-stage problem after the u = x - a
/// substitution, evaluated from the model's closed forms.
double three_stage_h(double u, const RiskParams& params, const IncrementModel& model);

/// Analytic derivative of three_stage_h (the risk-neutral form at gamma = 0).
double three_stage_h_prime(double u, const RiskParams& params, const IncrementModel& model);

/// Global maximiser of three_stage_h on [0, xi_star]: coarse scan plus
/// golden-section refinement to 1e-8; returns 0 when the maximum sits at u=0.
double three_stage_barrier(const RiskParams& params, const IncrementModel& model);

struct BarrierCurvePoint {
    double gamma;
    double barrier;
    std::string note;  // empty on success, error text otherwise
};

struct BarrierCurve {
    std::vector<BarrierCurvePoint> points;
    std::string model_descriptor;
    double beta = 0.0;
};

enum class CurveMode { ThreeStage, InfiniteHorizon };

/// Barrier as a function of gamma; per-point failures become NaN rows with a
/// note instead of aborting the curve. InfiniteHorizon mode solves on the
/// given grid (auto-sized per gamma when n_nodes = 0 in `grid`).
BarrierCurve barrier_curve(const IncrementModel& model, std::span<const double> gammas,
                           double beta, CurveMode mode, double tol = 1e-6,
                           const SurplusGrid* grid = nullptr);

/// Log-uniform gamma samples on [1e-3, gamma_max] with gamma = 0 prepended.
std::vector<double> default_gamma_grid(double gamma_max = 10.0, std::size_t count = 30,
                                       bool include_zero = true);

}  // namespace riskdiv
