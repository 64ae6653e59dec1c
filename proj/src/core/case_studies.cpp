#include "core/case_studies.hpp"

#include <algorithm>
#include <cmath>

#include "core/numerics.hpp"
#include "core/policy_structure.hpp"
#include "core/solvers.hpp"

namespace riskdiv {

ExpRegime exp_case_regime(double lambda, double d, const RiskParams& params) {
    if (!(lambda * d > 1.0))
        throw Error(ErrorCode::ModelInvalid, "exp_case_regime: requires lambda*d > 1");
    const double ratio = params.gamma / (params.beta * lambda);
    return ratio >= 1.0 ? ExpRegime::PayAll : ExpRegime::InteriorBarrierExpected;
}

double exp_barrier_value_closed_form(double lambda, double d, const RiskParams& params) {
    const double ratio = params.gamma / (params.beta * lambda);
    if (ratio >= 1.0)
        throw Error(ErrorCode::RegimeViolation,
                    "exp_barrier_value_closed_form: needs gamma/(beta*lambda) < 1");
    const double log_term = params.gamma == 0.0 ? -1.0 / (params.beta * lambda)
                                                : std::log1p(-ratio) / params.gamma;
    return (d + log_term) / (1.0 / params.beta - 1.0);
}

double two_stage_closed_form(double x, const RiskParams& params, const IncrementModel& model) {
    if (!(x >= 0.0)) throw Error(ErrorCode::InvalidArgument, "two_stage_closed_form: x must be >= 0");
    return x + params.beta * model.entropic_premium_positive_part(params.gamma);
}

double three_stage_h(double u, const RiskParams& params, const IncrementModel& model) {
    const double beta = params.beta;
    const double gamma = params.gamma;
    if (gamma == 0.0) {
        const double mean_pos = model.mean_positive_part();
        const double survive = 1.0 - model.cdf(-u);
        return -u + beta * ((u + beta * mean_pos) * survive + model.partial_mean(-u));
    }
    const double rho = model.entropic_premium_positive_part(gamma);
    const double ln_a = -gamma * (u + beta * rho) + model.log_exp_tail_integral(gamma, -u);
    const double ln_ruin = model.log_cdf(-u);
    return -u - (beta / gamma) * log_add_exp(ln_a, ln_ruin);
}

double three_stage_h_prime(double u, const RiskParams& params, const IncrementModel& model) {
    const double beta = params.beta;
    const double gamma = params.gamma;
    const double g_at = model.pdf(-u);
    if (gamma == 0.0) {
        return -1.0 + beta * (1.0 - model.cdf(-u)) +
               beta * beta * model.mean_positive_part() * g_at;
    }
    const double rho = model.entropic_premium_positive_part(gamma);
    const double ln_a = -gamma * (u + beta * rho) + model.log_exp_tail_integral(gamma, -u);
    const double ln_ruin = model.log_cdf(-u);
    const double m = std::max(ln_a, ln_ruin);
    const double a_scaled = std::exp(ln_a - m);
    const double ruin_scaled = std::exp(ln_ruin - m);
    const double c = -std::expm1(-gamma * beta * rho) / gamma;  // (1 - e^{-gamma beta rho})/gamma
    const double g_scaled = g_at > 0.0 ? std::exp(std::log(g_at) - m) : 0.0;
    return -1.0 + beta * (a_scaled + c * g_scaled) / (a_scaled + ruin_scaled);
}

double three_stage_barrier(const RiskParams& params, const IncrementModel& model) {
    const double cap = xi_star(model, params);
    if (!(cap > 0.0)) return 0.0;
    const double target_spacing = 0.05;
    const std::size_t m =
        std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(cap / target_spacing)), 64,
                                2'000'000);
    const double du = cap / static_cast<double>(m);

    std::size_t best = 0;
    double best_h = three_stage_h(0.0, params, model);
    for (std::size_t k = 1; k <= m; ++k) {
        const double hk = three_stage_h(du * static_cast<double>(k), params, model);
        if (hk > best_h) {
            best_h = hk;
            best = k;
        }
    }
    const double lo = best == 0 ? 0.0 : du * static_cast<double>(best - 1);
    const double hi = best == m ? cap : du * static_cast<double>(best + 1);
    const double q = golden_section_max(
        [&](double u) { return three_stage_h(u, params, model); }, lo, hi, 1e-8);
    if (three_stage_h(0.0, params, model) >= three_stage_h(q, params, model)) return 0.0;
    return q < 1e-7 ? 0.0 : q;
}

BarrierCurve barrier_curve(const IncrementModel& model, std::span<const double> gammas,
                           double beta, CurveMode mode, double tol, const SurplusGrid* grid) {
    for (std::size_t i = 0; i + 1 < gammas.size(); ++i)
        if (!(gammas[i] < gammas[i + 1]))
            throw Error(ErrorCode::InvalidArgument, "barrier_curve: gammas must be strictly increasing");

    BarrierCurve curve;
    curve.model_descriptor = model.describe();
    curve.beta = beta;
    for (double g : gammas) {
        BarrierCurvePoint pt{g, std::numeric_limits<double>::quiet_NaN(), ""};
        try {
            const RiskParams params(beta, g);
            if (mode == CurveMode::ThreeStage) {
                pt.barrier = three_stage_barrier(params, model);
            } else {
                const SurplusGrid gr = grid ? *grid : auto_grid(model, params);
                const auto sol = infinite_horizon_solve(params, model, gr, tol);
                pt.barrier = extract_xi(sol.policy, 0.5 * gr.step);
            }
        } catch (const std::exception& e) {
            pt.note = e.what();
        }
        curve.points.push_back(std::move(pt));
    }
    return curve;
}

std::vector<double> default_gamma_grid(double gamma_max, std::size_t count, bool include_zero) {
    std::vector<double> out;
    if (include_zero) out.push_back(0.0);
    const double lo = std::log(1e-3);
    const double hi = std::log(gamma_max);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = count == 1 ? 1.0 : static_cast<double>(i) / static_cast<double>(count - 1);
        out.push_back(std::exp(lo + t * (hi - lo)));
    }
    return out;
}

}  // namespace riskdiv
