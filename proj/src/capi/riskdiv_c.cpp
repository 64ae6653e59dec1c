#include "riskdiv.h"

#include <cstring>
#include <string>

#include "core/case_studies.hpp"
#include "core/monte_carlo.hpp"
#include "core/policy_structure.hpp"
#include "core/risk_neutral_vi.hpp"
#include "core/solvers.hpp"

using namespace riskdiv;

struct rd_model {
    IncrementModel impl;
};

struct rd_solution {
    ValueFn value;
    PolicyFn policy;
    SolveReport report;
    std::vector<double> gaps;
};

struct rd_finite {
    FiniteHorizonResult impl;
};

struct rd_bands {
    BandPolicy impl;
};

namespace {

thread_local std::string g_last_error;

rd_status status_of(const Error& e) {
    switch (e.code()) {
        case ErrorCode::InvalidArgument: return RD_ERR_INVALID_ARGUMENT;
        case ErrorCode::ModelInvalid: return RD_ERR_MODEL_INVALID;
        case ErrorCode::EmptySupport: return RD_ERR_EMPTY_SUPPORT;
        case ErrorCode::GridTooShort: return RD_ERR_GRID_TOO_SHORT;
        case ErrorCode::MaxIterExceeded: return RD_ERR_MAX_ITER;
        case ErrorCode::NotBandStructured: return RD_ERR_NOT_BAND_STRUCTURED;
        case ErrorCode::PreconditionViolated: return RD_ERR_PRECONDITION;
        case ErrorCode::RegimeViolation: return RD_ERR_REGIME;
    }
    return RD_ERR_INTERNAL;
}

template <typename Fn>
rd_status guarded(Fn&& fn) {
    try {
        fn();
        return RD_OK;
    } catch (const Error& e) {
        g_last_error = e.what();
        return status_of(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return RD_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return RD_ERR_INTERNAL;
    }
}

}  // namespace

extern "C" {

const char* rd_status_name(rd_status s) {
    switch (s) {
        case RD_OK: return "ok";
        case RD_ERR_INVALID_ARGUMENT: return "invalid argument";
        case RD_ERR_MODEL_INVALID: return "model invalid";
        case RD_ERR_EMPTY_SUPPORT: return "empty support";
        case RD_ERR_GRID_TOO_SHORT: return "grid too short";
        case RD_ERR_MAX_ITER: return "iteration budget exceeded";
        case RD_ERR_NOT_BAND_STRUCTURED: return "policy is not band structured";
        case RD_ERR_PRECONDITION: return "precondition violated";
        case RD_ERR_REGIME: return "regime violation";
        case RD_ERR_INTERNAL: return "internal error";
    }
    return "unknown";
}

const char* rd_last_error(void) { return g_last_error.c_str(); }

void rd_version(int* major, int* minor, int* patch) {
    if (major) *major = 1;
    if (minor) *minor = 0;
    if (patch) *patch = 0;
}

rd_status rd_model_create_left_exponential(double lambda, double d, rd_model** out) {
    return guarded([&] { *out = new rd_model{IncrementModel::left_exponential(lambda, d)}; });
}

rd_status rd_model_create_double_exponential(double mu, rd_model** out) {
    return guarded([&] { *out = new rd_model{IncrementModel::double_exponential(mu)}; });
}

rd_status rd_model_create_tabulated(const double* nodes, const double* densities, size_t n,
                                    rd_model** out) {
    return guarded([&] {
        *out = new rd_model{IncrementModel::tabulated(std::vector<double>(nodes, nodes + n),
                                                      std::vector<double>(densities, densities + n))};
    });
}

void rd_model_destroy(rd_model* model) { delete model; }

double rd_model_pdf(const rd_model* model, double z) { return model->impl.pdf(z); }
double rd_model_cdf(const rd_model* model, double z) { return model->impl.cdf(z); }
double rd_model_mean_positive_part(const rd_model* model) {
    return model->impl.mean_positive_part();
}

rd_status rd_model_entropic_premium(const rd_model* model, double gamma, double* out) {
    return guarded([&] { *out = model->impl.entropic_premium_positive_part(gamma); });
}

int rd_model_validate(const rd_model* model, int* codes, int cap) {
    const auto violations = model->impl.validate_assumptions();
    int written = 0;
    for (const auto v : violations) {
        if (codes && written < cap)
            codes[written] = v == Violation::ShiftRateViolation ? RD_VIOLATION_SHIFT_RATE
                                                                : RD_VIOLATION_RUIN_IMPOSSIBLE;
        ++written;
    }
    return written;
}

const char* rd_violation_describe(int code) {
    switch (code) {
        case RD_VIOLATION_SHIFT_RATE: return "ShiftRateViolation";
        case RD_VIOLATION_RUIN_IMPOSSIBLE: return "RuinImpossible";
    }
    return "UnknownViolation";
}

int rd_model_has_boundary_density_jump(const rd_model* model) {
    return model->impl.has_boundary_density_jump() ? 1 : 0;
}

rd_status rd_bbar(const rd_model* model, double beta, double* out) {
    return guarded([&] { *out = bbar(model->impl, RiskParams(beta, 0.0)); });
}

rd_status rd_xi_star(const rd_model* model, double beta, double* out) {
    return guarded([&] { *out = xi_star(model->impl, RiskParams(beta, 0.0)); });
}

rd_status rd_auto_grid(const rd_model* model, double beta, double* step, size_t* n_nodes) {
    return guarded([&] {
        const SurplusGrid g = auto_grid(model->impl, RiskParams(beta, 0.0));
        *step = g.step;
        *n_nodes = g.n_nodes;
    });
}

rd_status rd_solve_infinite(const rd_model* model, double beta, double gamma, double step,
                            size_t n_nodes, double tol, rd_solution** out) {
    return guarded([&] {
        auto r = infinite_horizon_solve(RiskParams(beta, gamma), model->impl,
                                        SurplusGrid(step, n_nodes), tol);
        *out = new rd_solution{std::move(r.value), std::move(r.policy), std::move(r.report), {}};
    });
}

rd_status rd_solve_policy_iteration(const rd_model* model, double beta, double gamma, double step,
                                    size_t n_nodes, double tol, rd_solution** out) {
    return guarded([&] {
        auto r = policy_iteration(RiskParams(beta, gamma), model->impl, SurplusGrid(step, n_nodes),
                                  tol);
        *out = new rd_solution{std::move(r.value), std::move(r.policy), std::move(r.report),
                               std::move(r.value_gaps)};
    });
}

void rd_solution_destroy(rd_solution* s) { delete s; }

size_t rd_solution_size(const rd_solution* s) { return s->value.grid.n_nodes; }
double rd_solution_step(const rd_solution* s) { return s->value.grid.step; }

void rd_solution_values(const rd_solution* s, double* buf) {
    for (std::size_t i = 0; i < s->value.grid.n_nodes; ++i) buf[i] = s->value.value_at(i);
}

void rd_solution_actions(const rd_solution* s, double* buf) {
    std::memcpy(buf, s->policy.actions.data(), s->policy.actions.size() * sizeof(double));
}

void rd_solution_report(const rd_solution* s, rd_solve_report* out) {
    out->iterations = s->report.iterations;
    out->final_residual = s->report.final_residual;
    out->certified_error = s->report.certified_error;
    out->xi_estimate = s->report.xi_estimate;
    out->tail_extension_error = s->report.tail_extension_error;
    out->wall_time_seconds = s->report.wall_time_seconds;
}

size_t rd_solution_gap_count(const rd_solution* s) { return s->gaps.size(); }

void rd_solution_gaps(const rd_solution* s, double* buf) {
    std::memcpy(buf, s->gaps.data(), s->gaps.size() * sizeof(double));
}

rd_status rd_solve_finite(const rd_model* model, double beta, double gamma, double step,
                          size_t n_nodes, unsigned horizon, rd_finite** out) {
    return guarded([&] {
        *out = new rd_finite{finite_horizon_solve(horizon, RiskParams(beta, gamma), model->impl,
                                                  SurplusGrid(step, n_nodes))};
    });
}

void rd_finite_destroy(rd_finite* f) { delete f; }

size_t rd_finite_size(const rd_finite* f) { return f->impl.values.front().grid.n_nodes; }
unsigned rd_finite_horizon(const rd_finite* f) {
    return static_cast<unsigned>(f->impl.values.size());
}

rd_status rd_finite_values(const rd_finite* f, unsigned n, double* buf) {
    return guarded([&] {
        if (n < 1 || n > f->impl.values.size())
            throw Error(ErrorCode::InvalidArgument, "rd_finite_values: stage out of range");
        const ValueFn& v = f->impl.values[n - 1];
        for (std::size_t i = 0; i < v.grid.n_nodes; ++i) buf[i] = v.value_at(i);
    });
}

rd_status rd_finite_value_at(const rd_finite* f, unsigned n, double x, double* out) {
    return guarded([&] {
        if (n < 1 || n > f->impl.values.size())
            throw Error(ErrorCode::InvalidArgument, "rd_finite_value_at: stage out of range");
        *out = f->impl.values[n - 1].value(x);
    });
}

rd_status rd_finite_actions(const rd_finite* f, unsigned t, double* buf) {
    return guarded([&] {
        if (t < 1 || t > f->impl.policies.size())
            throw Error(ErrorCode::InvalidArgument, "rd_finite_actions: epoch out of range");
        const PolicyFn& p = f->impl.policies[t - 1];
        std::memcpy(buf, p.actions.data(), p.actions.size() * sizeof(double));
    });
}

rd_status rd_bands_extract(const double* actions, size_t n, double step, double eps_zero,
                           rd_bands** out) {
    return guarded([&] {
        PolicyFn p(SurplusGrid(step, n), std::vector<double>(actions, actions + n));
        const double eps = eps_zero > 0.0 ? eps_zero : 0.5 * step;
        *out = new rd_bands{extract_bands(p, eps)};
    });
}

void rd_bands_destroy(rd_bands* b) { delete b; }

size_t rd_bands_count(const rd_bands* b) { return b->impl.retentions.size(); }

void rd_bands_levels(const rd_bands* b, double* c, double* d) {
    for (std::size_t k = 0; k < b->impl.retentions.size(); ++k) c[k] = b->impl.retentions[k];
    if (d)
        for (std::size_t k = 0; k < b->impl.triggers.size(); ++k) d[k] = b->impl.triggers[k];
}

int rd_bands_classify(const rd_bands* b) {
    switch (classify(b->impl)) {
        case PolicyClass::PayAll: return RD_POLICY_PAY_ALL;
        case PolicyClass::Barrier: return RD_POLICY_BARRIER;
        case PolicyClass::FiniteBand: return RD_POLICY_FINITE_BAND;
    }
    return RD_POLICY_FINITE_BAND;
}

double rd_bands_xi(const rd_bands* b) { return b->impl.xi(); }
double rd_bands_action(const rd_bands* b, double x) { return b->impl.action(x); }

double rd_policy_xi(const double* actions, size_t n, double step, double eps_zero) {
    PolicyFn p(SurplusGrid(step, n), std::vector<double>(actions, actions + n));
    return extract_xi(p, eps_zero > 0.0 ? eps_zero : 0.5 * step);
}

rd_status rd_exp_case_regime(double lambda, double d, double beta, double gamma, int* out) {
    return guarded([&] {
        const ExpRegime r = exp_case_regime(lambda, d, RiskParams(beta, gamma));
        *out = r == ExpRegime::PayAll ? RD_REGIME_PAY_ALL : RD_REGIME_INTERIOR_BARRIER;
    });
}

rd_status rd_exp_barrier_value(double lambda, double d, double beta, double gamma, double* out) {
    return guarded([&] { *out = exp_barrier_value_closed_form(lambda, d, RiskParams(beta, gamma)); });
}

rd_status rd_two_stage_value(const rd_model* model, double beta, double gamma, double x,
                             double* out) {
    return guarded([&] { *out = two_stage_closed_form(x, RiskParams(beta, gamma), model->impl); });
}

rd_status rd_three_stage_barrier(const rd_model* model, double beta, double gamma, double* out) {
    return guarded([&] { *out = three_stage_barrier(RiskParams(beta, gamma), model->impl); });
}

rd_status rd_nested_mc(const rd_finite* f, const rd_model* model, double beta, double gamma,
                       double x, uint64_t outer_samples, uint64_t inner_samples, uint64_t seed,
                       double* estimate, double* stderr_proxy) {
    return guarded([&] {
        McConfig cfg;
        cfg.outer_samples = outer_samples;
        cfg.inner_samples = inner_samples;
        cfg.seed = seed;
        cfg.horizon = f->impl.policies.size();
        const McEstimate e =
            nested_mc_evaluate(x, f->impl.policies, RiskParams(beta, gamma), model->impl, cfg);
        *estimate = e.estimate;
        *stderr_proxy = e.stderr_proxy;
    });
}

rd_status rd_risk_neutral_values(const rd_model* model, double beta, double step, size_t n_nodes,
                                 double tol, double* buf) {
    return guarded([&] {
        const ValueFn v = risk_neutral_vi(model->impl, beta, SurplusGrid(step, n_nodes), tol);
        for (std::size_t i = 0; i < v.grid.n_nodes; ++i) buf[i] = v.value_at(i);
    });
}

rd_status rd_risk_neutral_xi(const rd_model* model, double beta, double step, size_t n_nodes,
                             double tol, double* out) {
    return guarded([&] {
        *out = risk_neutral_xi(model->impl, beta, SurplusGrid(step, n_nodes), tol);
    });
}

}  // extern "C"
