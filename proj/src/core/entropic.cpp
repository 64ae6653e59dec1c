#include "core/entropic.hpp"

#include <algorithm>
#include <cmath>

#include "core/numerics.hpp"

namespace riskdiv {

namespace {

// Piecewise-linear geometry of v(w) = w + b(w) on the grid, with the constant
// bounded-part extension v(w) = w + b(x_max) beyond the last node.
struct Geometry {
    const SurplusGrid& grid;
    std::span<const double> b;

    double delta() const { return grid.step; }
    double x_max() const { return grid.x_max(); }
    double b_last() const { return b[grid.n_nodes - 1]; }
    double v0(std::size_t j) const { return grid.x(j) + b[j]; }
    double slope(std::size_t j) const { return 1.0 + (b[j + 1] - b[j]) / grid.step; }
    double v_at(std::size_t j, double w) const { return v0(j) + slope(j) * (w - grid.x(j)); }
};

// ln of integral over [w0, w0+width] (inside cell j) of e^{-gamma v(w)} e^{B w} dw.
double log_cell(const Geometry& g, std::size_t j, double w0, double width, double gamma, double B) {
    if (!(width > 0.0)) return kNegInf;
    const double s = g.slope(j);
    return -gamma * g.v_at(j, w0) + B * w0 + std::log(width) + ln_e1((B - gamma * s) * width);
}

// Same beyond the grid where v has slope one.
double log_tail_cell(const Geometry& g, double t0, double width, double gamma, double B) {
    if (!(width > 0.0)) return kNegInf;
    return -gamma * (t0 + g.b_last()) + B * t0 + std::log(width) + ln_e1((B - gamma) * width);
}

// ln of integral over [t0, inf) of e^{-gamma v(w)} e^{B w} dw; needs B < gamma.
double log_tail_infinite(const Geometry& g, double t0, double gamma, double B) {
    return -gamma * g.b_last() + (B - gamma) * t0 - std::log(gamma - B);
}

// Expectation-branch analogues: ln of integral of v(w) e^{B w} dw.
double log_cell_mean(const Geometry& g, std::size_t j, double w0, double width, double B) {
    if (!(width > 0.0)) return kNegInf;
    const double s = g.slope(j);
    const double v = g.v_at(j, w0);
    const double bracket = v * width * e1(B * width) + s * width * width * e2(B * width);
    if (!(bracket > 0.0)) return kNegInf;
    return B * w0 + std::log(bracket);
}

double log_tail_cell_mean(const Geometry& g, double t0, double width, double B) {
    if (!(width > 0.0)) return kNegInf;
    const double v = t0 + g.b_last();
    const double bracket = v * width * e1(B * width) + width * width * e2(B * width);
    if (!(bracket > 0.0)) return kNegInf;
    return B * t0 + std::log(bracket);
}

double log_tail_infinite_mean(const Geometry& g, double t0, double B) {
    // integral_{t0}^inf (w + b_last) e^{B w} dw for B < 0
    const double bracket = (t0 + g.b_last()) / (-B) + 1.0 / (B * B);
    if (!(bracket > 0.0)) return kNegInf;
    return B * t0 + std::log(bracket);
}

// ln integral_0^{min(t, inf)} of the phi-weighted lower branch with rate B > 0,
// walking whole cells then the partial piece (and the beyond-grid extension).
// lnS[j] must hold ln integral_0^{x_j}.
double lower_from_prefix(const Geometry& g, std::span<const double> lnS, double t, double gamma,
                         double B, bool mean) {
    const std::size_t n = g.grid.n_nodes;
    if (!(t > 0.0)) return kNegInf;
    if (t >= g.x_max()) {
        const double tail = mean ? log_tail_cell_mean(g, g.x_max(), t - g.x_max(), B)
                                 : log_tail_cell(g, g.x_max(), t - g.x_max(), gamma, B);
        return log_add_exp(lnS[n - 1], tail);
    }
    std::size_t k = static_cast<std::size_t>(t / g.delta());
    if (k > n - 2) k = n - 2;
    const double r = t - g.grid.x(k);
    const double part = mean ? log_cell_mean(g, k, g.grid.x(k), r, B)
                             : log_cell(g, k, g.grid.x(k), r, gamma, B);
    return log_add_exp(lnS[k], part);
}

std::vector<double> prefix_logsums(const Geometry& g, double gamma, double B, bool mean) {
    const std::size_t n = g.grid.n_nodes;
    std::vector<double> lnS(n, kNegInf);
    for (std::size_t j = 1; j < n; ++j) {
        const double cell = mean ? log_cell_mean(g, j - 1, g.grid.x(j - 1), g.delta(), B)
                                 : log_cell(g, j - 1, g.grid.x(j - 1), g.delta(), gamma, B);
        lnS[j] = log_add_exp(lnS[j - 1], cell);
    }
    return lnS;
}

std::vector<double> suffix_logsums(const Geometry& g, double gamma, double B, bool mean) {
    // lnQ[j] = ln integral_{x_j}^{inf}; only used with B < 0 (upper branch).
    const std::size_t n = g.grid.n_nodes;
    std::vector<double> lnQ(n, kNegInf);
    lnQ[n - 1] = mean ? log_tail_infinite_mean(g, g.x_max(), B)
                      : log_tail_infinite(g, g.x_max(), gamma, B);
    for (std::size_t j = n - 1; j-- > 0;) {
        const double cell = mean ? log_cell_mean(g, j, g.grid.x(j), g.delta(), B)
                                 : log_cell(g, j, g.grid.x(j), g.delta(), gamma, B);
        lnQ[j] = log_add_exp(lnQ[j + 1], cell);
    }
    return lnQ;
}

double upper_from_suffix(const Geometry& g, std::span<const double> lnQ, double t, double gamma,
                         double B, bool mean) {
    const std::size_t n = g.grid.n_nodes;
    if (t <= 0.0) return lnQ[0];
    if (t >= g.x_max())
        return mean ? log_tail_infinite_mean(g, t, B) : log_tail_infinite(g, t, gamma, B);
    std::size_t k = static_cast<std::size_t>(t / g.delta());
    if (k > n - 2) k = n - 2;
    const double part = mean ? log_cell_mean(g, k, t, g.grid.x(k + 1) - t, B)
                             : log_cell(g, k, t, g.grid.x(k + 1) - t, gamma, B);
    return log_add_exp(part, lnQ[k + 1]);
}

// Direct (no prefix arrays) version of the lower/upper branch integrals for a
// single u; shares the cell primitives with the profile path.
double lower_direct(const Geometry& g, double t, double gamma, double B, bool mean) {
    if (!(t > 0.0)) return kNegInf;
    const std::size_t n = g.grid.n_nodes;
    double acc = kNegInf;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double lo = g.grid.x(j);
        const double hi = std::min(g.grid.x(j + 1), t);
        if (hi <= lo) break;
        acc = log_add_exp(acc, mean ? log_cell_mean(g, j, lo, hi - lo, B)
                                    : log_cell(g, j, lo, hi - lo, gamma, B));
    }
    if (t > g.x_max())
        acc = log_add_exp(acc, mean ? log_tail_cell_mean(g, g.x_max(), t - g.x_max(), B)
                                    : log_tail_cell(g, g.x_max(), t - g.x_max(), gamma, B));
    return acc;
}

double upper_direct(const Geometry& g, double t, double gamma, double B, bool mean) {
    const std::size_t n = g.grid.n_nodes;
    const double start = std::max(t, 0.0);
    if (start >= g.x_max())
        return mean ? log_tail_infinite_mean(g, start, B) : log_tail_infinite(g, start, gamma, B);
    double acc = mean ? log_tail_infinite_mean(g, g.x_max(), B)
                      : log_tail_infinite(g, g.x_max(), gamma, B);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double lo = std::max(g.grid.x(j), start);
        const double hi = g.grid.x(j + 1);
        if (hi <= lo) continue;
        acc = log_add_exp(acc, mean ? log_cell_mean(g, j, lo, hi - lo, B)
                                    : log_cell(g, j, lo, hi - lo, gamma, B));
    }
    return acc;
}

// Tabulated densities: integrate phi against the piecewise-linear density over
// its bounded support, splitting at both the density nodes and the grid cells.
double tabulated_log_integral(const Geometry& g, const TabulatedDensity& tab, double u,
                              double gamma, bool mean) {
    double acc = kNegInf;
    const std::size_t n = g.grid.n_nodes;
    const double delta = g.delta();
    for (std::size_t k = 0; k + 1 < tab.nodes.size(); ++k) {
        const double seg_w = tab.nodes[k + 1] - tab.nodes[k];
        const double mseg = (tab.density[k + 1] - tab.density[k]) / seg_w;
        const double wlo_seg = u + tab.nodes[k];
        const double whi_seg = u + tab.nodes[k + 1];
        double w = std::max(0.0, wlo_seg);
        while (w < whi_seg - 1e-14 * (1.0 + std::abs(whi_seg))) {
            double hi = whi_seg;
            if (w < g.x_max()) {
                const double boundary = (std::floor(w / delta + 1e-9) + 1.0) * delta;
                hi = std::min(hi, std::max(boundary, w + 1e-12 * delta));
            }
            const double width = hi - w;
            const double mid = 0.5 * (w + hi);
            double v_at, s;
            if (mid < g.x_max()) {
                std::size_t j = static_cast<std::size_t>(mid / delta);
                if (j > n - 2) j = n - 2;
                v_at = g.v_at(j, w);
                s = g.slope(j);
            } else {
                v_at = w + g.b_last();
                s = 1.0;
            }
            const double g_at = tab.density[k] + mseg * (w - wlo_seg);
            double bracket;
            if (mean) {
                // integral of (v_at + s t)(g_at + mseg t) dt
                bracket = v_at * g_at * width + (v_at * mseg + s * g_at) * width * width / 2.0 +
                          s * mseg * width * width * width / 3.0;
                if (bracket > 0.0) acc = log_add_exp(acc, std::log(bracket));
            } else {
                const double r = -gamma * s;
                bracket = g_at * width * e1(r * width) + mseg * width * width * e2(r * width);
                if (bracket > 0.0) acc = log_add_exp(acc, -gamma * v_at + std::log(bracket));
            }
            w = hi;
        }
    }
    return acc;
}

void check_u(const ValueFn& v, double u) {
    if (!(u >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "risk integral: u must be >= 0");
    if (u > v.grid.x_max() * (1.0 + 1e-12) + 1e-12)
        throw Error(ErrorCode::GridTooShort, "risk integral: u beyond the grid's certified extension");
}

struct BranchLogs {
    double lower = kNegInf;  // ln integral over the non-ruin region
    double upper = kNegInf;
};

BranchLogs direct_branches(const Geometry& g, const IncrementModel& model, double u, double gamma,
                           bool mean) {
    BranchLogs out;
    if (const auto* le = std::get_if<LeftExponential>(&model.kind())) {
        const double t = u + le->shift;
        const double lnInt = lower_direct(g, t, gamma, le->lambda, mean);
        out.lower = std::log(le->lambda) - le->lambda * t + lnInt;
    } else if (const auto* de = std::get_if<DoubleExponential>(&model.kind())) {
        const double t = u + de->mu;
        const double lnLow = lower_direct(g, t, gamma, 1.0, mean);
        out.lower = std::log(0.5) - t + lnLow;
        const double lnUp = upper_direct(g, t, gamma, -1.0, mean);
        out.upper = std::log(0.5) + t + lnUp;
    } else {
        const auto& tab = std::get<TabulatedDensity>(model.kind());
        out.lower = tabulated_log_integral(g, tab, u, gamma, mean);
    }
    return out;
}

}  // namespace

double bbar(const IncrementModel& model, const RiskParams& params) {
    return params.beta * model.mean_positive_part() / (1.0 - params.beta);
}

double xi_star(const IncrementModel& model, const RiskParams& params) {
    return bbar(model, params) / (1.0 - params.beta);
}

double certainty_equivalent(std::span<const double> values, std::span<const double> weights,
                            double gamma) {
    if (values.empty() || weights.empty())
        throw Error(ErrorCode::EmptySupport, "certainty_equivalent: empty distribution");
    if (values.size() != weights.size())
        throw Error(ErrorCode::InvalidArgument, "certainty_equivalent: size mismatch");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0))
            throw Error(ErrorCode::InvalidArgument, "certainty_equivalent: negative weight");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12)
        throw Error(ErrorCode::InvalidArgument, "certainty_equivalent: weights must sum to 1");
    if (gamma < 0.0)
        throw Error(ErrorCode::InvalidArgument, "certainty_equivalent: gamma must be >= 0");

    if (gamma == 0.0) {
        double mean = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) mean += weights[i] * values[i];
        return mean;
    }
    // Shift by the minimum so every exponent is <= 0; exact by translation
    // invariance of the certainty equivalent.
    const double m = *std::min_element(values.begin(), values.end());
    double s = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        s += weights[i] * std::exp(-gamma * (values[i] - m));
    return m - std::log(s) / gamma;
}

double log_risk_integral(const ValueFn& v, double u, const IncrementModel& model, double gamma,
                         double ruin_value) {
    if (!(gamma > 0.0))
        throw Error(ErrorCode::InvalidArgument, "log_risk_integral: gamma must be > 0");
    check_u(v, u);
    const Geometry g{v.grid, v.bounded};
    const BranchLogs br = direct_branches(g, model, u, gamma, /*mean=*/false);
    const double ln_ruin = model.log_cdf(-u) - gamma * ruin_value;
    return log_add_exp(log_add_exp(br.lower, br.upper), ln_ruin);
}

double risk_integral(const ValueFn& v, double u, const IncrementModel& model, double gamma,
                     double ruin_value) {
    return std::exp(log_risk_integral(v, u, model, gamma, ruin_value));
}

double expected_continuation(const ValueFn& v, double u, const IncrementModel& model,
                             double ruin_value) {
    check_u(v, u);
    const Geometry g{v.grid, v.bounded};
    const BranchLogs br = direct_branches(g, model, u, 0.0, /*mean=*/true);
    double e = 0.0;
    if (br.lower != kNegInf) e += std::exp(br.lower);
    if (br.upper != kNegInf) e += std::exp(br.upper);
    return e + ruin_value * model.cdf(-u);
}

double gamma_transform(const ValueFn& v, double u, const RiskParams& params,
                       const IncrementModel& model, double ruin_value) {
    if (params.gamma == 0.0)
        return params.beta * expected_continuation(v, u, model, ruin_value);
    return -(params.beta / params.gamma) * log_risk_integral(v, u, model, params.gamma, ruin_value);
}

std::vector<double> continuation_profile(const ValueFn& v, const RiskParams& params,
                                         const IncrementModel& model, double ruin_value) {
    const std::size_t n = v.grid.n_nodes;
    const Geometry g{v.grid, v.bounded};
    const double gamma = params.gamma;
    const bool mean = gamma == 0.0;
    std::vector<double> out(n);

    auto finish = [&](std::size_t i, double ln_lower, double ln_upper) {
        const double u = v.grid.x(i);
        if (mean) {
            double e = 0.0;
            if (ln_lower != kNegInf) e += std::exp(ln_lower);
            if (ln_upper != kNegInf) e += std::exp(ln_upper);
            out[i] = params.beta * (e + ruin_value * model.cdf(-u));
        } else {
            const double ln_ruin = model.log_cdf(-u) - gamma * ruin_value;
            out[i] = -(params.beta / gamma) * log_add_exp(log_add_exp(ln_lower, ln_upper), ln_ruin);
        }
    };

    if (const auto* le = std::get_if<LeftExponential>(&model.kind())) {
        const auto lnS = prefix_logsums(g, gamma, le->lambda, mean);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = v.grid.x(i) + le->shift;
            const double lnInt = lower_from_prefix(g, lnS, t, gamma, le->lambda, mean);
            finish(i, std::log(le->lambda) - le->lambda * t + lnInt, kNegInf);
        }
    } else if (const auto* de = std::get_if<DoubleExponential>(&model.kind())) {
        const auto lnS = prefix_logsums(g, gamma, 1.0, mean);
        const auto lnQ = suffix_logsums(g, gamma, -1.0, mean);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = v.grid.x(i) + de->mu;
            const double lnLow = std::log(0.5) - t + lower_from_prefix(g, lnS, t, gamma, 1.0, mean);
            const double lnUp = std::log(0.5) + t + upper_from_suffix(g, lnQ, t, gamma, -1.0, mean);
            finish(i, lnLow, lnUp);
        }
    } else {
        const auto& tab = std::get<TabulatedDensity>(model.kind());
        for (std::size_t i = 0; i < n; ++i)
            finish(i, tabulated_log_integral(g, tab, v.grid.x(i), gamma, mean), kNegInf);
    }
    return out;
}

}  // namespace riskdiv
