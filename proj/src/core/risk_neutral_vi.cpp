#include "core/risk_neutral_vi.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "core/numerics.hpp"

namespace riskdiv {

namespace {

constexpr double kGlNode[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.9061798459386640};
constexpr double kGlWeight[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                 0.4786286704993665, 0.2369268850561891};

struct RnWorkspace {
    const IncrementModel& model;
    const SurplusGrid& grid;
    double z_lo_cut;  // density below this is negligible
    double z_hi_cut;
    std::vector<double> breaks;

    double interp(std::span<const double> w, double x) const {
        if (x >= grid.x_max()) return x + (w.back() - grid.x_max());
        const std::size_t j = std::min<std::size_t>(grid.n_nodes - 2,
                                                    static_cast<std::size_t>(x / grid.step));
        const double t = (x - grid.x(j)) / grid.step;
        return w[j] * (1.0 - t) + w[j + 1] * t;
    }

    // integral_{-u}^{inf} W(u + z) g(z) dz by composite Gauss-Legendre panels
    // aligned with the value grid, subdivided to width <= 0.1 and split at
    // density breakpoints.
    double continuation(std::span<const double> w, double u) const {
        const double lo = std::max(-u, z_lo_cut);
        const double hi = z_hi_cut;
        if (!(hi > lo)) return 0.0;
        const auto sub = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(grid.step / 0.1)));
        const double panel_w = grid.step / static_cast<double>(sub);
        double acc = 0.0;
        // panels start on the lattice -u + k*panel_w so that W's kinks fall
        // on panel boundaries
        double z = lo;
        if (lo > -u) z = -u + std::floor((lo + u) / panel_w) * panel_w;
        std::size_t bi = 0;
        while (bi < breaks.size() && breaks[bi] <= lo) ++bi;
        while (z < hi) {
            double next = std::min(hi, z + panel_w);
            if (bi < breaks.size() && breaks[bi] < next && breaks[bi] > z) next = breaks[bi];
            if (bi < breaks.size() && breaks[bi] <= next) ++bi;
            const double c = 0.5 * (z + next);
            const double half = 0.5 * (next - z);
            double panel = 0.0;
            for (int k = 0; k < 5; ++k) {
                const double zz = c + half * kGlNode[k];
                panel += kGlWeight[k] * interp(w, u + zz) * model.pdf(zz);
            }
            acc += panel * half;
            z = next;
        }
        return acc;
    }
};

RnWorkspace make_workspace(const IncrementModel& model, const SurplusGrid& grid) {
    RnWorkspace ws{model, grid, 0.0, 0.0, model.density_breakpoints()};
    const double hi = model.support_hi();
    const double ref = ws.breaks.empty() ? 0.0 : ws.breaks.back();
    ws.z_hi_cut = std::isfinite(hi) ? hi : ref + 45.0;
    if (const auto* le = std::get_if<LeftExponential>(&model.kind()))
        ws.z_lo_cut = le->shift - 45.0 / le->lambda;
    else if (const auto* de = std::get_if<DoubleExponential>(&model.kind()))
        ws.z_lo_cut = de->mu - 45.0;
    else
        ws.z_lo_cut = model.support_lo();
    return ws;
}

}  // namespace

ValueFn risk_neutral_vi(const IncrementModel& model, double beta, const SurplusGrid& grid,
                        double tol, SolveReport* report_out) {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "risk_neutral_vi: tol must be > 0");
    const RiskParams params(beta, 0.0);
    require_solvable(model, params, grid);
    const RnWorkspace ws = make_workspace(model, grid);
    const std::size_t n = grid.n_nodes;

    std::vector<double> w(n), w_next(n), h(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = grid.x(i);

    const double threshold = tol * (1.0 - beta) / beta;
    const std::size_t max_iter = default_max_iterations(model, params, tol);
    SolveReport report;

    for (std::size_t k = 1; k <= max_iter; ++k) {
        for (std::size_t i = 0; i < n; ++i)
            h[i] = -grid.x(i) + beta * ws.continuation(w, grid.x(i));
        double running = h[0];
        double r = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            running = std::max(running, h[i]);
            w_next[i] = grid.x(i) + running;
            r = std::max(r, std::abs(w_next[i] - w[i]));
        }
        w.swap(w_next);
        report.iterations = k;
        report.final_residual = r;
        report.residual_history.push_back(r);
        if (r <= threshold) break;
        if (k == max_iter)
            throw MaxIterExceeded("risk_neutral_vi: no convergence within iteration budget", report);
    }
    report.certified_error = report.final_residual * beta / (1.0 - beta);
    if (report_out) *report_out = report;

    std::vector<double> bounded(n);
    for (std::size_t i = 0; i < n; ++i) bounded[i] = w[i] - grid.x(i);
    return ValueFn(grid, std::move(bounded));
}

double risk_neutral_xi(const IncrementModel& model, double beta, const SurplusGrid& grid,
                       double tol) {
    const ValueFn sol = risk_neutral_vi(model, beta, grid, tol);
    const RnWorkspace ws = make_workspace(model, grid);
    const std::size_t n = grid.n_nodes;
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = sol.value_at(i);

    double running = kNegInf;
    std::size_t arg = 0;
    double xi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double h = -grid.x(i) + beta * ws.continuation(w, grid.x(i));
        if (h > running + 1e-10 * (1.0 + std::abs(running))) {
            running = std::max(running, h);
            arg = i;
        } else {
            running = std::max(running, h);
        }
        const double action = grid.x(i) - grid.x(arg);
        if (action <= 0.5 * grid.step) xi = grid.x(i);
    }
    return xi;
}

}  // namespace riskdiv
