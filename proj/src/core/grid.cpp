#include "core/grid.hpp"

#include <algorithm>
#include <cmath>

namespace riskdiv {

double ValueFn::value(double x) const {
    if (x < 0.0) return 0.0;
    if (x >= grid.x_max()) return x + bounded.back();
    const std::size_t j = std::min<std::size_t>(grid.n_nodes - 2,
                                                static_cast<std::size_t>(x / grid.step));
    const double t = (x - grid.x(j)) / grid.step;
    return x + bounded[j] * (1.0 - t) + bounded[j + 1] * t;
}

PolicyFn::PolicyFn(SurplusGrid g, std::vector<double> a) : grid(g), actions(std::move(a)) {
    if (actions.size() != grid.n_nodes)
        throw Error(ErrorCode::InvalidArgument, "PolicyFn: action vector size mismatch");
    for (std::size_t i = 0; i < actions.size(); ++i) {
        const double ai = actions[i];
        if (!(ai >= 0.0) || ai > grid.x(i) + 1e-9 * grid.step)
            throw Error(ErrorCode::InvalidArgument, "PolicyFn: action outside [0, x]");
        const double k = ai / grid.step;
        if (std::abs(k - std::round(k)) > 1e-6)
            throw Error(ErrorCode::InvalidArgument, "PolicyFn: action is not a grid multiple");
    }
}

PolicyFn PolicyFn::pay_all(SurplusGrid g) {
    std::vector<double> a(g.n_nodes);
    for (std::size_t i = 0; i < g.n_nodes; ++i) a[i] = g.x(i);
    return PolicyFn(g, std::move(a));
}

PolicyFn PolicyFn::barrier(SurplusGrid g, double level) {
    std::vector<double> a(g.n_nodes, 0.0);
    for (std::size_t i = 0; i < g.n_nodes; ++i)
        if (g.x(i) > level) a[i] = g.x(i) - level;
    return PolicyFn(g, std::move(a));
}

std::size_t PolicyFn::retained_index(std::size_t i) const {
    const auto k = static_cast<std::size_t>(std::llround(actions[i] / grid.step));
    return i - std::min(i, k);
}

SMembership check_s_membership(const ValueFn& v, double bbar, double tol) {
    SMembership r;
    for (std::size_t i = 0; i < v.grid.n_nodes; ++i) {
        r.worst_lower = std::max(r.worst_lower, -v.bounded[i]);
        r.worst_upper = std::max(r.worst_upper, v.bounded[i] - bbar);
        if (i + 1 < v.grid.n_nodes)
            r.worst_secant = std::max(r.worst_secant, v.bounded[i] - v.bounded[i + 1]);
    }
    r.ok = r.worst_lower <= tol && r.worst_upper <= tol && r.worst_secant <= tol;
    return r;
}

}  // namespace riskdiv
