#include "core/dp_operators.hpp"

#include <algorithm>
#include <cmath>

#include "core/numerics.hpp"

namespace riskdiv {

PrefixScan prefix_max_scan(std::span<const double> h, double tie_rel_tol) {
    const std::size_t n = h.size();
    PrefixScan out;
    out.prefix_max.resize(n);
    out.argmax.resize(n);
    // Indices where the running maximum strictly increased; values ascend, so
    // the smallest near-maximal index is found by binary search.
    std::vector<double> rec_val;
    std::vector<std::size_t> rec_idx;
    double m = kNegInf;
    for (std::size_t i = 0; i < n; ++i) {
        if (h[i] > m) {
            m = h[i];
            rec_val.push_back(m);
            rec_idx.push_back(i);
        }
        out.prefix_max[i] = m;
        const double thr = m - tie_rel_tol * (1.0 + std::abs(m));
        const auto it = std::lower_bound(rec_val.begin(), rec_val.end(), thr);
        out.argmax[i] = rec_idx[static_cast<std::size_t>(it - rec_val.begin())];
    }
    return out;
}

HProfile build_h_profile(const ValueFn& v, const RiskParams& params, const IncrementModel& model) {
    HProfile p;
    p.grid = v.grid;
    p.h = continuation_profile(v, params, model);
    for (std::size_t i = 0; i < p.h.size(); ++i) p.h[i] -= p.grid.x(i);
    auto scan = prefix_max_scan(p.h);
    p.prefix_max = std::move(scan.prefix_max);
    p.argmax_index = std::move(scan.argmax);
    return p;
}

std::pair<ValueFn, PolicyFn> bellman_T(const ValueFn& v, const RiskParams& params,
                                       const IncrementModel& model) {
    const HProfile p = build_h_profile(v, params, model);
    const std::size_t n = v.grid.n_nodes;
    std::vector<double> b(n), a(n);
    for (std::size_t i = 0; i < n; ++i) {
        b[i] = p.prefix_max[i];
        a[i] = v.grid.x(i) - v.grid.x(p.argmax_index[i]);
    }
    return {ValueFn(v.grid, std::move(b)), PolicyFn(v.grid, std::move(a))};
}

std::vector<double> operator_U(std::span<const double> bounded, const SurplusGrid& grid,
                               const RiskParams& params, const IncrementModel& model) {
    ValueFn v(grid, std::vector<double>(bounded.begin(), bounded.end()));
    const HProfile p = build_h_profile(v, params, model);
    return p.prefix_max;
}

ValueFn operator_L(const ValueFn& v, const PolicyFn& alpha, const RiskParams& params,
                   const IncrementModel& model) {
    if (alpha.grid != v.grid)
        throw Error(ErrorCode::InvalidArgument, "operator_L: grid mismatch");
    const std::vector<double> gamma_profile = continuation_profile(v, params, model);
    const std::size_t n = v.grid.n_nodes;
    std::vector<double> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = alpha.retained_index(i);
        // a_i + Gamma(u_j) - x_i with a_i = x_i - x_j
        b[i] = gamma_profile[j] - v.grid.x(j);
    }
    return ValueFn(v.grid, std::move(b));
}

}  // namespace riskdiv
