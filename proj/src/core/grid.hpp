#pragma once

#include <cstddef>
#include <vector>

#include "core/errors.hpp"

namespace riskdiv {

/// Uniform surplus grid x_i = i * step, i = 0..n_nodes-1.
struct SurplusGrid {
    double step = 0.0;
    std::size_t n_nodes = 0;

    SurplusGrid() = default;
    SurplusGrid(double step_, std::size_t n_nodes_) : step(step_), n_nodes(n_nodes_) {
        if (!(step > 0.0) || n_nodes < 2)
            throw Error(ErrorCode::InvalidArgument, "SurplusGrid: need step > 0 and at least 2 nodes");
    }

    double x(std::size_t i) const { return step * static_cast<double>(i); }
    double x_max() const { return x(n_nodes - 1); }

    bool operator==(const SurplusGrid&) const = default;
};

/// Value function stored through its bounded part b(x) = v(x) - x at the grid
/// nodes; v(x) = 0 for x < 0 by convention. Between nodes the bounded part is
/// interpolated linearly and beyond the last node it is held constant.
struct ValueFn {
    SurplusGrid grid;
    std::vector<double> bounded;

    ValueFn() = default;
    ValueFn(SurplusGrid g, std::vector<double> b) : grid(g), bounded(std::move(b)) {
        if (bounded.size() != grid.n_nodes)
            throw Error(ErrorCode::InvalidArgument, "ValueFn: bounded part size mismatch");
    }

    static ValueFn identity(SurplusGrid g) { return ValueFn(g, std::vector<double>(g.n_nodes, 0.0)); }

    double value_at(std::size_t i) const { return grid.x(i) + bounded[i]; }

    /// v at arbitrary surplus (0 below zero, tail extension above the grid).
    double value(double x) const;
};

/// Grid decision rule; actions are exact grid multiples with 0 <= a_i <= x_i.
struct PolicyFn {
    SurplusGrid grid;
    std::vector<double> actions;

    PolicyFn() = default;
    PolicyFn(SurplusGrid g, std::vector<double> a);

    static PolicyFn pay_all(SurplusGrid g);
    static PolicyFn barrier(SurplusGrid g, double level);

    /// Index of the post-dividend surplus node x_i - a_i.
    std::size_t retained_index(std::size_t i) const;
};

/// Checks membership of a solver output in the sandwich class
/// x <= v(x) <= x + bbar together with the secant bound v(x)-v(y) >= x-y.
struct SMembership {
    bool ok = true;
    double worst_lower = 0.0;   // max over nodes of (x - v(x)), <= tol when ok
    double worst_upper = 0.0;   // max over nodes of (v(x) - x - bbar)
    double worst_secant = 0.0;  // max over nodes of (b_i - b_{i+1})
};

SMembership check_s_membership(const ValueFn& v, double bbar, double tol);

}  // namespace riskdiv
