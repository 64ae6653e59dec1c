#include "core/policy_structure.hpp"

#include <cmath>
#include <sstream>

namespace riskdiv {

const char* policy_class_name(PolicyClass c) {
    switch (c) {
        case PolicyClass::PayAll: return "PayAll";
        case PolicyClass::Barrier: return "Barrier";
        case PolicyClass::FiniteBand: return "FiniteBand";
    }
    return "Unknown";
}

double BandPolicy::action(double x) const {
    if (x <= retentions.front()) return 0.0;
    for (std::size_t k = 0; k < triggers.size(); ++k) {
        if (x <= triggers[k]) return x - retentions[k];
        if (x <= retentions[k + 1]) return 0.0;
    }
    return x - retentions.back();
}

std::vector<std::pair<double, double>> BandPolicy::zero_intervals() const {
    std::vector<std::pair<double, double>> out;
    out.emplace_back(0.0, retentions.front());
    for (std::size_t k = 0; k < triggers.size(); ++k)
        out.emplace_back(triggers[k], retentions[k + 1]);
    return out;
}

std::string BandPolicy::summary() const {
    std::ostringstream os;
    os << policy_class_name(classify(*this)) << " xi=" << xi();
    os << " bands=[";
    for (std::size_t k = 0; k < retentions.size(); ++k) {
        if (k) os << " ";
        os << "c" << k << "=" << retentions[k];
        if (k < triggers.size()) os << ",d" << k + 1 << "=" << triggers[k];
    }
    os << "]";
    return os.str();
}

double extract_xi(const PolicyFn& policy, double eps_zero) {
    for (std::size_t i = policy.grid.n_nodes; i-- > 0;)
        if (policy.actions[i] <= eps_zero) return policy.grid.x(i);
    return 0.0;
}

BandPolicy extract_bands(const PolicyFn& policy, double eps_zero) {
    const auto& grid = policy.grid;
    const std::size_t n = grid.n_nodes;
    BandPolicy out;

    std::size_t i = 0;
    while (i < n) {
        if (policy.actions[i] > eps_zero)
            throw NotBandStructured(i, "extract_bands: pay run not preceded by a zero run");
        // zero run
        std::size_t top = i;
        while (top + 1 < n && policy.actions[top + 1] <= eps_zero) ++top;
        out.retentions.push_back(grid.x(top));
        i = top + 1;
        if (i >= n) break;
        // pay run, must retain the zero-run top with slope one
        std::size_t run_end = i;
        while (run_end + 1 < n && policy.actions[run_end + 1] > eps_zero) ++run_end;
        for (std::size_t j = i; j <= run_end; ++j) {
            if (policy.retained_index(j) != top)
                throw NotBandStructured(j, "extract_bands: pay run does not hold a fixed retention level");
        }
        i = run_end + 1;
        if (i < n) out.triggers.push_back(grid.x(run_end));
    }
    return out;
}

PolicyClass classify(const BandPolicy& bands) {
    if (bands.xi() == 0.0) return PolicyClass::PayAll;
    if (bands.retentions.size() == 1) return PolicyClass::Barrier;
    return PolicyClass::FiniteBand;
}

}  // namespace riskdiv
