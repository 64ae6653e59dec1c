#pragma once

#include <string>
#include <utility>
#include <vector>

#include "core/grid.hpp"

namespace riskdiv {

enum class PolicyClass { PayAll, Barrier, FiniteBand };

const char* policy_class_name(PolicyClass c);

/// Structured form of a band policy: retention levels c_0 < c_1 < ... < c_m
/// with pay bands (c_k, d_{k+1}] between them. Nothing is paid on [0, c_0]
/// and on each (d_{k+1}, c_{k+1}]; above c_m the excess x - c_m is paid out.
struct BandPolicy {
    std::vector<double> retentions;  // c_0 .. c_m
    std::vector<double> triggers;    // d_1 .. d_m (size retentions.size() - 1)

    double c0() const { return retentions.front(); }
    double xi() const { return retentions.back(); }

    /// alpha(x) reconstructed from the band records.
    double action(double x) const;

    /// Zero-action set as closed intervals [lo, hi].
    std::vector<std::pair<double, double>> zero_intervals() const;

    std::string summary() const;
};

/// Largest grid node whose action does not exceed eps_zero (the
/// no-payout threshold); x = 0 always qualifies.
double extract_xi(const PolicyFn& policy, double eps_zero);

/// Decompose a grid policy into band records. Requires band compatibility:
/// every maximal run of positive actions pays down to the top of the zero run
/// below it with slope one; otherwise throws NotBandStructured with the first
/// violating node.
BandPolicy extract_bands(const PolicyFn& policy, double eps_zero);

PolicyClass classify(const BandPolicy& bands);

}  // namespace riskdiv
