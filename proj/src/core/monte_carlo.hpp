#pragma once

#include <cstdint>
#include <span>

#include "core/entropic.hpp"
#include "core/grid.hpp"

namespace riskdiv {

/// Deterministic splittable generator: every draw derives from (seed, path)
/// alone, so threaded and serial runs produce identical streams.
struct SplitMix64 {
    std::uint64_t state;

    std::uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in the open interval (0, 1).
    double uniform01() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }
};

std::uint64_t mix_keys(std::uint64_t a, std::uint64_t b);

struct McConfig {
    std::uint64_t outer_samples = 100000;
    std::uint64_t inner_samples = 1000;
    std::uint64_t seed = 1;
    std::size_t horizon = 2;
};

struct McEstimate {
    double estimate = 0.0;
    double stderr_proxy = 0.0;
};

/// Evaluates the recursive risk-adjusted cash flow of the given time-indexed
/// stage policies by nested sampling (inverse-cdf draws). Ruined branches
/// contribute unit mass exactly. stderr_proxy is a bootstrap over the
/// outermost samples. Worker count is capped by the RD_THREADS variable.
McEstimate nested_mc_evaluate(double x, std::span<const PolicyFn> stage_policies,
                              const RiskParams& params, const IncrementModel& model,
                              const McConfig& cfg);

}  // namespace riskdiv
