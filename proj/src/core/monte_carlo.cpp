#include "core/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>
#include <vector>

#include "core/numerics.hpp"
#include "core/policy_structure.hpp"

namespace riskdiv {

namespace {

constexpr std::uint64_t kDrawTag = 0xD6E8FEB86659FD93ULL;
constexpr std::uint64_t kBootstrapTag = 0xB5297A4D3C2DA6B3ULL;

std::size_t worker_count(std::size_t jobs) {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("RD_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
    }
    return std::max<std::size_t>(1, std::min(n, jobs));
}

double log_mean_exp(std::span<const double> logs) {
    double m = kNegInf;
    for (double v : logs) m = std::max(m, v);
    if (m == kNegInf) return kNegInf;
    double s = 0.0;
    for (double v : logs) s += std::exp(v - m);
    return m + std::log(s / static_cast<double>(logs.size()));
}

struct Evaluator {
    std::span<const BandPolicy> bands;
    const RiskParams& params;
    const IncrementModel& model;
    std::uint64_t inner;
    std::size_t horizon;

    // Value of the remaining stages from `level` (1-based) at state x >= 0.
    double value(std::size_t level, double x, std::uint64_t key) const {
        const double a = bands[level - 1].action(x);
        if (level == horizon) return a;
        const double u = x - a;
        const std::uint64_t m = inner;
        if (params.gamma > 0.0) {
            double lse = kNegInf;
            for (std::uint64_t j = 0; j < m; ++j) {
                const std::uint64_t child = mix_keys(key, j);
                lse = log_add_exp(lse, child_log_term(level, u, child));
            }
            return a - (params.beta / params.gamma) * (lse - std::log(static_cast<double>(m)));
        }
        double sum = 0.0;
        for (std::uint64_t j = 0; j < m; ++j) {
            const std::uint64_t child = mix_keys(key, j);
            const double w = u + draw_increment(child);
            if (w >= 0.0) sum += value(level + 1, w, child);
        }
        return a + params.beta * sum / static_cast<double>(m);
    }

    double draw_increment(std::uint64_t child_key) const {
        SplitMix64 g{mix_keys(child_key, kDrawTag)};
        return model.quantile(g.uniform01());
    }

    // log of e^{-gamma * child value}; ruin contributes e^0 exactly.
    double child_log_term(std::size_t level, double u, std::uint64_t child_key) const {
        const double w = u + draw_increment(child_key);
        if (w < 0.0) return 0.0;
        return -params.gamma * value(level + 1, w, child_key);
    }
};

}  // namespace

std::uint64_t mix_keys(std::uint64_t a, std::uint64_t b) {
    SplitMix64 g{a ^ (b * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL)};
    return g.next();
}

McEstimate nested_mc_evaluate(double x, std::span<const PolicyFn> stage_policies,
                              const RiskParams& params, const IncrementModel& model,
                              const McConfig& cfg) {
    if (cfg.horizon < 1 || cfg.horizon > 4)
        throw Error(ErrorCode::InvalidArgument, "nested_mc_evaluate: horizon must be in [1, 4]");
    if (cfg.horizon != stage_policies.size())
        throw Error(ErrorCode::InvalidArgument, "nested_mc_evaluate: one policy per stage required");
    if (cfg.outer_samples < 1000 || (cfg.horizon >= 3 && cfg.inner_samples < 1000))
        throw Error(ErrorCode::InvalidArgument, "nested_mc_evaluate: at least 1000 samples per level");
    double cost = static_cast<double>(cfg.outer_samples);
    for (std::size_t l = 2; l < cfg.horizon; ++l) cost *= static_cast<double>(cfg.inner_samples);
    if (cost > 1e9)
        throw Error(ErrorCode::InvalidArgument, "nested_mc_evaluate: sample budget exceeds 1e9");
    if (!(x >= 0.0))
        throw Error(ErrorCode::InvalidArgument, "nested_mc_evaluate: x must be >= 0");

    std::vector<BandPolicy> bands;
    bands.reserve(stage_policies.size());
    for (const auto& p : stage_policies) bands.push_back(extract_bands(p, 0.5 * p.grid.step));

    const Evaluator ev{bands, params, model, cfg.inner_samples, cfg.horizon};
    const double a1 = bands.front().action(x);
    if (cfg.horizon == 1) return {a1, 0.0};

    const double u = x - a1;
    const std::uint64_t root = mix_keys(cfg.seed, 0xC0FFEE0DULL);
    const std::size_t n = cfg.outer_samples;
    // Outermost contributions, indexed by path so any thread split agrees
    // with the serial order.
    std::vector<double> terms(n);
    const std::size_t workers = worker_count(n);
    {
        std::vector<std::thread> pool;
        const std::size_t chunk = (n + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min(n, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back([&, lo, hi] {
                for (std::size_t j = lo; j < hi; ++j) {
                    const std::uint64_t child = mix_keys(root, j);
                    if (params.gamma > 0.0) {
                        terms[j] = ev.child_log_term(1, u, child);
                    } else {
                        const double w2 = u + ev.draw_increment(child);
                        terms[j] = w2 >= 0.0 ? ev.value(2, w2, child) : 0.0;
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    auto combine = [&](std::span<const double> sample) {
        if (params.gamma > 0.0)
            return a1 - (params.beta / params.gamma) * log_mean_exp(sample);
        double s = 0.0;
        for (double v : sample) s += v;
        return a1 + params.beta * s / static_cast<double>(sample.size());
    };

    McEstimate out;
    out.estimate = combine(terms);

    const std::size_t resamples = 128;
    SplitMix64 boot{mix_keys(cfg.seed, kBootstrapTag)};
    std::vector<double> resample(n), boots(resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
        for (std::size_t j = 0; j < n; ++j)
            resample[j] = terms[boot.next() % n];
        boots[b] = combine(resample);
    }
    double mean = 0.0;
    for (double v : boots) mean += v;
    mean /= static_cast<double>(resamples);
    double var = 0.0;
    for (double v : boots) var += (v - mean) * (v - mean);
    out.stderr_proxy = std::sqrt(var / static_cast<double>(resamples - 1));
    return out;
}

}  // namespace riskdiv
