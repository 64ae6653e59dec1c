#include "core/increment_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/errors.hpp"
#include "core/numerics.hpp"

namespace riskdiv {

namespace {

double segment_exp_integral(double g0, double slope, double width, double rate) {
    // integral_0^width e^{rate*t} (g0 + slope*t) dt
    return g0 * width * e1(rate * width) + slope * width * width * e2(rate * width);
}

}  // namespace

const char* violation_name(Violation v) {
    switch (v) {
        case Violation::ShiftRateViolation: return "ShiftRateViolation";
        case Violation::RuinImpossible: return "RuinImpossible";
    }
    return "UnknownViolation";
}

IncrementModel IncrementModel::left_exponential(double lambda, double d) {
    if (!(lambda > 0.0) || !std::isfinite(lambda) || !std::isfinite(d))
        throw Error(ErrorCode::InvalidArgument, "left_exponential: lambda must be positive and finite");
    return IncrementModel(LeftExponential{lambda, d});
}

IncrementModel IncrementModel::double_exponential(double mu) {
    if (!std::isfinite(mu))
        throw Error(ErrorCode::InvalidArgument, "double_exponential: mu must be finite");
    return IncrementModel(DoubleExponential{mu});
}

IncrementModel IncrementModel::tabulated(std::vector<double> nodes, std::vector<double> density) {
    if (nodes.size() < 2 || nodes.size() != density.size())
        throw Error(ErrorCode::InvalidArgument, "tabulated: need matching node/density arrays, >= 2 points");
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
        if (!(nodes[i] < nodes[i + 1]))
            throw Error(ErrorCode::InvalidArgument, "tabulated: nodes must be strictly ascending");
    for (double g : density)
        if (!(g >= 0.0) || !std::isfinite(g))
            throw Error(ErrorCode::InvalidArgument, "tabulated: densities must be nonnegative and finite");

    TabulatedDensity t;
    t.nodes = std::move(nodes);
    t.density = std::move(density);
    t.node_cdf.assign(t.nodes.size(), 0.0);
    for (std::size_t i = 0; i + 1 < t.nodes.size(); ++i) {
        const double w = t.nodes[i + 1] - t.nodes[i];
        t.node_cdf[i + 1] = t.node_cdf[i] + 0.5 * (t.density[i] + t.density[i + 1]) * w;
    }
    const double mass = t.node_cdf.back();
    if (std::abs(mass - 1.0) > 1e-9)
        throw Error(ErrorCode::ModelInvalid, "tabulated: density mass deviates from 1 by more than 1e-9");
    // rescale so internal identities (cdf at the top node = 1) hold exactly
    for (auto& g : t.density) g /= mass;
    for (auto& c : t.node_cdf) c /= mass;
    t.node_cdf.back() = 1.0;
    return IncrementModel(std::move(t));
}

double IncrementModel::pdf(double z) const {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LeftExponential>) {
                if (z > m.shift) return 0.0;
                return m.lambda * std::exp(m.lambda * (z - m.shift));
            } else if constexpr (std::is_same_v<T, DoubleExponential>) {
                return 0.5 * std::exp(-std::abs(z - m.mu));
            } else {
                if (z < m.nodes.front() || z > m.nodes.back()) return 0.0;
                const auto it = std::upper_bound(m.nodes.begin(), m.nodes.end(), z);
                const std::size_t k = std::min<std::size_t>(m.nodes.size() - 2,
                                                            std::max<std::ptrdiff_t>(0, it - m.nodes.begin() - 1));
                const double w = m.nodes[k + 1] - m.nodes[k];
                const double a = (z - m.nodes[k]) / w;
                return m.density[k] * (1.0 - a) + m.density[k + 1] * a;
            }
        },
        kind_);
}

double IncrementModel::cdf(double z) const {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LeftExponential>) {
                if (z >= m.shift) return 1.0;
                return std::exp(m.lambda * (z - m.shift));
            } else if constexpr (std::is_same_v<T, DoubleExponential>) {
                if (z <= m.mu) return 0.5 * std::exp(z - m.mu);
                return 1.0 - 0.5 * std::exp(m.mu - z);
            } else {
                if (z <= m.nodes.front()) return 0.0;
                if (z >= m.nodes.back()) return 1.0;
                const auto it = std::upper_bound(m.nodes.begin(), m.nodes.end(), z);
                const std::size_t k = it - m.nodes.begin() - 1;
                const double w = m.nodes[k + 1] - m.nodes[k];
                const double t = z - m.nodes[k];
                const double slope = (m.density[k + 1] - m.density[k]) / w;
                return m.node_cdf[k] + m.density[k] * t + 0.5 * slope * t * t;
            }
        },
        kind_);
}

double IncrementModel::log_cdf(double z) const {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LeftExponential>) {
                if (z >= m.shift) return 0.0;
                return m.lambda * (z - m.shift);
            } else if constexpr (std::is_same_v<T, DoubleExponential>) {
                if (z <= m.mu) return std::log(0.5) + (z - m.mu);
                return std::log1p(-0.5 * std::exp(m.mu - z));
            } else {
                const double c = cdf(z);
                return c > 0.0 ? std::log(c) : kNegInf;
            }
        },
        kind_);
}

double IncrementModel::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0))
        throw Error(ErrorCode::InvalidArgument, "quantile: p must be in (0,1)");
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LeftExponential>) {
                return m.shift + std::log(p) / m.lambda;
            } else if constexpr (std::is_same_v<T, DoubleExponential>) {
                if (p <= 0.5) return m.mu + std::log(2.0 * p);
                return m.mu - std::log(2.0 * (1.0 - p));
            } else {
                const auto it = std::upper_bound(m.node_cdf.begin(), m.node_cdf.end(), p);
                const std::size_t k = std::min<std::size_t>(m.nodes.size() - 2,
                                                            std::max<std::ptrdiff_t>(0, it - m.node_cdf.begin() - 1));
                const double w = m.nodes[k + 1] - m.nodes[k];
                const double slope = (m.density[k + 1] - m.density[k]) / w;
                const double dp = p - m.node_cdf[k];
                const double g0 = m.density[k];
                double t;
                if (std::abs(slope) < 1e-14) {
                    t = g0 > 0.0 ? dp / g0 : 0.0;
                } else {
                    const double disc = std::max(0.0, g0 * g0 + 2.0 * slope * dp);
                    t = (-g0 + std::sqrt(disc)) / slope;
                }
                return m.nodes[k] + std::clamp(t, 0.0, w);
            }
        },
        kind_);
}

double IncrementModel::support_lo() const {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, TabulatedDensity>) return m.nodes.front();
            else return kNegInf;
        },
        kind_);
}

double IncrementModel::support_hi() const {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LeftExponential>) return m.shift;
            else if constexpr (std::is_same_v<T, DoubleExponential>) return kPosInf;
            else return m.nodes.back();
        },
        kind_);
}

double IncrementModel::mean_positive_part() const {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LeftExponential>) {
                if (m.shift <= 0.0) return 0.0;
                return m.shift - (1.0 - std::exp(-m.lambda * m.shift)) / m.lambda;
            } else if constexpr (std::is_same_v<T, DoubleExponential>) {
                if (m.mu >= 0.0) return m.mu + 0.5 * std::exp(-m.mu);
                return 0.5 * std::exp(m.mu);
            } else {
                return partial_mean(0.0);
            }
        },
        kind_);
}

double IncrementModel::entropic_premium_positive_part(double gamma) const {
    if (gamma < 0.0)
        throw Error(ErrorCode::InvalidArgument, "entropic premium: gamma must be >= 0");
    if (gamma == 0.0) return mean_positive_part();
    // E e^{-gamma Z^+} = integral_0^inf e^{-gamma z} g(z) dz + G(0)
    const double tail = std::exp(log_exp_tail_integral(gamma, 0.0));
    const double expectation = tail + cdf(0.0);
    return -std::log(expectation) / gamma;
}

double IncrementModel::log_exp_tail_integral(double gamma, double lo) const {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LeftExponential>) {
                if (lo >= m.shift) return kNegInf;
                const double w = m.shift - lo;
                return std::log(m.lambda) - m.lambda * m.shift + (m.lambda - gamma) * lo +
                       std::log(w) + ln_e1((m.lambda - gamma) * w);
            } else if constexpr (std::is_same_v<T, DoubleExponential>) {
                const double upper = std::log(0.5) + m.mu - std::log1p(gamma) -
                                     (1.0 + gamma) * std::max(lo, m.mu);
                if (lo >= m.mu) return upper;
                const double w = m.mu - lo;
                const double lower = std::log(0.5) - m.mu + (1.0 - gamma) * lo + std::log(w) +
                                     ln_e1((1.0 - gamma) * w);
                return log_add_exp(lower, upper);
            } else {
                double acc = kNegInf;
                for (std::size_t k = 0; k + 1 < m.nodes.size(); ++k) {
                    const double a = std::max(lo, m.nodes[k]);
                    const double b = m.nodes[k + 1];
                    if (b <= a) continue;
                    const double seg_w = m.nodes[k + 1] - m.nodes[k];
                    const double slope = (m.density[k + 1] - m.density[k]) / seg_w;
                    const double g0 = m.density[k] + slope * (a - m.nodes[k]);
                    const double val = segment_exp_integral(g0, slope, b - a, -gamma);
                    if (val > 0.0) acc = log_add_exp(acc, -gamma * a + std::log(val));
                }
                return acc;
            }
        },
        kind_);
}

double IncrementModel::partial_mean(double lo) const {
    return std::visit(
        [&](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LeftExponential>) {
                if (lo >= m.shift) return 0.0;
                const double e = std::exp(m.lambda * (lo - m.shift));
                return m.shift - lo * e - (1.0 - e) / m.lambda;
            } else if constexpr (std::is_same_v<T, DoubleExponential>) {
                if (lo > m.mu) return 0.5 * (lo + 1.0) * std::exp(m.mu - lo);
                return m.mu - 0.5 * (lo - 1.0) * std::exp(lo - m.mu);
            } else {
                double acc = 0.0;
                for (std::size_t k = 0; k + 1 < m.nodes.size(); ++k) {
                    const double a = std::max(lo, m.nodes[k]);
                    const double b = m.nodes[k + 1];
                    if (b <= a) continue;
                    const double seg_w = m.nodes[k + 1] - m.nodes[k];
                    const double slope = (m.density[k + 1] - m.density[k]) / seg_w;
                    const double g0 = m.density[k] + slope * (a - m.nodes[k]);
                    const double w = b - a;
                    // integral_0^w (a + t)(g0 + slope*t) dt
                    acc += a * g0 * w + (a * slope + g0) * w * w / 2.0 + slope * w * w * w / 3.0;
                }
                return acc;
            }
        },
        kind_);
}

std::vector<Violation> IncrementModel::validate_assumptions() const {
    std::vector<Violation> out;
    if (const auto* le = std::get_if<LeftExponential>(&kind_)) {
        if (!(le->lambda * le->shift > 1.0)) out.push_back(Violation::ShiftRateViolation);
    }
    if (!(cdf(0.0) > 0.0)) out.push_back(Violation::RuinImpossible);
    return out;
}

std::vector<double> IncrementModel::density_breakpoints() const {
    return std::visit(
        [&](const auto& m) -> std::vector<double> {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LeftExponential>) return {m.shift};
            else if constexpr (std::is_same_v<T, DoubleExponential>) return {m.mu};
            else return m.nodes;
        },
        kind_);
}

bool IncrementModel::has_boundary_density_jump() const {
    if (const auto* t = std::get_if<TabulatedDensity>(&kind_))
        return t->density.front() > 1e-12 || t->density.back() > 1e-12;
    return false;
}

std::string IncrementModel::describe() const {
    std::ostringstream os;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LeftExponential>)
                os << "left_exponential(lambda=" << m.lambda << ", d=" << m.shift << ")";
            else if constexpr (std::is_same_v<T, DoubleExponential>)
                os << "double_exponential(mu=" << m.mu << ")";
            else
                os << "tabulated(" << m.nodes.size() << " nodes on [" << m.nodes.front() << ", "
                   << m.nodes.back() << "])";
        },
        kind_);
    return os.str();
}

}  // namespace riskdiv
