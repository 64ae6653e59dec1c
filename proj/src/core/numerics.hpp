#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace riskdiv {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

/// log(e^a + e^b) without overflow; exact when one argument is -inf.
inline double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

inline double log_add_exp(double a, double b, double c) {
    return log_add_exp(log_add_exp(a, b), c);
}

/// E1(x) = (e^x - 1)/x, continuous at 0 with E1(0) = 1.
inline double e1(double x) {
    if (std::abs(x) < 1e-12) return 1.0 + 0.5 * x;
    return std::expm1(x) / x;
}

/// E2(x) = integral_0^1 s e^{x s} ds = (e^x (x - 1) + 1)/x^2, E2(0) = 1/2.
inline double e2(double x) {
    if (std::abs(x) < 1e-3)
        return 0.5 + x / 3.0 + x * x / 8.0 + x * x * x / 30.0 + x * x * x * x / 144.0;
    return (std::exp(x) * (x - 1.0) + 1.0) / (x * x);
}

/// ln((e^x - 1)/x), stable for x of any magnitude (x = 1e5 must not overflow).
inline double ln_e1(double x) {
    if (std::abs(x) < 1e-5) return 0.5 * x + x * x / 24.0;
    if (x > 36.0) return x - std::log(x);  // e^{-x} below double epsilon of the bracket
    if (x > 0.0) return std::log(std::expm1(x) / x);
    return std::log(-std::expm1(x)) - std::log(-x);
}

/// Maximise a unimodal-near-the-bracket function on [lo, hi] by golden section.
/// Returns the abscissa of the maximum to absolute tolerance xtol.
inline double golden_section_max(const std::function<double(double)>& f,
                                 double lo, double hi, double xtol) {
    static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > xtol) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace riskdiv
