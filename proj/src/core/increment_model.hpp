#pragma once

#include <string>
#include <variant>
#include <vector>

namespace riskdiv {

/// One-period surplus increment Z = premium income minus claims, density g,
/// distribution nu. The left-sided exponential has support (-inf, d] and the
/// double-exponential is the Laplace density with unit scale and mean mu.
/// Tabulated densities are piecewise linear between ascending nodes.
struct LeftExponential {
    double lambda;
    double shift;  // d
};

struct DoubleExponential {
    double mu;
};

struct TabulatedDensity {
    std::vector<double> nodes;
    std::vector<double> density;     // renormalised at construction
    std::vector<double> node_cdf;    // exact piecewise-quadratic integral
};

enum class Violation {
    ShiftRateViolation,  // left exponential with lambda*d <= 1
    RuinImpossible,      // nu(-inf, 0) = 0, violates A2
};

const char* violation_name(Violation v);

class IncrementModel {
public:
    static IncrementModel left_exponential(double lambda, double d);
    static IncrementModel double_exponential(double mu);
    /// Nodes must be strictly ascending, densities nonnegative with positive
    /// total mass integrating to 1 within 1e-9 (then renormalised exactly).
    static IncrementModel tabulated(std::vector<double> nodes, std::vector<double> density);

    double pdf(double z) const;
    double cdf(double z) const;
    double log_cdf(double z) const;
    /// Inverse cdf; p must lie in (0, 1).
    double quantile(double p) const;

    double support_lo() const;
    double support_hi() const;

    /// E[Z^+], exact closed form for every kind.
    double mean_positive_part() const;
    /// rho(Z^+) = -(1/gamma) ln(E e^{-gamma Z^+}); returns E[Z^+] at gamma = 0.
    double entropic_premium_positive_part(double gamma) const;

    /// ln of integral_{lo}^{inf} e^{-gamma z} g(z) dz (-inf when empty).
    double log_exp_tail_integral(double gamma, double lo) const;
    /// integral_{lo}^{inf} z g(z) dz.
    double partial_mean(double lo) const;

    /// Empty iff A1-A3 hold (and lambda*d > 1 for the left exponential).
    std::vector<Violation> validate_assumptions() const;

    /// z-values where the density is not smooth (used by quadrature oracles).
    std::vector<double> density_breakpoints() const;
    /// Tabulated density jumping to zero at a support endpoint (A3' flag).
    bool has_boundary_density_jump() const;

    std::string describe() const;

    const std::variant<LeftExponential, DoubleExponential, TabulatedDensity>& kind() const {
        return kind_;
    }

private:
    explicit IncrementModel(std::variant<LeftExponential, DoubleExponential, TabulatedDensity> k)
        : kind_(std::move(k)) {}

    std::variant<LeftExponential, DoubleExponential, TabulatedDensity> kind_;
};

}  // namespace riskdiv
