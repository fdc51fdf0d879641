#pragma once

#include <cstddef>
#include <functional>

namespace jumpsupport::quad {

struct Options {
    double rel_tol = 1e-8;
    double abs_tol = 1e-14;
    std::size_t max_subdivisions = 2000;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    std::size_t subdivisions = 0;
};

/// Globally adaptive 15-point Gauss-Kronrod quadrature on [a, b].
/// Throws QuadratureError when the subdivision cap is hit before the
/// requested tolerance is met.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts = {});

/// Convenience wrapper returning the value only.
double integral(const std::function<double(double)>& f, double a, double b,
                const Options& opts = {});

/// ∫_p^q z^e h(z) dz for e > -1 and 0 <= p < q, with the algebraic
/// singularity at the origin absorbed by the substitution w = z^(e+1).
double integrate_power_weight(const std::function<double(double)>& h, double e, double p,
                              double q, const Options& opts = {});

/// ∫_p^q z^e dz in closed form (0 < p <= q, or p = 0 with e > -1).
/// Returns +inf when the integral diverges at 0.
double power_integral(double e, double p, double q);

}  // namespace jumpsupport::quad
