#include "jumpsupport/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "jumpsupport/errors.hpp"

namespace jumpsupport::quad {
namespace {

// Kronrod 15-point nodes (non-negative half) and weights; Gauss 7-point
// weights sit on the odd Kronrod nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double f1 = f(c - dx);
        const double f2 = f(c + dx);
        kronrod += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
    }
    Segment s{a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
    if (!std::isfinite(s.value)) {
        throw QuadratureError("non-finite integrand on [" + std::to_string(a) + ", " +
                              std::to_string(b) + "]");
    }
    return s;
}

}  // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts) {
    if (a == b) return {};
    if (b < a) {
        auto r = integrate(f, b, a, opts);
        r.value = -r.value;
        return r;
    }
    std::priority_queue<Segment> heap;
    Segment first = gk15(f, a, b);
    double total = first.value;
    double err = first.error;
    heap.push(first);
    std::size_t subdivisions = 0;
    while (err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
        if (subdivisions >= opts.max_subdivisions) {
            throw QuadratureError("quadrature did not converge within " +
                                  std::to_string(opts.max_subdivisions) +
                                  " subdivisions (estimate " + std::to_string(total) +
                                  ", error " + std::to_string(err) + ")");
        }
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            // Interval exhausted at machine resolution; accept what we have.
            heap.push(worst);
            break;
        }
        Segment left = gk15(f, worst.a, mid);
        Segment right = gk15(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++subdivisions;
    }
    // Re-sum to shed accumulated cancellation in the running totals.
    double value = 0.0;
    double error = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    return {value, error, subdivisions};
}

double integral(const std::function<double(double)>& f, double a, double b,
                const Options& opts) {
    return integrate(f, a, b, opts).value;
}

double integrate_power_weight(const std::function<double(double)>& h, double e, double p,
                              double q, const Options& opts) {
    if (!(e > -1.0)) throw PreconditionError("integrate_power_weight: exponent must exceed -1");
    if (p < 0.0 || q < p) throw PreconditionError("integrate_power_weight: need 0 <= p <= q");
    const double k = e + 1.0;
    const double wp = std::pow(p, k);
    const double wq = std::pow(q, k);
    auto g = [&](double w) { return h(std::pow(w, 1.0 / k)) / k; };
    return integral(g, wp, wq, opts);
}

double power_integral(double e, double p, double q) {
    if (q < p) return -power_integral(e, q, p);
    if (p == q) return 0.0;
    if (p <= 0.0) {
        if (e <= -1.0) return std::numeric_limits<double>::infinity();
        return std::pow(q, e + 1.0) / (e + 1.0);
    }
    if (std::abs(e + 1.0) < 1e-14) return std::log(q / p);
    if (std::isinf(q)) {
        if (e >= -1.0) return std::numeric_limits<double>::infinity();
        return -std::pow(p, e + 1.0) / (e + 1.0);
    }
    // expm1 form keeps precision when p and q are close.
    const double k = e + 1.0;
    return std::pow(p, k) * std::expm1(k * std::log(q / p)) / k;
}

}  // namespace jumpsupport::quad
