#include "jumpsupport/levy.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "jumpsupport/errors.hpp"

namespace jumpsupport::levy {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

/// |S^{d-1}|
double sphere_area(int d) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

/// ∫_{S^{d-1}} |θ_1| dσ(θ)
double sphere_abs_coordinate(int d) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * (d - 1)) / std::tgamma(0.5 * (d + 1));
}

/// A one-dimensional piece of the support, parametrized by z > 0 with
/// density scale·z^{-1-α} dz. Linear: u = z·dir. Curve: u = sign·(z, z^γ).
struct Ray {
    bool curve = false;
    Vector dir;
    double sign = 1.0;
    double alpha = 1.0;
    double scale = 1.0;
    double gamma = 1.0;
    double zmax = kInf;

    Vector point(double z) const {
        if (!curve) return z * dir;
        Vector u(2);
        u << sign * z, sign * std::pow(z, gamma);
        return u;
    }
    double radius(double z) const {
        if (!curve) return z;
        return std::hypot(z, std::pow(z, gamma));
    }
    /// Parameter interval covered by the radial window [lo, hi].
    std::pair<double, double> window(double lo, double hi, const LevyModel& m) const {
        auto param = [&](double r) {
            if (r <= 0.0) return 0.0;
            if (std::isinf(r)) return kInf;
            return curve ? m.curve_parameter(r) : r;
        };
        const double z1 = std::min(param(lo), zmax);
        const double z2 = std::min(param(hi), zmax);
        return {z1, std::max(z1, z2)};
    }
    /// scale·∫_{z1}^{z2} z^{e} z^{-1-α} dz
    double power(double e, double z1, double z2) const {
        return scale * quad::power_integral(e - 1.0 - alpha, z1, z2);
    }
};

std::vector<Ray> rays_of(const LevyModel& model) {
    std::vector<Ray> rays;
    const int d = model.dim();
    std::visit(
        [&](const auto& v) {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, CylindricalStable>) {
                for (int i = 0; i < d; ++i) {
                    for (double s : {1.0, -1.0}) {
                        Ray r;
                        r.dir = Vector::Zero(d);
                        r.dir[i] = s;
                        r.alpha = v.alpha[i];
                        r.scale = v.scale[i];
                        rays.push_back(r);
                    }
                }
            } else if constexpr (std::is_same_v<T, RadialStable>) {
                if (v.dim == 1) {
                    for (double s : {1.0, -1.0}) {
                        Ray r;
                        r.dir = Vector::Constant(1, s);
                        r.alpha = v.alpha;
                        r.scale = v.scale;
                        rays.push_back(r);
                    }
                }
            } else if constexpr (std::is_same_v<T, CurveImage>) {
                for (double s : {1.0, -1.0}) {
                    Ray r;
                    r.curve = true;
                    r.sign = s;
                    r.alpha = v.alpha;
                    r.scale = v.scale;
                    r.gamma = v.gamma;
                    rays.push_back(r);
                }
            } else if constexpr (std::is_same_v<T, OneSidedStable1D>) {
                Ray r;
                r.dir = Vector::Ones(1);
                r.alpha = v.alpha;
                r.scale = v.scale;
                r.zmax = 1.0;
                rays.push_back(r);
            }
        },
        model.variant());
    return rays;
}

const RadialStable* as_multi_radial(const LevyModel& m) {
    const auto* r = std::get_if<RadialStable>(&m.variant());
    return (r && r->dim >= 2) ? r : nullptr;
}

/// Parameters z on a curve ray where ℓ·u(z) changes sign.
std::vector<double> curve_crossings(const Ray& ray, const Matrix& dirs) {
    std::vector<double> out;
    for (Eigen::Index j = 0; j < dirs.cols(); ++j) {
        const double a = dirs(0, j);
        const double b = dirs(1, j);
        // a z + b z^γ = 0  ⇔  z^{γ-1} = -a/b
        if (b != 0.0 && -a / b > 0.0) out.push_back(std::pow(-a / b, 1.0 / (ray.gamma - 1.0)));
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Splits [z1, z2] at the given interior points.
std::vector<std::pair<double, double>> split(double z1, double z2, const std::vector<double>& pts) {
    std::vector<std::pair<double, double>> segs;
    double a = z1;
    for (double p : pts) {
        if (p > a && p < z2) {
            segs.emplace_back(a, p);
            a = p;
        }
    }
    if (z2 > a) segs.emplace_back(a, z2);
    return segs;
}

double segment_midpoint(double a, double b) {
    if (std::isinf(b)) return a > 0.0 ? 2.0 * a : 1.0;
    if (a > 0.0) return std::sqrt(a * b);
    return 0.5 * b;
}

std::vector<int> sign_pattern(const Matrix& dirs, const Vector& u) {
    std::vector<int> p(static_cast<std::size_t>(dirs.cols()));
    for (Eigen::Index j = 0; j < dirs.cols(); ++j) p[static_cast<std::size_t>(j)] = sgn(dirs.col(j).dot(u));
    return p;
}

void check_orthonormal(const Matrix& dirs, const char* who) {
    if (dirs.cols() == 0) return;
    const Matrix g = dirs.transpose() * dirs;
    if (!g.isApprox(Matrix::Identity(dirs.cols(), dirs.cols()), 1e-10)) {
        throw PreconditionError(std::string(who) + ": directions must be orthonormal for a radial model");
    }
}

/// ∫ h(z) scale z^{-1-α} dz over [z1, z2] along a ray, z1 > 0, with a
/// logarithmic substitution on the bounded part and w = z^{-α} on an
/// unbounded tail.
double ray_quadrature(const std::function<double(double)>& h, double alpha, double scale,
                      double z1, double z2, const quad::Options& opts) {
    if (!(z1 > 0.0)) throw PreconditionError("ray quadrature needs a window bounded away from 0");
    if (z2 <= z1) return 0.0;
    double total = 0.0;
    double zb = z2;
    if (std::isinf(z2)) {
        zb = std::max(2.0 * z1, 1.0);
        const double wmax = std::pow(zb, -alpha);
        auto tail = [&](double w) { return w > 0.0 ? h(std::pow(w, -1.0 / alpha)) : 0.0; };
        total += scale / alpha * quad::integral(tail, 0.0, wmax, opts);
    }
    auto body = [&](double t) {
        const double z = std::exp(t);
        return h(z) * scale * std::pow(z, -alpha);
    };
    total += quad::integral(body, std::log(z1), std::log(zb), opts);
    return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// LevyModel
// ---------------------------------------------------------------------------

LevyModel::LevyModel(Variant v) : variant_(std::move(v)) {
    auto check_alpha = [](double a) {
        if (!(a > 0.0 && a < 2.0)) throw PreconditionError("stability index must lie in (0, 2)");
    };
    auto check_scale = [](double c) {
        if (!(c > 0.0) || !std::isfinite(c)) throw PreconditionError("scale must be positive");
    };
    std::visit(
        [&](auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, CylindricalStable>) {
                if (m.alpha.empty()) throw PreconditionError("cylindrical model needs at least one axis");
                if (m.scale.empty()) m.scale.assign(m.alpha.size(), 1.0);
                if (m.scale.size() != m.alpha.size())
                    throw PreconditionError("cylindrical model: alpha and scale lengths differ");
                for (double a : m.alpha) check_alpha(a);
                for (double c : m.scale) check_scale(c);
                dim_ = static_cast<int>(m.alpha.size());
            } else if constexpr (std::is_same_v<T, RadialStable>) {
                check_alpha(m.alpha);
                check_scale(m.scale);
                if (m.dim < 1) throw PreconditionError("radial model: dimension must be >= 1");
                dim_ = m.dim;
            } else if constexpr (std::is_same_v<T, CurveImage>) {
                check_alpha(m.alpha);
                check_scale(m.scale);
                if (!(m.gamma > 1.0)) throw PreconditionError("curve image: gamma must exceed 1");
                dim_ = 2;
            } else if constexpr (std::is_same_v<T, OneSidedStable1D>) {
                check_alpha(m.alpha);
                check_scale(m.scale);
                dim_ = 1;
            } else {
                if (m.atoms.empty()) throw PreconditionError("discrete model needs at least one atom");
                dim_ = static_cast<int>(m.atoms.front().u.size());
                if (dim_ < 1) throw PreconditionError("discrete atoms must have dimension >= 1");
                for (const auto& a : m.atoms) {
                    if (a.u.size() != dim_) throw PreconditionError("discrete atoms differ in dimension");
                    if (!(a.weight > 0.0)) throw PreconditionError("discrete atom weights must be positive");
                    if (a.u.norm() == 0.0) throw PreconditionError("discrete atom at the origin");
                    if (!a.u.allFinite()) throw PreconditionError("discrete atom not finite");
                }
            }
        },
        variant_);
}

LevyModel LevyModel::cylindrical(std::vector<double> alpha, std::vector<double> scale) {
    return LevyModel(CylindricalStable{std::move(alpha), std::move(scale)});
}
LevyModel LevyModel::radial(double alpha, int dim, double scale) {
    return LevyModel(RadialStable{alpha, scale, dim});
}
LevyModel LevyModel::curve(double alpha, double gamma, double scale) {
    return LevyModel(CurveImage{alpha, gamma, scale});
}
LevyModel LevyModel::one_sided(double alpha, double scale) {
    return LevyModel(OneSidedStable1D{alpha, scale});
}
LevyModel LevyModel::discrete(std::vector<Atom> atoms) { return LevyModel(Discrete{std::move(atoms)}); }

std::string LevyModel::variant_name() const {
    switch (variant_.index()) {
        case 0: return "cylindrical_stable";
        case 1: return "radial_stable";
        case 2: return "curve_image";
        case 3: return "one_sided_stable_1d";
        default: return "discrete";
    }
}

double LevyModel::max_stability_index() const {
    return std::visit(
        [](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, CylindricalStable>)
                return *std::max_element(m.alpha.begin(), m.alpha.end());
            else if constexpr (std::is_same_v<T, Discrete>)
                return 0.0;
            else
                return m.alpha;
        },
        variant_);
}

bool LevyModel::is_symmetric() const {
    if (std::holds_alternative<OneSidedStable1D>(variant_)) return false;
    if (const auto* d = std::get_if<Discrete>(&variant_)) {
        // every atom must have a mirror image of equal weight
        for (const auto& a : d->atoms) {
            double w = 0.0;
            double wm = 0.0;
            for (const auto& b : d->atoms) {
                if ((b.u - a.u).norm() == 0.0) w += b.weight;
                if ((b.u + a.u).norm() == 0.0) wm += b.weight;
            }
            if (w != wm) return false;
        }
    }
    return true;
}

double LevyModel::curve_parameter(double radius) const {
    const auto* c = std::get_if<CurveImage>(&variant_);
    if (!c) throw PreconditionError("curve_parameter: model is not a curve image");
    if (radius <= 0.0) return 0.0;
    if (std::isinf(radius)) return kInf;
    const double g = c->gamma;
    const double target = 2.0 * std::log(radius);
    // f(t) = log(e^{2t} + e^{2γt}) is strictly increasing with slope in [2, 2γ].
    double t = std::min(std::log(radius), std::log(radius) / g);
    for (int it = 0; it < 100; ++it) {
        const double a = 2.0 * t;
        const double b = 2.0 * g * t;
        const double hi = std::max(a, b);
        const double f = hi + std::log1p(std::exp(std::min(a, b) - hi));
        const double wa = std::exp(a - f);
        const double wb = std::exp(b - f);
        const double fp = 2.0 * wa + 2.0 * g * wb;
        const double step = (f - target) / fp;
        t -= step;
        if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(t))) break;
    }
    return std::exp(t);
}

double LevyModel::radial_moment(double p, const Range& r) const {
    if (r.hi <= r.lo && !(r.include_lo && r.include_hi && r.hi == r.lo)) return 0.0;
    if (const auto* d = std::get_if<Discrete>(&variant_)) {
        double s = 0.0;
        for (const auto& a : d->atoms) {
            const double n = a.u.norm();
            if (r.contains(n)) s += a.weight * (p == 0.0 ? 1.0 : std::pow(n, p));
        }
        return s;
    }
    if (r.hi <= r.lo) return 0.0;
    const double alpha = max_stability_index();
    if (r.lo <= 0.0 && p <= alpha) {
        std::ostringstream os;
        os << "∫|u|^" << p << " μ(du) diverges at the origin for " << variant_name();
        if (const auto* c = std::get_if<CylindricalStable>(&variant_)) {
            for (std::size_t i = 0; i < c->alpha.size(); ++i)
                if (p <= c->alpha[i]) {
                    os << " along axis e" << (i + 1) << " (alpha=" << c->alpha[i] << ")";
                    break;
                }
        } else if (std::holds_alternative<RadialStable>(variant_)) {
            os << " in every direction (alpha=" << alpha << ")";
        } else if (std::holds_alternative<CurveImage>(variant_)) {
            os << " along e1, the curve tangent at the origin (alpha=" << alpha << ")";
        } else {
            os << " along e1 (alpha=" << alpha << ")";
        }
        throw DivergenceError(os.str());
    }
    if (const auto* rad = as_multi_radial(*this)) {
        const double v = quad::power_integral(p - 1.0 - rad->alpha, r.lo, r.hi);
        if (std::isinf(v)) throw DivergenceError("radial moment diverges at infinity");
        return rad->scale * sphere_area(rad->dim) * v;
    }
    double total = 0.0;
    for (const auto& ray : rays_of(*this)) {
        const auto [z1, z2] = ray.window(r.lo, r.hi, *this);
        if (z2 <= z1) continue;
        double v = 0.0;
        if (!ray.curve || p == 0.0) {
            v = ray.power(p, z1, z2);
        } else if (p == 2.0) {
            v = ray.power(2.0, z1, z2) + ray.power(2.0 * ray.gamma, z1, z2);
        } else {
            if (std::isinf(z2) && ray.gamma * p >= ray.alpha)
                throw DivergenceError("curve-image moment diverges at infinity");
            const double g = ray.gamma;
            if (z1 <= 0.0) {
                // z^{p-1-α} (1 + z^{2γ-2})^{p/2}
                auto h = [&](double z) { return std::pow(1.0 + std::pow(z, 2.0 * g - 2.0), 0.5 * p); };
                double upper = z2;
                if (std::isinf(z2)) upper = 1.0;
                v = ray.scale * quad::integrate_power_weight(h, p - 1.0 - ray.alpha, 0.0, upper);
                if (std::isinf(z2)) {
                    auto hr = [&](double z) { return std::pow(ray.radius(z), p); };
                    v += ray_quadrature(hr, ray.alpha, ray.scale, 1.0, kInf, {});
                }
            } else {
                auto hr = [&](double z) { return std::pow(ray.radius(z), p); };
                v = ray_quadrature(hr, ray.alpha, ray.scale, z1, z2, {});
            }
        }
        if (std::isinf(v)) throw DivergenceError("moment diverges for " + variant_name());
        total += v;
    }
    return total;
}

Vector LevyModel::first_moment(const Range& r) const {
    Vector m = Vector::Zero(dim_);
    if (const auto* d = std::get_if<Discrete>(&variant_)) {
        for (const auto& a : d->atoms)
            if (r.contains(a.u.norm())) m += a.weight * a.u;
        return m;
    }
    if (is_symmetric() || r.hi <= r.lo) return m;
    for (const auto& ray : rays_of(*this)) {
        const auto [z1, z2] = ray.window(r.lo, r.hi, *this);
        if (z2 <= z1) continue;
        const double v = ray.power(1.0, z1, z2);
        if (std::isinf(v)) throw DivergenceError("first moment diverges for " + variant_name());
        m += v * ray.dir;
    }
    return m;
}

Matrix LevyModel::second_moment(const Range& r) const {
    Matrix s = Matrix::Zero(dim_, dim_);
    if (const auto* d = std::get_if<Discrete>(&variant_)) {
        for (const auto& a : d->atoms)
            if (r.contains(a.u.norm())) s += a.weight * a.u * a.u.transpose();
        return s;
    }
    if (r.hi <= r.lo) return s;
    if (as_multi_radial(*this)) {
        return Matrix::Identity(dim_, dim_) * (radial_moment(2.0, r) / dim_);
    }
    for (const auto& ray : rays_of(*this)) {
        const auto [z1, z2] = ray.window(r.lo, r.hi, *this);
        if (z2 <= z1) continue;
        if (!ray.curve) {
            s += ray.power(2.0, z1, z2) * ray.dir * ray.dir.transpose();
        } else {
            const double a = ray.power(2.0, z1, z2);
            const double b = ray.power(1.0 + ray.gamma, z1, z2);
            const double c = ray.power(2.0 * ray.gamma, z1, z2);
            s(0, 0) += a;
            s(0, 1) += b;
            s(1, 0) += b;
            s(1, 1) += c;
        }
    }
    if (!s.allFinite()) throw DivergenceError("second moment diverges for " + variant_name());
    return s;
}

Matrix LevyModel::sign_moment(const Matrix& dirs, const Range& r) const {
    const Eigen::Index k = dirs.cols();
    if (k > 0 && dirs.rows() != dim_) throw PreconditionError("sign_moment: direction dimension mismatch");
    Matrix M = Matrix::Zero(k, k);
    if (k == 0) return M;
    if (const auto* d = std::get_if<Discrete>(&variant_)) {
        for (const auto& a : d->atoms) {
            if (!r.contains(a.u.norm())) continue;
            for (Eigen::Index i = 0; i < k; ++i)
                for (Eigen::Index j = 0; j < k; ++j)
                    M(i, j) += a.weight * dirs.col(i).dot(a.u) * sgn(dirs.col(j).dot(a.u));
        }
        return M;
    }
    if (r.hi <= r.lo) return M;
    if (const auto* rad = as_multi_radial(*this)) {
        check_orthonormal(dirs, "sign_moment");
        const double v = quad::power_integral(-rad->alpha, r.lo, r.hi);
        if (std::isinf(v)) throw DivergenceError("sign moment diverges for radial model");
        return Matrix::Identity(k, k) * (rad->scale * sphere_abs_coordinate(rad->dim) * v);
    }
    for (const auto& ray : rays_of(*this)) {
        const auto [z1, z2] = ray.window(r.lo, r.hi, *this);
        if (z2 <= z1) continue;
        if (!ray.curve) {
            const double v = ray.power(1.0, z1, z2);
            for (Eigen::Index i = 0; i < k; ++i) {
                const double li = dirs.col(i).dot(ray.dir);
                if (li == 0.0) continue;
                for (Eigen::Index j = 0; j < k; ++j) {
                    const int sj = sgn(dirs.col(j).dot(ray.dir));
                    if (sj != 0) {
                        if (std::isinf(v)) throw DivergenceError("sign moment diverges");
                        M(i, j) += li * sj * v;
                    }
                }
            }
        } else {
            for (const auto& [a, b] : split(z1, z2, curve_crossings(ray, dirs))) {
                const Vector mid = ray.point(segment_midpoint(a, b));
                const double m1 = ray.power(1.0, a, b);
                const double mg = ray.power(ray.gamma, a, b);
                for (Eigen::Index j = 0; j < k; ++j) {
                    const int sj = sgn(dirs.col(j).dot(mid));
                    if (sj == 0) continue;
                    for (Eigen::Index i = 0; i < k; ++i) {
                        const double v = ray.sign * (dirs(0, i) * m1 + dirs(1, i) * mg);
                        M(i, j) += sj * v;
                    }
                }
            }
        }
    }
    if (!M.allFinite()) throw DivergenceError("sign moment diverges for " + variant_name());
    return M;
}

std::vector<SignCell> LevyModel::sign_cells(const Matrix& dirs, const Range& r) const {
    const Eigen::Index k = dirs.cols();
    if (k > 0 && dirs.rows() != dim_) throw PreconditionError("sign_cells: direction dimension mismatch");
    std::map<std::vector<int>, double> cells;
    if (const auto* d = std::get_if<Discrete>(&variant_)) {
        for (const auto& a : d->atoms)
            if (r.contains(a.u.norm())) cells[sign_pattern(dirs, a.u)] += a.weight;
    } else if (r.hi > r.lo) {
        if (as_multi_radial(*this)) {
            check_orthonormal(dirs, "sign_cells");
            const double m = mass(r);
            const auto n = std::size_t{1} << k;
            for (std::size_t bits = 0; bits < n; ++bits) {
                std::vector<int> p(static_cast<std::size_t>(k));
                for (Eigen::Index j = 0; j < k; ++j) p[static_cast<std::size_t>(j)] = (bits >> j) & 1 ? 1 : -1;
                cells[p] += m / static_cast<double>(n);
            }
        } else {
            for (const auto& ray : rays_of(*this)) {
                const auto [z1, z2] = ray.window(r.lo, r.hi, *this);
                if (z2 <= z1) continue;
                const auto pts = ray.curve ? curve_crossings(ray, dirs) : std::vector<double>{};
                for (const auto& [a, b] : split(z1, z2, pts)) {
                    const double m = ray.power(0.0, a, b);
                    if (std::isinf(m)) throw DivergenceError("sign cell mass diverges; bound the window away from 0");
                    cells[sign_pattern(dirs, ray.point(segment_midpoint(a, b)))] += m;
                }
            }
        }
    }
    std::vector<SignCell> out;
    out.reserve(cells.size());
    for (auto& [p, m] : cells) out.push_back({p, m});
    return out;
}

double LevyModel::integrate(const std::function<double(const Vector&)>& F, const Range& r,
                            const Matrix& sign_dirs, const quad::Options& opts) const {
    if (const auto* d = std::get_if<Discrete>(&variant_)) {
        double s = 0.0;
        for (const auto& a : d->atoms)
            if (r.contains(a.u.norm())) s += a.weight * F(a.u);
        return s;
    }
    if (!(r.lo > 0.0)) throw PreconditionError("integrate: window must be bounded away from the origin");
    if (r.hi <= r.lo) return 0.0;
    if (const auto* rad = as_multi_radial(*this)) {
        if (rad->dim > 2) throw NotAnalyzableError("quadrature backend supports radial models up to dimension 2");
        std::vector<double> cuts;
        for (Eigen::Index j = 0; j < sign_dirs.cols(); ++j) {
            const double base = std::atan2(sign_dirs(1, j), sign_dirs(0, j)) + 0.5 * std::numbers::pi;
            for (double th : {base, base + std::numbers::pi}) {
                double t = std::fmod(th, 2.0 * std::numbers::pi);
                if (t < 0.0) t += 2.0 * std::numbers::pi;
                cuts.push_back(t);
            }
        }
        std::sort(cuts.begin(), cuts.end());
        auto inner = [&](double theta) {
            Vector dir(2);
            dir << std::cos(theta), std::sin(theta);
            auto h = [&](double z) { return F(z * dir); };
            return ray_quadrature(h, rad->alpha, rad->scale, r.lo, r.hi, opts);
        };
        double total = 0.0;
        for (const auto& [a, b] : split(0.0, 2.0 * std::numbers::pi, cuts))
            total += quad::integral(inner, a, b, opts);
        return total;
    }
    double total = 0.0;
    for (const auto& ray : rays_of(*this)) {
        const auto [z1, z2] = ray.window(r.lo, r.hi, *this);
        if (z2 <= z1) continue;
        const auto pts = ray.curve ? curve_crossings(ray, sign_dirs) : std::vector<double>{};
        for (const auto& [a, b] : split(z1, z2, pts)) {
            auto h = [&](double z) { return F(ray.point(z)); };
            total += ray_quadrature(h, ray.alpha, ray.scale, a, b, opts);
        }
    }
    return total;
}

Vector LevyModel::sample(const Range& r, Stream& rng) const { return WindowSampler(*this, r).draw(rng); }

std::optional<std::vector<Vector>> LevyModel::small_jump_directions(double radius) const {
    if (as_multi_radial(*this)) return std::nullopt;
    std::vector<Vector> dirs;
    if (const auto* d = std::get_if<Discrete>(&variant_)) {
        for (const auto& a : d->atoms)
            if (a.u.norm() < radius) dirs.push_back(a.u.normalized());
        return dirs;
    }
    for (const auto& ray : rays_of(*this)) {
        if (!ray.curve) {
            dirs.push_back(ray.dir);
            continue;
        }
        const double zr = curve_parameter(radius);
        for (int k = 0; k < 24; ++k) dirs.push_back(ray.point(zr * std::ldexp(1.0, -k)).normalized());
    }
    return dirs;
}

double LevyModel::levy_integral() const {
    return radial_moment(2.0, Range::unit_ball()) + mass({1.0, kInf, false, false});
}

// ---------------------------------------------------------------------------
// WindowSampler
// ---------------------------------------------------------------------------

WindowSampler::WindowSampler(const LevyModel& model, const Range& window) {
    auto push = [&](Component c, double m) {
        if (!(m > 0.0)) return;
        mass_ += m;
        c.cumulative = mass_;
        components_.push_back(std::move(c));
    };
    if (const auto* d = std::get_if<Discrete>(&model.variant())) {
        for (const auto& a : d->atoms) {
            if (!window.contains(a.u.norm())) continue;
            Component c{Kind::Atom, 0.0, a.u};
            push(std::move(c), a.weight);
        }
        return;
    }
    if (!(window.lo > 0.0)) throw PreconditionError("WindowSampler: window must exclude the origin");
    if (window.hi <= window.lo) return;
    if (const auto* rad = as_multi_radial(model)) {
        Component c{Kind::Radial, 0.0, Vector()};
        c.alpha = rad->alpha;
        c.dim = rad->dim;
        c.lo_pow = std::pow(window.lo, -rad->alpha);
        c.hi_pow = std::isinf(window.hi) ? 0.0 : std::pow(window.hi, -rad->alpha);
        push(std::move(c), model.mass(window));
        return;
    }
    for (const auto& ray : rays_of(model)) {
        const auto [z1, z2] = ray.window(window.lo, window.hi, model);
        if (z2 <= z1) continue;
        Component c{ray.curve ? Kind::Curve : Kind::Linear, 0.0, ray.dir};
        c.sign = ray.sign;
        c.alpha = ray.alpha;
        c.gamma = ray.gamma;
        c.lo_pow = std::pow(z1, -ray.alpha);
        c.hi_pow = std::isinf(z2) ? 0.0 : std::pow(z2, -ray.alpha);
        push(std::move(c), ray.power(0.0, z1, z2));
    }
}

Vector WindowSampler::draw(Stream& rng) const {
    if (components_.empty()) throw PreconditionError("WindowSampler: window carries no mass");
    const double pick = rng.uniform() * mass_;
    auto it = std::upper_bound(components_.begin(), components_.end(), pick,
                               [](double v, const Component& c) { return v < c.cumulative; });
    if (it == components_.end()) --it;
    const Component& c = *it;
    if (c.kind == Kind::Atom) return c.dir;
    const double v = rng.uniform_open_left();
    // inverse CDF of z^{-1-α} on [z_lo, z_hi]
    const double z = std::pow(c.lo_pow - (1.0 - v) * (c.lo_pow - c.hi_pow), -1.0 / c.alpha);
    switch (c.kind) {
        case Kind::Linear: return z * c.dir;
        case Kind::Curve: {
            Vector u(2);
            u << c.sign * z, c.sign * std::pow(z, c.gamma);
            return u;
        }
        default: {
            Vector dir = rng.normal_vector(c.dim);
            double n = dir.norm();
            while (n == 0.0) {
                dir = rng.normal_vector(c.dim);
                n = dir.norm();
            }
            return z * dir / n;
        }
    }
}

// ---------------------------------------------------------------------------
// Integrability subspace
// ---------------------------------------------------------------------------

IntegrabilitySubspace::IntegrabilitySubspace(Matrix basis, int dim) : basis_(std::move(basis)), dim_(dim) {
    if (basis_.cols() == 0) basis_.resize(dim, 0);
    if (basis_.rows() != dim) throw PreconditionError("integrability subspace: basis dimension mismatch");
    const Matrix g = basis_.transpose() * basis_;
    if (basis_.cols() > 0 &&
        (g - Matrix::Identity(basis_.cols(), basis_.cols())).cwiseAbs().maxCoeff() > 1e-12)
        throw PreconditionError("integrability subspace: basis must be orthonormal");
    std::vector<Vector> comp;
    for (int i = 0; i < dim && static_cast<Eigen::Index>(comp.size()) < dim - basis_.cols(); ++i) {
        Vector r = Vector::Unit(dim, i);
        for (int pass = 0; pass < 2; ++pass) {
            r -= basis_ * (basis_.transpose() * r);
            for (const auto& c : comp) r -= c.dot(r) * c;
        }
        if (r.norm() > 1e-8) comp.push_back(r.normalized());
    }
    complement_.resize(dim, static_cast<Eigen::Index>(comp.size()));
    for (std::size_t j = 0; j < comp.size(); ++j) complement_.col(static_cast<Eigen::Index>(j)) = comp[j];
}

Vector IntegrabilitySubspace::project(const Vector& u) const {
    if (u.size() != dim_) throw PreconditionError("projection: dimension mismatch");
    return basis_ * (basis_.transpose() * u);
}

IntegrabilitySubspace integrability_subspace(const LevyModel& model) {
    const int d = model.dim();
    std::vector<int> axes;
    bool full = false;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, CylindricalStable>) {
                // axis i integrable iff ∫_0^1 z·z^{-1-α_i} dz < ∞ iff α_i < 1
                for (int i = 0; i < d; ++i)
                    if (m.alpha[i] < 1.0) axes.push_back(i);
            } else if constexpr (std::is_same_v<T, RadialStable>) {
                full = m.alpha < 1.0;
            } else if constexpr (std::is_same_v<T, CurveImage>) {
                // ℓ = (a, b): |a z + b z^γ| z^{-1-α}; a ≠ 0 needs α < 1, a = 0 needs γ > α
                if (m.alpha < 1.0)
                    full = true;
                else if (m.gamma > m.alpha)
                    axes.push_back(1);
            } else if constexpr (std::is_same_v<T, OneSidedStable1D>) {
                full = m.alpha < 1.0;
            } else if constexpr (std::is_same_v<T, Discrete>) {
                full = true;
            } else {
                throw NotAnalyzableError("integrability subspace not analyzable for this variant");
            }
        },
        model.variant());
    if (full) return IntegrabilitySubspace(Matrix::Identity(d, d), d);
    Matrix b(d, static_cast<Eigen::Index>(axes.size()));
    for (std::size_t j = 0; j < axes.size(); ++j) b.col(static_cast<Eigen::Index>(j)) = Vector::Unit(d, axes[j]);
    return IntegrabilitySubspace(b, d);
}

Vector project_onto_L(const Vector& u, const IntegrabilitySubspace& L) { return L.project(u); }

double beta_moment(const LevyModel& model, double beta) {
    if (!(beta > 0.0)) throw PreconditionError("beta_moment: beta must be positive");
    return model.radial_moment(beta, Range::unit_ball());
}

Vector integrable_mean(const LevyModel& model, const IntegrabilitySubspace& L, const Range& r) {
    if (L.is_trivial()) return Vector::Zero(model.dim());
    if (model.is_symmetric()) return Vector::Zero(model.dim());
    return L.project(model.first_moment(r));
}

Vector upsilon_eta(const LevyModel& model, const IntegrabilitySubspace& L, double eta) {
    if (!(eta > 0.0 && eta <= 1.0)) throw PreconditionError("upsilon_eta: eta must lie in (0, 1]");
    if (L.dim() != model.dim()) throw PreconditionError("upsilon_eta: subspace dimension mismatch");
    const Vector m = model.first_moment(Range::shift_window(eta));
    const Vector v = m - L.project(m);
    if (L.project(v).norm() > 1e-10 * std::max(1.0, v.norm()))
        throw NumericalError("upsilon_eta: result left L-perp");
    return v;
}

double tail_mass(const LevyModel& model, double eta) {
    if (!(eta > 0.0)) throw PreconditionError("tail_mass: eta must be positive");
    return model.mass(Range::tail(eta));
}

std::vector<TimedJump> sample_large_jumps(const LevyModel& model, double eta, double T, Stream& rng) {
    if (!(eta > 0.0) || !(T > 0.0)) throw PreconditionError("sample_large_jumps: eta and T must be positive");
    const WindowSampler sampler(model, Range::tail(eta));
    std::vector<TimedJump> jumps;
    const auto n = rng.poisson(T * sampler.mass());
    if (n == 0) return jumps;
    std::vector<double> times(n);
    for (auto& t : times) t = T * rng.uniform();
    std::sort(times.begin(), times.end());
    jumps.reserve(n);
    for (double t : times) jumps.push_back({t, sampler.draw(rng)});
    return jumps;
}

// ---------------------------------------------------------------------------
// Small jumps
// ---------------------------------------------------------------------------

namespace {

double choose_inner_cut(const LevyModel& model, double eta, const SmallJumpConfig& cfg) {
    if (model.is_discrete()) return 0.0;
    auto variance = [&](double z) { return model.radial_moment(2.0, {0.0, z, false, true}); };
    auto rate = [&](double z) { return model.mass({z, eta, false, false}); };
    // Largest ζ with variance(ζ) <= tol (variance increasing in ζ).
    double zeta_var;
    if (variance(eta) <= cfg.tol_var_rate) {
        zeta_var = eta;
    } else {
        double lo = -700.0;
        double hi = std::log(eta);
        for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
            const double mid = 0.5 * (lo + hi);
            (variance(std::exp(mid)) <= cfg.tol_var_rate ? lo : hi) = mid;
        }
        zeta_var = std::exp(lo);
    }
    // Smallest ζ with rate(ζ) <= max_rate (rate decreasing in ζ).
    double zeta_rate = 0.0;
    if (rate(zeta_var) > cfg.max_rate) {
        double lo = std::log(zeta_var);
        double hi = std::log(eta);
        for (int i = 0; i < 200 && hi - lo > 1e-12; ++i) {
            const double mid = 0.5 * (lo + hi);
            (rate(std::exp(mid)) <= cfg.max_rate ? hi : lo) = mid;
        }
        zeta_rate = std::exp(hi);
    }
    return std::min({std::max(zeta_var, zeta_rate), cfg.max_inner, eta});
}

}  // namespace

SmallJumpSampler::SmallJumpSampler(const LevyModel& model, double eta, const SmallJumpConfig& cfg,
                                   double beta)
    : model_(model),
      window_(model, Range{choose_inner_cut(model, eta, cfg), eta, false, false}),
      eta_(eta),
      beta_(beta),
      gaussian_(cfg.gaussian_band) {
    if (!(eta > 0.0)) throw PreconditionError("small-jump sampler: eta must be positive");
    inner_ = choose_inner_cut(model, eta, cfg);
    annulus_ = Range{inner_, eta, false, false};
    rate_ = window_.mass();
    mean_ = model.first_moment(annulus_);
    pow_mean_ = beta > 0.0 ? model.radial_moment(beta, annulus_) : 0.0;
    const int d = model.dim();
    band_cov_ = inner_ > 0.0 ? model.second_moment({0.0, inner_, false, true}) : Matrix::Zero(d, d);
    Eigen::SelfAdjointEigenSolver<Matrix> es(band_cov_);
    band_chol_ = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

SmallJumpSampler::Increment SmallJumpSampler::sample(double dt, Stream& rng) const {
    Increment inc{Vector::Zero(model_.dim()), 0.0};
    if (!(dt > 0.0)) return inc;
    const auto n = rng.poisson(rate_ * dt);
    for (std::uint64_t i = 0; i < n; ++i) {
        const Vector u = window_.draw(rng);
        inc.du += u;
        if (beta_ > 0.0) inc.dpow += std::pow(u.norm(), beta_);
    }
    inc.du -= dt * mean_;
    inc.dpow -= dt * pow_mean_;
    if (gaussian_ && inner_ > 0.0) inc.du += std::sqrt(dt) * (band_chol_ * rng.normal_vector(model_.dim()));
    return inc;
}

Matrix SmallJumpSampler::total_covariance() const {
    return model_.second_moment(annulus_) + band_cov_;
}

Vector sample_small_jump_increment(const LevyModel& model, double eta, double dt, Stream& rng,
                                   const SmallJumpConfig& cfg) {
    if (!(eta > 0.0 && eta <= 1.0)) throw PreconditionError("small-jump increment: eta must lie in (0, 1]");
    return SmallJumpSampler(model, eta, cfg).sample(dt, rng).du;
}

}  // namespace jumpsupport::levy
