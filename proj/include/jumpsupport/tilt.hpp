#pragma once

#include <vector>

#include "jumpsupport/levy.hpp"
#include "jumpsupport/sde.hpp"

namespace jumpsupport::skeleton {
class ControlFunction;
}

namespace jumpsupport::tilt {

/// c · sign(ℓ·u) on the shell inner < |u| < outer.
struct TiltTerm {
    Vector dir;
    double coef = 0.0;
    double inner = 0.0;
    double outer = 0.0;
};

struct TiltPiece {
    std::vector<TiltTerm> terms;
    double zeta = 0.0;  // inner radius of the support annulus
    double eta = 0.0;   // outer radius

    double value(const Vector& u) const;
    /// Upper bound on sup|g| (sums |c| over overlapping shells).
    double sup_bound() const;
    /// ∫ g dμ
    double mean(const levy::LevyModel& model) const;
    /// ∫ (u - u_L) g dμ in closed form.
    Vector matching_integral(const levy::LevyModel& model, const levy::IntegrabilitySubspace& L) const;
};

/// Piecewise-constant-in-time tilt; piece i acts on [breakpoints[i], breakpoints[i+1]).
class TiltFunction {
public:
    TiltFunction(std::vector<double> breakpoints, std::vector<TiltPiece> pieces);
    static TiltFunction zero(double eta, double zeta);

    double operator()(double t, const Vector& u) const { return pieces_[piece_at(t)].value(u); }
    std::size_t piece_at(double t) const;
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<TiltPiece>& pieces() const { return pieces_; }
    double eta() const { return pieces_.front().eta; }
    /// Smallest inner radius over pieces.
    double inner_radius() const;
    double sup_bound() const;

private:
    std::vector<double> breakpoints_;
    std::vector<TiltPiece> pieces_;
};

struct SolveOptions {
    double min_zeta = 1e-12;
    double rcond_floor = 1e-10;
    /// Relative tolerance for the quadrature check of the matching identity.
    double verify_tol = 1e-6;
};

struct TiltSolution {
    TiltPiece piece;
    /// |quadrature ∫(u-u_L)g dμ - w| / |w|; NaN when the model admits no
    /// independent quadrature (radial, d > 2).
    double residual = 0.0;
    bool shell_split = false;
    int halvings = 0;
};

/// g(u) = Σ_j c_j sign(ℓ_j·u) 1{ζ<|u|<η} with ∫(u-u_L) g dμ = w.
TiltSolution solve_tilt(const levy::LevyModel& model, const levy::IntegrabilitySubspace& L, const Vector& w,
                        double eta, const SolveOptions& opts = {});

/// Per control piece, the tilt whose matching integral is f + υ_η.
TiltFunction control_to_tilt(const skeleton::ControlFunction& f, const levy::LevyModel& model,
                             const levy::IntegrabilitySubspace& L, double eta, const SolveOptions& opts = {});

/// log dP/dQ on [0,T] evaluated at the atoms of Q inside the tilt annulus.
double density_log(const TiltFunction& g, const std::vector<sde::TiltAtom>& atoms, double T,
                   const levy::LevyModel& model);

}  // namespace jumpsupport::tilt
