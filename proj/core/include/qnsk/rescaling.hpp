#pragma once

#include <utility>

#include "qnsk/spectral_field.hpp"
#include "qnsk/tau_ode.hpp"

namespace qnsk {

enum class Formulation { self_similar, original };

/// (sqrt R, Lambda = sqrt R U) at time t.
struct FluidState {
    double t = 0.0;
    Grid grid;
    ScalarField sqrtR;
    VectorField Lambda;
    Formulation formulation = Formulation::self_similar;
    double mass_ratio = 1.0;

    FluidState() = default;
    explicit FluidState(const Grid& g) : grid(g), sqrtR(g), Lambda(g) {}

    ScalarField density() const;
    /// Lambda / sqrt R on the support, 0 elsewhere.
    VectorField velocity() const;
    double mass() const { return integrate(density()); }
};

struct WaveFunction {
    double t = 0.0;
    Grid grid;
    ScalarField re, im;
    double epsilon = 1.0;

    WaveFunction() = default;
    WaveFunction(const Grid& g, double eps) : grid(g), re(g), im(g), epsilon(eps) {}
    double mass() const;
};

/// Support threshold of the polar factor: |psi| > kVacuumFloor * max |psi|.
constexpr double kVacuumFloor = 1e-12;

/// Quadrature value of \int e^{-|y|^2} on the grid (close to pi^{d/2}).
double gaussian_mass(const Grid& g);
/// e^{-|y|^2} scaled to carry `mass` on the grid.
ScalarField mass_matched_gaussian(const Grid& g, double mass);

/// rho, u live on [-L, L]^d with L = ell * tau; the result lives on [-ell, ell]^d.
FluidState to_self_similar(const ScalarField& rho, const VectorField& u, TauValue tau, double rho0_mass);
std::pair<ScalarField, VectorField> from_self_similar(const FluidState& state, TauValue tau);

/// 1/2 \int (rho |u|^2 + eps^2 |grad sqrt rho|^2) + \int rho log rho.
double original_energy(const ScalarField& rho, const VectorField& u, double eps);

FluidState madelung(const WaveFunction& psi);

/// Normalized L2 residual of curl j - 2 grad sqrt(rho) ^ Lambda with j = sqrt(rho) Lambda.
double irrotationality_residual(const FluidState& state);

/// (R, M = R U) representation used by the solver.
struct HydroFields {
    ScalarField R;
    VectorField M;
};
HydroFields to_hydro(const FluidState& s);
FluidState from_hydro(const HydroFields& h, double t, double mass_ratio = 1.0);

}  // namespace qnsk
