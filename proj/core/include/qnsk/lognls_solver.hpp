#pragma once

#include <string>
#include <vector>

#include "qnsk/params.hpp"
#include "qnsk/rescaling.hpp"
#include "qnsk/tau_ode.hpp"

namespace qnsk {

struct NlsParams {
    enum class Variant { original, rescaled };
    double eps = 1.0;
    /// Floor inside log(|psi|^2 + mu); negative selects 1e-12 max |psi0|^2.
    double mu = -1.0;
    double dt = 1e-3;
    Variant variant = Variant::rescaled;

    void validate() const;
};

/// exp(-i eps h |k|^2 / (2 tau^2)) applied in coefficient space (free flow over time h).
void nls_kinetic_substep(WaveFunction& psi, double h, double tau);
/// Exact pointwise flow of i eps psi_t = V psi over time h; |psi| is invariant.
void nls_potential_substep(WaveFunction& psi, double mu, double h, bool confine);

/// Strang step: kinetic half, potential full, kinetic half; tau frozen at the step midpoint.
WaveFunction nls_step(const WaveFunction& psi, const NlsParams& p, double mu, TauValue tau_mid);
WaveFunction nls_step(const WaveFunction& psi, const NlsParams& p, double mu, const TauSolution& tau);

/// mu actually used for initial data psi0.
double resolve_mu(const NlsParams& p, const WaveFunction& psi0);

/// (eps^2/2 tau^2)|grad psi|^2 + \int F(|psi|^2) [+ \int |y|^2 |psi|^2 for the rescaled variant],
/// F(r) = (r + mu) log(r + mu) - mu log mu.
double nls_energy(const WaveFunction& psi, const NlsParams& p, double mu, TauValue tau);
/// (eps^2 tau' / tau^3) |grad psi|^2; zero for the original variant.
double nls_dissipation(const WaveFunction& psi, const NlsParams& p, TauValue tau);
/// |grad psi|^2 by Parseval.
double grad_norm_sq(const WaveFunction& psi);

struct NlsSample {
    double t = 0.0;
    double mass = 0.0;
    double energy = 0.0;
    double dissipation = 0.0;
};

struct NlsTrajectory {
    std::vector<NlsSample> samples;
    WaveFunction final_state;
    double mu = 0.0;
    double max_step_mass_drift = 0.0;  ///< max over steps of |mass change| / mass
};

/// Integrates to t_end with fixed dt (the last step shortened); samples every step.
NlsTrajectory nls_run(const WaveFunction& psi0, const NlsParams& p, double t_end, const TauSolution& tau);
NlsTrajectory nls_run(const WaveFunction& psi0, const NlsParams& p, double t_end);

/// |E(T) + \int D - E(0)| / |E(0)| with trapezoidal time quadrature.
double psi_dissipation_identity(const std::vector<NlsSample>& samples);

/// theta(t) = d \int_0^t log tau - t log(mass_ratio), mass_ratio = |rho0|_1 / |Gamma|_1.
double nls_theta(const TauSolution& tau, double t, int d, double mass_ratio);
/// Psi(0) = psi0 (|Gamma|_1 / |rho0|_1)^{1/2}.
WaveFunction rescaled_initial(const WaveFunction& psi0, double gamma_mass);
/// psi(t, x) on the grid of half-width ell * tau from the rescaled Psi(t, .).
WaveFunction to_original(const WaveFunction& Psi, TauValue tau, double theta, double mass_ratio);

struct CrosscheckPolicy {
    double dt = 1e-3;          ///< log-NLS step and hydro step cap
    double delta_stab = 1e-4;  ///< parabolic stabilization of the hydro run
    double c_cfl = 0.4;
};

struct CrosscheckReport {
    bool ok = true;
    std::string status = "completed";
    double difference = 0.0;  ///< |R_nls - R_hydro|_2 / |R_nls|_2 at t_end
    double mass_nls = 0.0;
    double mass_hydro = 0.0;
    double mass_initial = 0.0;
};

/// Runs both solvers from the Madelung image of the rescaled psi0 (nu = 0).
CrosscheckReport nls_to_hydro_crosscheck(const WaveFunction& psi0, double t_end, const CrosscheckPolicy& policy);

}  // namespace qnsk
