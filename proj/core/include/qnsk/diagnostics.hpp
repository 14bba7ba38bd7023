#pragma once

#include <array>
#include <string>
#include <vector>

#include "qnsk/params.hpp"
#include "qnsk/rescaling.hpp"

namespace qnsk {

/// Floor inside log(max(R, floor)).
constexpr double kLogFloor = 1e-30;

/// Velocity-recovery floor actually used for a state with mean density `meanR`.
double resolve_floor(const ParamSet& p, double meanR);
/// U = M / max(R, floor).
VectorField floored_velocity(const FluidState& s, double floor);

double energy(const FluidState& s, TauValue tau, double eps);
double dissipation(const FluidState& s, TauValue tau, double eps, double nu);
double bd_entropy(const FluidState& s, TauValue tau, double eps, double nu);
double bd_dissipation(const FluidState& s, TauValue tau, double eps, double nu);
double energy_reg(const FluidState& s, const ParamSet& p, TauValue tau);
double dissipation_reg(const FluidState& s, const ParamSet& p, TauValue tau);
/// 2 d delta1 / tau^2 \int R - nu tau' / tau^3 \int R Div U.
double energy_balance_rhs(const FluidState& s, const ParamSet& p, TauValue tau);
/// Positive part of the regularized BD entropy (includes -2 r0 log R on {R <= 1}).
double bd_entropy_reg(const FluidState& s, const ParamSet& p, TauValue tau);

/// Terms of the time-differentiated BD identity at one instant.
struct BdTerms {
    double bracket = 0.0;   ///< (1/tau^2) \int (nu R U.G + nu^2/2 R|G|^2 - r0 nu log R)
    double lhs_rate = 0.0;  ///< dissipation-side integrals
    double rhs_rate = 0.0;  ///< source-side integrals
    double scale = 0.0;     ///< sum of absolute values of all rate integrals
};
BdTerms bd_identity_terms(const FluidState& s, const ParamSet& p, TauValue tau);

/// Per-step sample feeding the two balance residuals.
struct BalanceSample {
    double t = 0.0;
    double energy_reg = 0.0;
    double dissipation_reg = 0.0;
    double rhs = 0.0;
    BdTerms bd;
};
BalanceSample balance_sample(const FluidState& s, const ParamSet& p, TauValue tau);

/// |E(T) - E(0) + \int (D - RHS) dt| / |E(0)| with trapezoidal time quadrature.
double energy_balance_residual(const std::vector<BalanceSample>& samples);
/// |B(T) - B(0) + \int (lhs - rhs) dt| / (|B(0)| + |B(T)| + \int scale dt); 0 when all terms vanish.
double bd_identity_residual(const std::vector<BalanceSample>& samples);

double relative_entropy(const ScalarField& R);
double csiszar_kullback_gap(const ScalarField& R);
double korteweg_identity_residual(const ScalarField& sqrtR);
double loghess_identity_residual(const ScalarField& R);

struct CompatResiduals {
    double tN = 0.0;
    double sK = 0.0;
};
CompatResiduals compatibility_residuals(const FluidState& s);

struct LlogLResult {
    double value = 0.0;
    double bound = 0.0;
    double c_beta = 0.0;  ///< constant of the weighted Hoelder step
};
LlogLResult llogl_bound(const ScalarField& f, double beta);

struct JungelQuantities {
    double left = 0.0;
    double right = 0.0;
};
JungelQuantities jungel_quantities(const ScalarField& R);

struct DiagnosticsRecord {
    double t = 0.0;
    double tau = 1.0;
    double dtau = 0.0;
    double mass = 0.0;
    std::array<double, 3> momentum{0.0, 0.0, 0.0};
    double second_moment = 0.0;
    double energy = 0.0;
    double dissipation = 0.0;
    double energy_reg = 0.0;
    double dissipation_reg = 0.0;
    double bd_entropy = 0.0;
    double bd_dissipation = 0.0;
    double bd_entropy_reg = 0.0;
    double relative_entropy = 0.0;
    double ck_gap = 0.0;
    double min_density = 0.0;
    double korteweg_residual = 0.0;
    double loghess_residual = 0.0;
    double tN_residual = 0.0;
    double sK_residual = 0.0;
    double irrot_residual = 0.0;
    double llogl_value = 0.0;
    double llogl_bound = 0.0;
    double jungel_left = 0.0;
    double jungel_right = 0.0;
};

DiagnosticsRecord compute_record(const FluidState& s, const ParamSet& p, TauValue tau);

/// Fixed column order of the diagnostics CSV.
const std::vector<std::string>& record_columns();
/// Column name -> meaning, serialized into the CSV's JSON header line.
const std::vector<std::pair<std::string, std::string>>& record_column_docs();
std::vector<double> record_values(const DiagnosticsRecord& r);

}  // namespace qnsk
