#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qnsk/diagnostics.hpp"
#include "qnsk/params.hpp"
#include "qnsk/rescaling.hpp"
#include "qnsk/tau_ode.hpp"

namespace qnsk {

class StepError : public std::runtime_error {
public:
    enum class Kind { floor_violation, non_finite };
    StepError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
    Kind kind;
};

struct Tendency {
    ScalarField dR;
    VectorField dM;
};

/// (eps^2/2) Div(sqrt R grad^2 sqrt R - grad sqrt R (x) grad sqrt R), evaluated in the
/// equivalent form (1/4)(grad Delta R - Div(grad R (x) grad R / R)); the stress is
/// switched off where R <= floor.
VectorField korteweg_force(const ScalarField& R, double floor);

/// R d_j U_i evaluated as d_j M_i - U_i d_j R, which only differentiates smooth fields
/// even where U grows linearly in near-vacuum tails.
TensorField density_weighted_velocity_gradient(const VectorField& M, const VectorField& U, const VectorField& gR);

/// Semi-discrete right-hand side of the regularized drag system in (R, M = R U).
/// Throws StepError when the density violates the floor rule.
Tendency rhs(const HydroFields& h, const ParamSet& p, TauValue tau, double floor);
Tendency rhs(const FluidState& s, const ParamSet& p, TauValue tau);

/// One IMEX step from t to t + dt. Drag is applied by exact half steps around it.
HydroFields step(const HydroFields& h, const ParamSet& p, double t, double dt, const TauSolution& tau, double floor);
FluidState step(const FluidState& s, const ParamSet& p, double dt, const TauSolution& tau);

/// Largest stable step allowed by the CFL policy at this state.
double cfl_dt(const HydroFields& h, const ParamSet& p, TauValue tau, double floor);

/// True when min R breaks the floor rule (min R < -floor with eta1 = 0, min R <= 0 otherwise).
bool floor_violated(const ScalarField& R, const ParamSet& p, double floor);

enum class RunStatus { completed, floor_violation, non_finite };
const char* to_string(RunStatus s);

struct RunOptions {
    double t_end = 0.0;
    /// Steps between stored snapshots; 0 keeps only the first and last state.
    int snapshot_every = 0;
    /// Steps between diagnostics records; 0 keeps only the first and last record.
    int diag_every = 0;
    /// Record per-step balance samples for the energy and BD residuals.
    bool balance = false;
    /// Cap on the number of steps (0 = unbounded).
    long max_steps = 0;
};

struct Frame {
    double t = 0.0;
    FluidState state;
};

struct Trajectory {
    std::vector<Frame> snapshots;
    std::vector<DiagnosticsRecord> records;
    std::vector<BalanceSample> balance;
    RunStatus status = RunStatus::completed;
    std::string message;
    HydroFields last;       ///< last valid (R, M)
    double t_last = 0.0;
    long steps = 0;
    double floor = 0.0;
    double min_density = 0.0;  ///< minimum of min R over all accepted steps

    FluidState final_state() const { return from_hydro(last, t_last); }
};

/// Integrates to opts.t_end. `tau` must cover [0, t_end]; the overload without it solves the tau ODE.
Trajectory run(const FluidState& initial, const ParamSet& p, const RunOptions& opts, const TauSolution& tau);
Trajectory run(const FluidState& initial, const ParamSet& p, const RunOptions& opts);

}  // namespace qnsk
