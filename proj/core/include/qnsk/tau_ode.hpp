#pragma once

#include <stdexcept>
#include <vector>

namespace qnsk {

struct TauNode {
    double t;
    double tau;
    double dtau;
};

struct TauValue {
    double tau;
    double dtau;
};

class IntegratorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dense solution of tau'' = 2/tau, tau(0) = 1, tau'(0) = 0.
/// Immutable once built; quintic Hermite interpolation between accepted steps.
class TauSolution {
public:
    TauSolution() = default;
    TauSolution(std::vector<TauNode> nodes, double rel_tol, double abs_tol);

    double t_max() const { return nodes_.empty() ? 0.0 : nodes_.back().t; }
    const std::vector<TauNode>& nodes() const { return nodes_; }
    int interpolation_order() const { return 5; }
    double rel_tol() const { return rel_tol_; }
    double abs_tol() const { return abs_tol_; }

    TauValue eval(double t) const;
    /// \int_0^t tau(s)^{-2} ds, by Gauss-Legendre on each node interval.
    double integral_inv_tau2(double t) const;
    /// \int_0^t log tau(s) ds.
    double integral_log_tau(double t) const;

private:
    template <class F>
    double integrate_(double t, F&& f) const;

    std::vector<TauNode> nodes_;
    double rel_tol_ = 0.0;
    double abs_tol_ = 0.0;
};

TauSolution tau_solve(double t_max, double rel_tol, double abs_tol);
TauValue tau_eval(const TauSolution& sol, double t);
double tau_asymptotic_ratio(const TauSolution& sol, double t);

/// |tau'^2 - 4 log tau|, zero along exact solutions.
double tau_first_integral_residual(double tau, double dtau);

}  // namespace qnsk
