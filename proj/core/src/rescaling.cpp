#include "qnsk/rescaling.hpp"

#include <cmath>
#include <stdexcept>

namespace qnsk {

namespace {

double support_threshold(const ScalarField& amp) { return kVacuumFloor * max_abs(amp); }

}  // namespace

ScalarField FluidState::density() const { return sqrtR * sqrtR; }

VectorField FluidState::velocity() const {
    VectorField u(grid);
    const double thr = support_threshold(sqrtR);
    for (int a = 0; a < grid.dim(); ++a)
        for (size_t i = 0; i < grid.size(); ++i)
            u[a][i] = sqrtR[i] > thr ? Lambda[a][i] / sqrtR[i] : 0.0;
    return u;
}

double WaveFunction::mass() const { return integrate(re * re + im * im); }

double gaussian_mass(const Grid& g) { return integrate(map(radius_squared(g), [](double r2) { return std::exp(-r2); })); }

ScalarField mass_matched_gaussian(const Grid& g, double mass) {
    ScalarField G = map(radius_squared(g), [](double r2) { return std::exp(-r2); });
    G *= mass / integrate(G);
    return G;
}

FluidState to_self_similar(const ScalarField& rho, const VectorField& u, TauValue tau, double rho0_mass) {
    if (rho.grid != u.grid) throw std::invalid_argument("to_self_similar: grid mismatch");
    if (!(tau.tau > 0.0)) throw std::invalid_argument("to_self_similar: tau must be positive");
    if (!(rho0_mass > 0.0)) throw std::invalid_argument("to_self_similar: reference mass must be positive");
    for (double x : rho.v)
        if (x < 0.0) throw std::domain_error("to_self_similar: negative density");
    const Grid& gp = rho.grid;
    const int d = gp.dim();
    Grid g(d, gp.ell() / tau.tau, gp.n());
    FluidState s(g);
    s.formulation = Formulation::self_similar;
    s.mass_ratio = rho0_mass / gaussian_mass(g);
    const double scale = std::pow(tau.tau, d) / s.mass_ratio;
    for (size_t i = 0; i < g.size(); ++i) {
        const double R = scale * rho[i];
        s.sqrtR[i] = std::sqrt(R);
        for (int a = 0; a < d; ++a) {
            const double U = tau.tau * u[a][i] - tau.dtau * tau.tau * g.y(a)[i];
            s.Lambda[a][i] = s.sqrtR[i] * U;
        }
    }
    return s;
}

std::pair<ScalarField, VectorField> from_self_similar(const FluidState& state, TauValue tau) {
    const Grid& g = state.grid;
    if (state.sqrtR.grid != g || state.Lambda.grid != g)
        throw std::invalid_argument("from_self_similar: grid mismatch");
    if (!(tau.tau > 0.0)) throw std::invalid_argument("from_self_similar: tau must be positive");
    const int d = g.dim();
    Grid gp(d, g.ell() * tau.tau, g.n());
    ScalarField rho(gp);
    VectorField u(gp);
    const VectorField U = state.velocity();
    const double scale = state.mass_ratio / std::pow(tau.tau, d);
    for (size_t i = 0; i < g.size(); ++i) {
        rho[i] = scale * state.sqrtR[i] * state.sqrtR[i];
        for (int a = 0; a < d; ++a) {
            const double x = gp.y(a)[i];
            u[a][i] = U[a][i] / tau.tau + (tau.dtau / tau.tau) * x;
        }
    }
    return {std::move(rho), std::move(u)};
}

double original_energy(const ScalarField& rho, const VectorField& u, double eps) {
    const Grid& g = rho.grid;
    const ScalarField a = map(rho, [](double r) { return std::sqrt(std::max(r, 0.0)); });
    const VectorField ga = gradient(a);
    double acc = 0.0;
    for (size_t i = 0; i < g.size(); ++i) {
        double ke = 0.0, ge = 0.0;
        for (int k = 0; k < g.dim(); ++k) {
            ke += u[k][i] * u[k][i];
            ge += ga[k][i] * ga[k][i];
        }
        const double r = rho[i];
        acc += 0.5 * (r * ke + eps * eps * ge) + (r > 0.0 ? r * std::log(r) : 0.0);
    }
    return acc * g.weight();
}

FluidState madelung(const WaveFunction& psi) {
    const Grid& g = psi.grid;
    FluidState s(g);
    s.t = psi.t;
    for (size_t i = 0; i < g.size(); ++i) s.sqrtR[i] = std::hypot(psi.re[i], psi.im[i]);
    const double thr = support_threshold(s.sqrtR);
    const VectorField gre = gradient(psi.re);
    const VectorField gim = gradient(psi.im);
    for (int a = 0; a < g.dim(); ++a)
        for (size_t i = 0; i < g.size(); ++i) {
            const double amp = s.sqrtR[i];
            s.Lambda[a][i] =
                amp > thr ? psi.epsilon * (psi.re[i] * gim[a][i] - psi.im[i] * gre[a][i]) / amp : 0.0;
        }
    return s;
}

double irrotationality_residual(const FluidState& state) {
    const Grid& g = state.grid;
    const int d = g.dim();
    VectorField j(g);
    for (int a = 0; a < d; ++a) j[a] = state.sqrtR * state.Lambda[a];
    const TensorField gj = gradient(j);
    const VectorField ga = gradient(state.sqrtR);
    double num = 0.0, scale = 0.0;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) {
            for (size_t i = 0; i < g.size(); ++i) {
                const double curl = gj[b * d + a][i] - gj[a * d + b][i];
                const double rhs = 2.0 * (ga[a][i] * state.Lambda[b][i] - ga[b][i] * state.Lambda[a][i]);
                num += (curl - rhs) * (curl - rhs);
                const double t1 = gj[b * d + a][i];
                const double t2 = 2.0 * ga[a][i] * state.Lambda[b][i];
                scale += t1 * t1 + t2 * t2;
            }
        }
    if (scale == 0.0) return 0.0;
    return std::sqrt(num / scale);
}

HydroFields to_hydro(const FluidState& s) {
    HydroFields h{s.density(), VectorField(s.grid)};
    for (int a = 0; a < s.grid.dim(); ++a) h.M[a] = s.sqrtR * s.Lambda[a];
    return h;
}

FluidState from_hydro(const HydroFields& h, double t, double mass_ratio) {
    const Grid& g = h.R.grid;
    FluidState s(g);
    s.t = t;
    s.mass_ratio = mass_ratio;
    for (size_t i = 0; i < g.size(); ++i) s.sqrtR[i] = std::sqrt(std::max(h.R[i], 0.0));
    const double thr = support_threshold(s.sqrtR);
    for (int a = 0; a < g.dim(); ++a)
        for (size_t i = 0; i < g.size(); ++i)
            s.Lambda[a][i] = s.sqrtR[i] > thr ? h.M[a][i] / s.sqrtR[i] : 0.0;
    return s;
}

}  // namespace qnsk
