#include "qnsk/lognls_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qnsk/galerkin_solver.hpp"

namespace qnsk {

namespace {

/// |k|^2 for each index of the full complex spectrum (row-major).
std::vector<double> full_k2(const Grid& g) {
    const int d = g.dim(), n = g.n();
    std::vector<double> k2(g.size());
    const double unit = std::numbers::pi / g.ell();
    for (size_t i = 0; i < g.size(); ++i) {
        size_t rem = i;
        double s = 0.0;
        for (int a = 0; a < d; ++a) {
            const double k = unit * g.mode(static_cast<int>(rem % n));
            rem /= n;
            s += k * k;
        }
        k2[i] = s;
    }
    return k2;
}

std::vector<cplx> pack(const WaveFunction& w) {
    std::vector<cplx> c(w.grid.size());
    for (size_t i = 0; i < c.size(); ++i) c[i] = {w.re[i], w.im[i]};
    return c;
}

void unpack(const std::vector<cplx>& c, WaveFunction& w) {
    for (size_t i = 0; i < c.size(); ++i) {
        w.re[i] = c[i].real();
        w.im[i] = c[i].imag();
    }
}

std::vector<cplx> spectrum(const WaveFunction& w) {
    std::vector<cplx> in = pack(w), out(in.size());
    w.grid.c2c(in.data(), out.data(), true);
    const double inv = 1.0 / static_cast<double>(out.size());
    for (auto& x : out) x *= inv;
    return out;
}

}  // namespace

void NlsParams::validate() const {
    if (!(eps > 0.0)) throw ConfigError("nls: eps must be > 0");
    if (!(dt > 0.0)) throw ConfigError("nls: dt must be > 0");
}

void nls_kinetic_substep(WaveFunction& psi, double h, double tau) {
    const Grid& g = psi.grid;
    std::vector<cplx> c = spectrum(psi);
    const std::vector<double> k2 = full_k2(g);
    const double f = psi.epsilon * h / (2.0 * tau * tau);
    for (size_t i = 0; i < c.size(); ++i) c[i] *= std::polar(1.0, -f * k2[i]);
    std::vector<cplx> out(c.size());
    g.c2c(c.data(), out.data(), false);
    unpack(out, psi);
}

void nls_potential_substep(WaveFunction& psi, double mu, double h, bool confine) {
    const Grid& g = psi.grid;
    const ScalarField r2 = radius_squared(g);
    for (size_t i = 0; i < g.size(); ++i) {
        const double rho = psi.re[i] * psi.re[i] + psi.im[i] * psi.im[i];
        const double arg = rho + mu;
        double V = arg > 0.0 ? std::log(arg) : 0.0;
        if (confine) V += r2[i];
        const cplx z = cplx(psi.re[i], psi.im[i]) * std::polar(1.0, -h * V / psi.epsilon);
        psi.re[i] = z.real();
        psi.im[i] = z.imag();
    }
}

WaveFunction nls_step(const WaveFunction& psi, const NlsParams& p, double mu, TauValue tau_mid) {
    WaveFunction out = psi;
    const bool rescaled = p.variant == NlsParams::Variant::rescaled;
    const double tau = rescaled ? tau_mid.tau : 1.0;
    nls_kinetic_substep(out, 0.5 * p.dt, tau);
    nls_potential_substep(out, mu, p.dt, rescaled);
    nls_kinetic_substep(out, 0.5 * p.dt, tau);
    out.t = psi.t + p.dt;
    return out;
}

WaveFunction nls_step(const WaveFunction& psi, const NlsParams& p, double mu, const TauSolution& tau) {
    return nls_step(psi, p, mu, tau.eval(psi.t + 0.5 * p.dt));
}

double resolve_mu(const NlsParams& p, const WaveFunction& psi0) {
    if (p.mu >= 0.0) return p.mu;
    double m = 0.0;
    for (size_t i = 0; i < psi0.re.size(); ++i) m = std::max(m, psi0.re[i] * psi0.re[i] + psi0.im[i] * psi0.im[i]);
    return 1e-12 * m;
}

double grad_norm_sq(const WaveFunction& psi) {
    const std::vector<cplx> c = spectrum(psi);
    const std::vector<double> k2 = full_k2(psi.grid);
    double acc = 0.0;
    for (size_t i = 0; i < c.size(); ++i) acc += k2[i] * std::norm(c[i]);
    return acc * psi.grid.volume();
}

double nls_energy(const WaveFunction& psi, const NlsParams& p, double mu, TauValue tau) {
    const bool rescaled = p.variant == NlsParams::Variant::rescaled;
    const double t = rescaled ? tau.tau : 1.0;
    const Grid& g = psi.grid;
    const ScalarField r2 = radius_squared(g);
    const double mu_log_mu = mu > 0.0 ? mu * std::log(mu) : 0.0;
    double pot = 0.0;
    for (size_t i = 0; i < g.size(); ++i) {
        const double rho = psi.re[i] * psi.re[i] + psi.im[i] * psi.im[i];
        const double arg = rho + mu;
        pot += (arg > 0.0 ? arg * std::log(arg) : 0.0) - mu_log_mu;
        if (rescaled) pot += r2[i] * rho;
    }
    pot *= g.weight();
    return psi.epsilon * psi.epsilon / (2.0 * t * t) * grad_norm_sq(psi) + pot;
}

double nls_dissipation(const WaveFunction& psi, const NlsParams& p, TauValue tau) {
    if (p.variant != NlsParams::Variant::rescaled) return 0.0;
    return psi.epsilon * psi.epsilon * tau.dtau / (tau.tau * tau.tau * tau.tau) * grad_norm_sq(psi);
}

NlsTrajectory nls_run(const WaveFunction& psi0, const NlsParams& p, double t_end, const TauSolution& tau) {
    p.validate();
    NlsTrajectory tr;
    tr.mu = resolve_mu(p, psi0);
    WaveFunction psi = psi0;
    auto sample = [&](const WaveFunction& w) {
        const TauValue tv = p.variant == NlsParams::Variant::rescaled ? tau.eval(w.t) : TauValue{1.0, 0.0};
        tr.samples.push_back({w.t, w.mass(), nls_energy(w, p, tr.mu, tv), nls_dissipation(w, p, tv)});
    };
    sample(psi);
    const double t_eps = 1e-12 * std::max(1.0, t_end);
    while (t_end - psi.t > t_eps) {
        NlsParams q = p;
        if (psi.t + q.dt > t_end - t_eps) q.dt = t_end - psi.t;
        const double m0 = tr.samples.back().mass;
        psi = nls_step(psi, q, tr.mu, tau);
        if (t_end - psi.t <= t_eps) psi.t = t_end;
        sample(psi);
        tr.max_step_mass_drift = std::max(tr.max_step_mass_drift, std::abs(tr.samples.back().mass - m0) / m0);
    }
    tr.final_state = psi;
    return tr;
}

NlsTrajectory nls_run(const WaveFunction& psi0, const NlsParams& p, double t_end) {
    const TauSolution tau = tau_solve(std::max(t_end, 1e-6) * 1.01 + 1e-3, 1e-12, 1e-14);
    return nls_run(psi0, p, t_end, tau);
}

double psi_dissipation_identity(const std::vector<NlsSample>& s) {
    if (s.size() < 2) return 0.0;
    double integral = 0.0;
    for (size_t k = 1; k < s.size(); ++k) integral += 0.5 * (s[k].t - s[k - 1].t) * (s[k].dissipation + s[k - 1].dissipation);
    const double num = s.back().energy + integral - s.front().energy;
    return num == 0.0 ? 0.0 : std::abs(num) / std::abs(s.front().energy);
}

double nls_theta(const TauSolution& tau, double t, int d, double mass_ratio) {
    return d * tau.integral_log_tau(t) - t * std::log(mass_ratio);
}

WaveFunction rescaled_initial(const WaveFunction& psi0, double gamma_mass) {
    WaveFunction out = psi0;
    const double f = std::sqrt(gamma_mass / psi0.mass());
    out.re *= f;
    out.im *= f;
    return out;
}

WaveFunction to_original(const WaveFunction& Psi, TauValue tau, double theta, double mass_ratio) {
    const Grid& gs = Psi.grid;
    const int d = gs.dim();
    const Grid g(d, gs.ell() * tau.tau, gs.n());
    WaveFunction out(g, Psi.epsilon);
    out.t = Psi.t;
    const double amp = std::pow(tau.tau, -0.5 * d) * std::sqrt(mass_ratio);
    const ScalarField x2 = radius_squared(g);
    for (size_t i = 0; i < g.size(); ++i) {
        const double ph = tau.dtau / tau.tau * x2[i] / (2.0 * Psi.epsilon) - theta / Psi.epsilon;
        const cplx z = amp * cplx(Psi.re[i], Psi.im[i]) * std::polar(1.0, ph);
        out.re[i] = z.real();
        out.im[i] = z.imag();
    }
    return out;
}

CrosscheckReport nls_to_hydro_crosscheck(const WaveFunction& psi0, double t_end, const CrosscheckPolicy& policy) {
    CrosscheckReport rep;
    FluidState s0 = madelung(psi0);
    rep.mass_initial = s0.mass();
    if (t_end <= 0.0) {
        rep.mass_nls = rep.mass_hydro = rep.mass_initial;
        return rep;
    }
    const TauSolution tau = tau_solve(t_end * 1.01 + 1e-3, 1e-12, 1e-14);

    NlsParams np;
    np.eps = psi0.epsilon;
    np.dt = policy.dt;
    np.variant = NlsParams::Variant::rescaled;
    const NlsTrajectory nt = nls_run(psi0, np, t_end, tau);
    const ScalarField Rn = madelung(nt.final_state).density();
    rep.mass_nls = integrate(Rn);

    ParamSet hp;
    hp.nu = 0.0;
    hp.eps = psi0.epsilon;
    hp.delta1 = policy.delta_stab;
    hp.dt.kind = DtPolicy::Kind::cfl;
    hp.dt.dt = policy.dt;
    hp.dt.c_cfl = policy.c_cfl;
    RunOptions ro;
    ro.t_end = t_end;
    const Trajectory ht = run(s0, hp, ro, tau);
    if (ht.status != RunStatus::completed) {
        rep.ok = false;
        rep.status = std::string(to_string(ht.status)) + ": " + ht.message;
        return rep;
    }
    const ScalarField& Rh = ht.last.R;
    rep.mass_hydro = integrate(Rh);
    rep.difference = l2_norm(Rn - Rh) / l2_norm(Rn);
    return rep;
}

}  // namespace qnsk
