#include "qnsk/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qnsk/fault_injection.hpp"
#include "qnsk/galerkin_solver.hpp"

namespace qnsk {

namespace {

double sq(double x) { return x * x; }

double sum_w(const Grid& g, const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc * g.weight();
}

/// Absolute slack for normalizations of derivative identities of order `order`.
double derivative_slack(const ScalarField& f, int order) {
    const Grid& g = f.grid;
    return 1e-13 * std::max(max_abs(f), 1e-300) * std::pow(g.kmax_dealiased(), order) * std::sqrt(g.volume());
}

/// Shared intermediates for the density-only functionals.
struct DensityPre {
    Grid g;
    int d;
    ScalarField R, a;     // a = sqrt R
    VectorField ga;       // grad sqrt R
    TensorField Ha;       // Hessian of sqrt R
    std::vector<double> grad_a2;  // |grad sqrt R|^2
    std::vector<double> sk2_over_R;  // |S_K|^2 / R, S_K = a Ha - ga (x) ga

    explicit DensityPre(const ScalarField& sqrtR)
        : g(sqrtR.grid), d(g.dim()), R(sqrtR * sqrtR), a(sqrtR), ga(gradient(sqrtR)), Ha(hessian(sqrtR)) {
        const size_t N = g.size();
        grad_a2.assign(N, 0.0);
        sk2_over_R.assign(N, 0.0);
        for (size_t i = 0; i < N; ++i) {
            double s = 0.0, t = 0.0;
            for (int p = 0; p < d; ++p) {
                s += sq(ga[p][i]);
                for (int q = 0; q < d; ++q) t += sq(a[i] * Ha[p * d + q][i] - ga[p][i] * ga[q][i]);
            }
            grad_a2[i] = s;
            sk2_over_R[i] = t / std::max(R[i], kLogFloor);
        }
    }

    /// \int R |grad^2 log R|^2 = 4 \int |S_K|^2 / R.
    double fisher_hessian() const { return 4.0 * sum_w(g, sk2_over_R); }
    double grad_sqrt_sq() const { return sum_w(g, grad_a2); }
};

/// Intermediates that also involve the momentum.
struct FlowPre : DensityPre {
    VectorField M, U;
    TensorField gU;  // gU[i*d+j] = d_j U_i, from R grad U = grad M - U (x) grad R

    FlowPre(const FluidState& s, double floor) : DensityPre(s.sqrtR), M(s.grid), U(floored_velocity(s, floor)) {
        for (int i = 0; i < d; ++i) M[i] = s.sqrtR * s.Lambda[i];
        gU = density_weighted_velocity_gradient(M, U, gradient(R));
        for (auto& c : gU)
            for (size_t i = 0; i < c.size(); ++i) {
                const double rf = std::max(R[i], floor);
                c[i] = rf > 0.0 ? c[i] / rf : 0.0;
            }
    }

    double kinetic() const {  // \int R |U|^2 evaluated as \int M^2 / R on the support
        double acc = 0.0;
        for (size_t i = 0; i < g.size(); ++i)
            for (int p = 0; p < d; ++p) acc += R[i] > 0.0 ? sq(M[p][i]) / R[i] : 0.0;
        return acc * g.weight();
    }
    double viscous(bool symmetric) const {  // \int R |DU|^2 or \int R |AU|^2
        double acc = 0.0;
        for (size_t i = 0; i < g.size(); ++i)
            for (int p = 0; p < d; ++p)
                for (int q = 0; q < d; ++q) {
                    const double a1 = gU[p * d + q][i], a2 = gU[q * d + p][i];
                    acc += R[i] * sq(0.5 * (symmetric ? a1 + a2 : a1 - a2));
                }
        return acc * g.weight();
    }
};

double x_log_x(double r) { return r > 0.0 ? r * std::log(std::max(r, kLogFloor)) : 0.0; }

double confinement_entropy(const ScalarField& R) {
    const ScalarField r2 = radius_squared(R.grid);
    double acc = 0.0;
    for (size_t i = 0; i < R.size(); ++i) acc += R[i] * r2[i] + x_log_x(R[i]);
    return acc * R.grid.weight();
}

double power_integral(const ScalarField& R, double expo) {
    double acc = 0.0;
    for (double r : R.v) acc += std::pow(r, expo);
    return acc * R.grid.weight();
}

/// \int |grad R^{-alpha/2}|^2 = (alpha^2/4) \int R^{-alpha-2} |grad R|^2 with grad R = 2 a grad a.
double cold_gradient(const DensityPre& P, double alpha) {
    double acc = 0.0;
    for (size_t i = 0; i < P.g.size(); ++i)
        acc += std::pow(P.R[i], -alpha - 2.0) * 4.0 * P.R[i] * P.grad_a2[i];
    return 0.25 * alpha * alpha * acc * P.g.weight();
}

struct HyperTerms {
    double grad_lap_s = 0.0;   // \int |grad Delta^s R|^2
    double lap_s1 = 0.0;       // \int |Delta^{s+1} R|^2
};

HyperTerms hyper_terms(const ScalarField& R, int s) {
    const Grid& g = R.grid;
    const Spectrum c = transform_forward(R);
    const auto& k2 = g.k2();
    const auto& m = g.multiplicity();
    HyperTerms h;
    for (size_t i = 0; i < c.size(); ++i) {
        const double a2 = m[i] * std::norm(c[i]);
        h.grad_lap_s += a2 * std::pow(k2[i], 2 * s + 1);
        h.lap_s1 += a2 * std::pow(k2[i], 2 * s + 2);
    }
    h.grad_lap_s *= g.volume();
    h.lap_s1 *= g.volume();
    return h;
}

double lap_velocity_sq(const VectorField& U) {
    double acc = 0.0;
    for (int p = 0; p < U.dim(); ++p) {
        const ScalarField l = laplacian(U[p]);
        for (double x : l.v) acc += x * x;
    }
    return acc * U.grid.weight();
}

double mean(const ScalarField& f) { return integrate(f) / f.grid.volume(); }

}  // namespace

double resolve_floor(const ParamSet& p, double meanR) {
    if (p.R_min >= 0.0) return p.R_min;
    if (p.eta1 > 0.0) return 0.0;
    return 1e-10 * meanR;
}

VectorField floored_velocity(const FluidState& s, double floor) {
    VectorField U(s.grid);
    for (size_t i = 0; i < s.grid.size(); ++i) {
        const double R = s.sqrtR[i] * s.sqrtR[i];
        const double Rf = std::max(R, floor);
        for (int p = 0; p < s.grid.dim(); ++p) U[p][i] = Rf > 0.0 ? s.sqrtR[i] * s.Lambda[p][i] / Rf : 0.0;
    }
    return U;
}

double energy(const FluidState& s, TauValue tau, double eps) {
    const DensityPre P(s.sqrtR);
    double lam2 = 0.0;
    for (int p = 0; p < s.grid.dim(); ++p)
        for (double x : s.Lambda[p].v) lam2 += x * x;
    lam2 *= s.grid.weight();
    return (lam2 + eps * eps * P.grad_sqrt_sq()) / (2.0 * sq(tau.tau)) + confinement_entropy(P.R);
}

double dissipation(const FluidState& s, TauValue tau, double eps, double nu) {
    const FlowPre P(s, 1e-10 * mean(s.density()));
    const double t2 = sq(tau.tau);
    return tau.dtau / (t2 * tau.tau) * (P.kinetic() + eps * eps * P.grad_sqrt_sq()) + nu / (t2 * t2) * P.viscous(true);
}

double bd_entropy(const FluidState& s, TauValue tau, double eps, double nu) {
    // R |U + nu grad log R|^2 = |Lambda + 2 nu grad sqrt R|^2
    const DensityPre P(s.sqrtR);
    double acc = 0.0;
    for (int p = 0; p < s.grid.dim(); ++p)
        for (size_t i = 0; i < s.grid.size(); ++i) acc += sq(s.Lambda[p][i] + 2.0 * nu * P.ga[p][i]);
    acc *= s.grid.weight();
    return (acc + eps * eps * P.grad_sqrt_sq()) / (2.0 * sq(tau.tau)) + confinement_entropy(P.R);
}

double bd_dissipation(const FluidState& s, TauValue tau, double eps, double nu) {
    const FlowPre P(s, 1e-10 * mean(s.density()));
    const double t2 = sq(tau.tau);
    return tau.dtau / (t2 * tau.tau) * (P.kinetic() + eps * eps * P.grad_sqrt_sq()) +
           nu / (t2 * t2) * P.viscous(false) + nu * eps * eps / (4.0 * t2 * t2) * P.fisher_hessian() +
           4.0 * nu / t2 * P.grad_sqrt_sq();
}

double energy_reg(const FluidState& s, const ParamSet& p, TauValue tau) {
    double e = energy(s, tau, p.eps);
    const ScalarField R = s.density();
    if (p.eta1 > 0.0) e += p.eta1 / (p.alpha + 1.0) * power_integral(R, -p.alpha);
    if (p.eta2 > 0.0) e += p.eta2 / (2.0 * sq(tau.tau)) * hyper_terms(R, p.order_s(s.grid.dim())).grad_lap_s;
    return e;
}

double dissipation_reg(const FluidState& s, const ParamSet& p, TauValue tau) {
    const ScalarField R = s.density();
    const FlowPre P(s, resolve_floor(p, mean(R)));
    const double t2 = sq(tau.tau), t3 = t2 * tau.tau, t4 = t2 * t2;
    const HyperTerms H = p.eta2 > 0.0 ? hyper_terms(R, p.order_s(s.grid.dim())) : HyperTerms{};
    double D = tau.dtau / t3 * (P.kinetic() + sq(p.eps) * P.grad_sqrt_sq() + p.eta2 * H.grad_lap_s);
    D += p.nu / t4 * P.viscous(true);
    if (p.delta2 > 0.0) D += p.delta2 / t4 * lap_velocity_sq(P.U);
    D += p.delta1 * p.eta2 / t4 * H.lap_s1;
    D += 4.0 * p.delta1 / t2 * P.grad_sqrt_sq();
    if (p.eta1 > 0.0) D += 4.0 * p.delta1 * p.eta1 / (p.alpha * t2) * cold_gradient(P, p.alpha);
    if (p.r0 > 0.0 || p.r1 > 0.0) {
        double u2 = 0.0, ru4 = 0.0;
        for (size_t i = 0; i < s.grid.size(); ++i) {
            double m = 0.0;
            for (int q = 0; q < s.grid.dim(); ++q) m += sq(P.U[q][i]);
            u2 += m;
            ru4 += P.R[i] * m * m;
        }
        D += (p.r0 * u2 + p.r1 * ru4) * s.grid.weight() / t4;
    }
    D += p.delta1 * sq(p.eps) / (4.0 * t4) * P.fisher_hessian();
    return D;
}

double energy_balance_rhs(const FluidState& s, const ParamSet& p, TauValue tau) {
    const ScalarField R = s.density();
    const double t2 = sq(tau.tau);
    double rhs = 2.0 * s.grid.dim() * p.delta1 / t2 * integrate(R);
    if (p.nu > 0.0) {
        // \int R Div U = -\int U . grad R
        const VectorField U = floored_velocity(s, resolve_floor(p, mean(R)));
        const VectorField gR = gradient(R);
        double acc = 0.0;
        for (int a = 0; a < s.grid.dim(); ++a)
            for (size_t i = 0; i < R.size(); ++i) acc -= U[a][i] * gR[a][i];
        rhs -= p.nu * tau.dtau / (t2 * tau.tau) * acc * s.grid.weight();
    }
    return rhs;
}

double bd_entropy_reg(const FluidState& s, const ParamSet& p, TauValue tau) {
    const ScalarField R = s.density();
    double e = bd_entropy(s, tau, p.eps, p.nu);
    double neg_log = 0.0;
    for (double r : R.v)
        if (r <= 1.0) neg_log -= std::log(std::max(r, kLogFloor));
    e += p.r0 * neg_log * s.grid.weight() / sq(tau.tau);
    if (p.eta1 > 0.0) e += p.eta1 / (p.alpha + 1.0) * power_integral(R, -p.alpha);
    if (p.eta2 > 0.0) e += p.eta2 / (2.0 * sq(tau.tau)) * hyper_terms(R, p.order_s(s.grid.dim())).grad_lap_s;
    return e;
}

BdTerms bd_identity_terms(const FluidState& s, const ParamSet& p, TauValue tau) {
    BdTerms out;
    if (p.nu == 0.0) return out;
    const Grid& g = s.grid;
    const int d = g.dim();
    const size_t N = g.size();
    const ScalarField R = s.density();
    const FlowPre P(s, resolve_floor(p, mean(R)));
    const double nu = p.nu, t2 = sq(tau.tau), t3 = t2 * tau.tau, t4 = t2 * t2;
    const double w = g.weight();

    const ScalarField L = map(R, [](double r) { return std::log(std::max(r, kLogFloor)); });
    VectorField G(g);
    for (int q = 0; q < d; ++q)
        for (size_t i = 0; i < N; ++i) G[q][i] = 2.0 * P.ga[q][i] / std::max(P.a[i], std::sqrt(kLogFloor));

    double MG = 0.0, intL = 0.0, G2 = 0.0, intR = 0.0;
    for (size_t i = 0; i < N; ++i) {
        intL += L[i];
        intR += R[i];
        for (int q = 0; q < d; ++q) {
            MG += P.M[q][i] * G[q][i];
            G2 += sq(G[q][i]);
        }
    }
    MG *= w;
    intL *= w;
    G2 *= w;
    intR *= w;
    const double fisher = 4.0 * P.grad_sqrt_sq();  // \int R |G|^2

    out.bracket = (nu * MG + 0.5 * nu * nu * fisher - p.r0 * nu * intL) / t2;

    std::vector<double> terms_lhs, terms_rhs;
    terms_lhs.push_back(2.0 * nu * tau.dtau / t3 * (MG - p.r0 * intL));
    terms_lhs.push_back(nu / t2 * fisher);
    terms_lhs.push_back(nu / t4 * (p.delta1 * nu + 0.25 * sq(p.eps)) * P.fisher_hessian());
    if (p.eta1 > 0.0) terms_lhs.push_back(4.0 * p.eta1 * nu / (p.alpha * t2) * cold_gradient(P, p.alpha));
    if (p.eta2 > 0.0) terms_lhs.push_back(p.eta2 * nu / t4 * hyper_terms(R, p.order_s(d)).lap_s1);

    terms_rhs.push_back(2.0 * d * nu / t2 * intR);
    if (p.r0 > 0.0 && p.delta1 > 0.0) terms_rhs.push_back(-p.r0 * nu * p.delta1 / t4 * G2);
    if (p.r1 > 0.0) {
        double acc = 0.0;
        for (size_t i = 0; i < N; ++i) {
            double u2 = 0.0, ugr = 0.0;
            for (int q = 0; q < d; ++q) {
                u2 += sq(P.U[q][i]);
                ugr += P.U[q][i] * 2.0 * P.a[i] * P.ga[q][i];
            }
            acc += u2 * ugr;
        }
        terms_rhs.push_back(-p.r1 * nu / t4 * acc * w);
    }
    if (p.delta1 > 0.0) {
        // \int d_j U_i d_j R G_i and \int (Delta R / R) Div(R U)
        double acc = 0.0;
        for (size_t i = 0; i < N; ++i)
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) acc += P.gU[a * d + b][i] * 2.0 * P.a[i] * P.ga[b][i] * G[a][i];
        terms_rhs.push_back(-p.delta1 * nu / t4 * acc * w);
        const ScalarField lapR = laplacian(R);
        const ScalarField divM = divergence(P.M);
        double acc2 = 0.0;
        for (size_t i = 0; i < N; ++i) acc2 += lapR[i] / std::max(R[i], kLogFloor) * divM[i];
        terms_rhs.push_back(-p.delta1 * nu / t4 * acc2 * w);
    }
    if (p.delta2 > 0.0) {
        const VectorField gLapL = gradient(laplacian(L));
        double acc = 0.0;
        for (int q = 0; q < d; ++q) {
            const ScalarField lu = laplacian(P.U[q]);
            for (size_t i = 0; i < N; ++i) acc += lu[i] * gLapL[q][i];
        }
        terms_rhs.push_back(-p.delta2 * nu / t4 * acc * w);
    }
    {
        double acc = 0.0;
        for (size_t i = 0; i < N; ++i)
            for (int a = 0; a < d; ++a)
                for (int b = 0; b < d; ++b) acc += R[i] * P.gU[a * d + b][i] * P.gU[b * d + a][i];
        terms_rhs.push_back(nu / t4 * acc * w);
    }
    for (double x : terms_lhs) {
        out.lhs_rate += x;
        out.scale += std::abs(x);
    }
    for (double x : terms_rhs) {
        out.rhs_rate += x;
        out.scale += std::abs(x);
    }
    return out;
}

BalanceSample balance_sample(const FluidState& s, const ParamSet& p, TauValue tau) {
    BalanceSample b;
    b.t = s.t;
    b.energy_reg = energy_reg(s, p, tau);
    b.dissipation_reg = dissipation_reg(s, p, tau);
    b.rhs = energy_balance_rhs(s, p, tau);
    b.bd = bd_identity_terms(s, p, tau);
    return b;
}

double energy_balance_residual(const std::vector<BalanceSample>& samples) {
    if (samples.size() < 2) return 0.0;
    double integral = 0.0;
    for (size_t k = 1; k < samples.size(); ++k) {
        const double dt = samples[k].t - samples[k - 1].t;
        integral += 0.5 * dt *
                    ((samples[k].dissipation_reg - samples[k].rhs) + (samples[k - 1].dissipation_reg - samples[k - 1].rhs));
    }
    const double num = samples.back().energy_reg - samples.front().energy_reg + integral;
    const double den = std::abs(samples.front().energy_reg);
    if (num == 0.0) return 0.0;
    return std::abs(num) / (den > 0.0 ? den : 1.0);
}

double bd_identity_residual(const std::vector<BalanceSample>& samples) {
    if (samples.size() < 2) return 0.0;
    double integral = 0.0, scale_int = 0.0;
    for (size_t k = 1; k < samples.size(); ++k) {
        const double dt = samples[k].t - samples[k - 1].t;
        const auto& a = samples[k - 1].bd;
        const auto& b = samples[k].bd;
        integral += 0.5 * dt * ((a.lhs_rate - a.rhs_rate) + (b.lhs_rate - b.rhs_rate));
        scale_int += 0.5 * dt * (a.scale + b.scale);
    }
    const double num = samples.back().bd.bracket - samples.front().bd.bracket + integral;
    const double den = std::abs(samples.front().bd.bracket) + std::abs(samples.back().bd.bracket) + scale_int;
    if (num == 0.0 || den == 0.0) return 0.0;
    return std::abs(num) / den;
}

double relative_entropy(const ScalarField& R) {
    const Grid& g = R.grid;
    const double m = integrate(R);
    const double log_scale = std::log(m / gaussian_mass(g));
    const ScalarField r2 = radius_squared(g);
    double acc = 0.0;
    for (size_t i = 0; i < R.size(); ++i)
        if (R[i] > 0.0) acc += R[i] * (std::log(std::max(R[i], kLogFloor)) - (log_scale - r2[i]));
    return acc * g.weight();
}

double csiszar_kullback_gap(const ScalarField& R) {
    const double m = integrate(R);
    const ScalarField G = mass_matched_gaussian(R.grid, m);
    double l1 = 0.0;
    for (size_t i = 0; i < R.size(); ++i) l1 += std::abs(R[i] - G[i]);
    l1 *= R.grid.weight();
    return relative_entropy(R) - l1 * l1 / (2.0 * m);
}

double korteweg_identity_residual(const ScalarField& sqrtR) {
    const Grid& g = sqrtR.grid;
    const int d = g.dim();
    const DensityPre P(sqrtR);
    // R grad(Delta a / a) expanded by the quotient rule: a grad Delta a - Delta a grad a.
    const ScalarField lap_a = laplacian(sqrtR);
    const VectorField g_lap_a = gradient(lap_a);
    TensorField S(d * d);
    for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q) {
            S[p * d + q] = ScalarField(g);
            for (size_t i = 0; i < g.size(); ++i)
                S[p * d + q][i] = sqrtR[i] * P.Ha[p * d + q][i] - P.ga[p][i] * P.ga[q][i];
        }
    VectorField div_s = divergence(S, g);
    if (fault_injected(Fault::korteweg_sign))
        for (auto& c : div_s.c) c *= -1.0;
    double num = 0.0, n1 = 0.0, n2 = 0.0;
    for (int p = 0; p < d; ++p)
        for (size_t i = 0; i < g.size(); ++i) {
            const double lhs = sqrtR[i] * g_lap_a[p][i] - lap_a[i] * P.ga[p][i];
            num += sq(lhs - div_s[p][i]);
            n1 += sq(lhs);
            n2 += sq(div_s[p][i]);
        }
    const double w = g.weight();
    const double den = std::sqrt(n1 * w) + std::sqrt(n2 * w) + derivative_slack(P.R, 3);
    return std::sqrt(num * w) / den;
}

double loghess_identity_residual(const ScalarField& R) {
    const ScalarField a = map(R, [](double r) { return std::sqrt(std::max(r, 0.0)); });
    const DensityPre P(a);
    const double lhs = 0.5 * P.fisher_hessian();
    const ScalarField lap_a = laplacian(a);
    const ScalarField lap_R = laplacian(R);
    double rhs = 0.0;
    for (size_t i = 0; i < R.size(); ++i)
        rhs += a[i] > 0.0 ? lap_a[i] / std::max(a[i], std::sqrt(kLogFloor)) * lap_R[i] : 0.0;
    rhs *= R.grid.weight();
    const double slack = sq(derivative_slack(R, 2));
    return std::abs(lhs - rhs) / (std::abs(lhs) + std::abs(rhs) + slack);
}

CompatResiduals compatibility_residuals(const FluidState& s) {
    const Grid& g = s.grid;
    const int d = g.dim();
    const size_t N = g.size();
    const ScalarField R = s.density();
    const double floor = 1e-10 * mean(R);
    const DensityPre P(s.sqrtR);
    const VectorField U = floored_velocity(s, floor);
    const TensorField gU = gradient(U);
    VectorField M(g);
    for (int p = 0; p < d; ++p) M[p] = s.sqrtR * s.Lambda[p];
    const TensorField gM = gradient(M);
    const ScalarField L = map(R, [](double r) { return std::log(std::max(r, kLogFloor)); });
    const TensorField HL = hessian(L);

    double num_t = 0.0, den_t = 0.0, num_s = 0.0, den_s = 0.0;
    double n_lhs = 0.0, n_a = 0.0, n_b = 0.0, s_a = 0.0, s_b = 0.0, s_c = 0.0;
    for (size_t i = 0; i < N; ++i) {
        if (R[i] <= floor) continue;
        for (int p = 0; p < d; ++p)
            for (int q = 0; q < d; ++q) {
                const double lhs = R[i] * gU[p * d + q][i];
                const double ta = gM[p * d + q][i];
                const double tb = 2.0 * s.Lambda[p][i] * P.ga[q][i];
                num_t += sq(lhs - (ta - tb));
                n_lhs += sq(lhs);
                n_a += sq(ta);
                n_b += sq(tb);
                const double sa = s.sqrtR[i] * P.Ha[p * d + q][i];
                const double sb = P.ga[p][i] * P.ga[q][i];
                const double sc = 0.5 * R[i] * HL[p * d + q][i];
                num_s += sq(sa - sb - sc);
                s_a += sq(sa);
                s_b += sq(sb);
                s_c += sq(sc);
            }
    }
    den_t = std::sqrt(n_lhs) + std::sqrt(n_a) + std::sqrt(n_b);
    den_s = std::sqrt(s_a) + std::sqrt(s_b) + std::sqrt(s_c);
    const double slack = derivative_slack(R, 2) / std::sqrt(g.weight());
    CompatResiduals out;
    out.tN = std::sqrt(num_t) / (den_t + slack);
    out.sK = std::sqrt(num_s) / (den_s + slack);
    return out;
}

LlogLResult llogl_bound(const ScalarField& f, double beta) {
    // Split at |f| = 1. With x^b |log x^2| <= 2/(e b) on either side of 1:
    //   \int |f|^2 |log |f|^2| <= 2/(e beta) [ \int_{|f|<1} |f|^{2-beta} + \int_{|f|>1} |f|^{2+beta} ].
    // Weighted Hoelder on {|y| < k} and {|y| > k} with exponents 2/(2-beta), 2/beta:
    //   \int |f|^{2-beta} <= A k^a + B k^{-b},
    //   A = |f|_2^{2-beta} w_d^{beta/2},  a = d beta / 2,
    //   B = ||y| f|_2^{2-beta} (s_d / (p - d))^{beta/2},  b = (p - d) beta / 2,  p = 2 (2 - beta) / beta,
    // w_d the unit-ball volume and s_d = d w_d its surface. Minimizing in k:
    //   k* = (b B / (a A))^{1/(a+b)},  min = A k*^a (1 + a/b) = C_beta |f|^{2-beta-d beta/2} ||y|f|^{d beta/2}.
    // The high branch uses \int_{|f|>1} |f|^{2+beta} <= W^beta |f|_2^2 with W = sum |c_m| >= max |f|.
    const Grid& g = f.grid;
    const int d = g.dim();
    if (!(beta > 0.0 && beta < 4.0 / (d + 2))) throw std::invalid_argument("llogl_bound: beta outside (0, 4/(d+2))");
    LlogLResult out;
    double l2 = 0.0, yl2 = 0.0, value = 0.0;
    const ScalarField r2 = radius_squared(g);
    for (size_t i = 0; i < f.size(); ++i) {
        const double f2 = f[i] * f[i];
        l2 += f2;
        yl2 += r2[i] * f2;
        if (f2 > 0.0) value += f2 * std::abs(std::log(f2));
    }
    const double w = g.weight();
    l2 = std::sqrt(l2 * w);
    yl2 = std::sqrt(yl2 * w);
    out.value = value * w;

    const double pi = std::numbers::pi;
    const double ball = d == 1 ? 2.0 : d == 2 ? pi : 4.0 * pi / 3.0;
    const double surf = d * ball;
    const double p = 2.0 * (2.0 - beta) / beta;
    const double a = d * beta / 2.0;
    const double b = (p - d) * beta / 2.0;
    const double cA = std::pow(ball, beta / 2.0);
    const double cB = std::pow(surf / (p - d), beta / 2.0);
    // With A = cA X, B = cB Y the minimum is C_beta X^{b/(a+b)} Y^{a/(a+b)}.
    out.c_beta = std::pow(cA, b / (a + b)) * std::pow(cB, a / (a + b)) *
                 (std::pow(b / a, a / (a + b)) + std::pow(a / b, b / (a + b)));
    double low = 0.0;
    if (l2 > 0.0 && yl2 > 0.0) {
        const double X = std::pow(l2, 2.0 - beta), Y = std::pow(yl2, 2.0 - beta);
        low = out.c_beta * std::pow(X, b / (a + b)) * std::pow(Y, a / (a + b));
    }
    const Spectrum c = transform_forward(f);
    const auto& mult = g.multiplicity();
    double wiener = 0.0;
    for (size_t s = 0; s < c.size(); ++s) wiener += mult[s] * std::abs(c[s]);
    const double high = std::pow(std::max(wiener, 1.0), beta) * l2 * l2;
    out.bound = 2.0 / (std::exp(1.0) * beta) * (low + high);
    return out;
}

JungelQuantities jungel_quantities(const ScalarField& R) {
    const ScalarField a = map(R, [](double r) { return std::sqrt(std::max(r, 0.0)); });
    const DensityPre P(a);
    const int d = R.grid.dim();
    double hess = 0.0, quart = 0.0;
    for (size_t i = 0; i < R.size(); ++i) {
        for (int k = 0; k < d * d; ++k) hess += sq(P.Ha[k][i]);
        // |grad R^{1/4}|^4 = |grad a|^4 / (16 R)
        quart += sq(P.grad_a2[i]) / (16.0 * std::max(R[i], kLogFloor));
    }
    const double w = R.grid.weight();
    return {(hess + quart) * w, P.fisher_hessian()};
}

DiagnosticsRecord compute_record(const FluidState& s, const ParamSet& p, TauValue tau) {
    DiagnosticsRecord r;
    const ScalarField R = s.density();
    r.t = s.t;
    r.tau = tau.tau;
    r.dtau = tau.dtau;
    r.mass = integrate(R);
    for (int q = 0; q < s.grid.dim(); ++q) r.momentum[q] = integrate(s.sqrtR * s.Lambda[q]);
    r.second_moment = moment(R, Weight::r2);
    r.energy = energy(s, tau, p.eps);
    r.dissipation = dissipation(s, tau, p.eps, p.nu);
    r.energy_reg = energy_reg(s, p, tau);
    r.dissipation_reg = dissipation_reg(s, p, tau);
    r.bd_entropy = bd_entropy(s, tau, p.eps, p.nu);
    r.bd_dissipation = bd_dissipation(s, tau, p.eps, p.nu);
    r.bd_entropy_reg = bd_entropy_reg(s, p, tau);
    r.relative_entropy = relative_entropy(R);
    r.ck_gap = csiszar_kullback_gap(R);
    r.min_density = min_value(R);
    r.korteweg_residual = korteweg_identity_residual(s.sqrtR);
    r.loghess_residual = loghess_identity_residual(R);
    const CompatResiduals c = compatibility_residuals(s);
    r.tN_residual = c.tN;
    r.sK_residual = c.sK;
    r.irrot_residual = irrotationality_residual(s);
    const LlogLResult ll = llogl_bound(s.sqrtR, 2.0 / (s.grid.dim() + 2));
    r.llogl_value = ll.value;
    r.llogl_bound = ll.bound;
    const JungelQuantities j = jungel_quantities(R);
    r.jungel_left = j.left;
    r.jungel_right = j.right;
    return r;
}

const std::vector<std::pair<std::string, std::string>>& record_column_docs() {
    static const std::vector<std::pair<std::string, std::string>> docs = {
        {"t", "rescaled time"},
        {"tau", "scaling factor tau(t)"},
        {"dtau", "tau'(t)"},
        {"mass", "int R"},
        {"momentum_x", "int R U_1"},
        {"momentum_y", "int R U_2 (0 when d < 2)"},
        {"momentum_z", "int R U_3 (0 when d < 3)"},
        {"second_moment", "int R |y|^2"},
        {"energy", "pseudo-energy (kinetic + capillary)/(2 tau^2) + int R|y|^2 + R log R"},
        {"dissipation", "tau'/tau^3 (kinetic + capillary) + nu/tau^4 int R|DU|^2"},
        {"energy_reg", "energy + cold-pressure and hyperdiffusion energies"},
        {"dissipation_reg", "full regularized dissipation"},
        {"bd_entropy", "BD entropy with effective velocity U + nu grad log R"},
        {"bd_dissipation", "BD dissipation"},
        {"bd_entropy_reg", "positive part of the regularized BD entropy"},
        {"relative_entropy", "int R log(R / mass-matched Gaussian)"},
        {"ck_gap", "relative entropy minus |R - Gaussian|_1^2 / (2 mass)"},
        {"min_density", "min R"},
        {"korteweg_residual", "normalized L2 gap between the two Korteweg forms"},
        {"loghess_residual", "normalized gap of the log-Hessian integral formula"},
        {"tN_residual", "normalized residual of sqrt R T_N = grad(R U) - 2 Lambda (x) grad sqrt R"},
        {"sK_residual", "normalized residual of S_K = (R/2) grad^2 log R"},
        {"irrot_residual", "normalized residual of curl j = 2 grad sqrt R ^ Lambda"},
        {"llogl_value", "int |f|^2 |log |f|^2| with f = sqrt R"},
        {"llogl_bound", "constructive upper bound for llogl_value"},
        {"jungel_left", "int |grad^2 sqrt R|^2 + int |grad R^{1/4}|^4"},
        {"jungel_right", "int R |grad^2 log R|^2"},
    };
    return docs;
}

const std::vector<std::string>& record_columns() {
    static const std::vector<std::string> cols = [] {
        std::vector<std::string> c;
        for (const auto& [name, doc] : record_column_docs()) c.push_back(name);
        return c;
    }();
    return cols;
}

std::vector<double> record_values(const DiagnosticsRecord& r) {
    return {r.t,
            r.tau,
            r.dtau,
            r.mass,
            r.momentum[0],
            r.momentum[1],
            r.momentum[2],
            r.second_moment,
            r.energy,
            r.dissipation,
            r.energy_reg,
            r.dissipation_reg,
            r.bd_entropy,
            r.bd_dissipation,
            r.bd_entropy_reg,
            r.relative_entropy,
            r.ck_gap,
            r.min_density,
            r.korteweg_residual,
            r.loghess_residual,
            r.tN_residual,
            r.sK_residual,
            r.irrot_residual,
            r.llogl_value,
            r.llogl_bound,
            r.jungel_left,
            r.jungel_right};
}

}  // namespace qnsk
