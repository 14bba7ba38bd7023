#include "qnsk/initial_data.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace qnsk {

namespace {

double smooth_step_kernel(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

double radius(const double* y, int d) {
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) r2 += y[a] * y[a];
    return std::sqrt(r2);
}

/// Signed periodic offset of index j from the origin index n/2.
double periodic_offset(const Grid& g, int j) { return g.mode(j) * g.dy(); }

}  // namespace

double plateau(double r) {
    const double a = smooth_step_kernel(1.0 - r);
    const double b = smooth_step_kernel(r - 0.5);
    return a / (a + b);
}

double bump(double r) { return r < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) : 0.0; }

FluidState prepare_initial_data(const Grid& g, const Sampler& sqrtR0, const VectorSampler& Lambda0, double theta,
                                double iota) {
    if (!(theta > 0.0) || !(iota > 0.0)) throw std::invalid_argument("prepare_initial_data: theta, iota must be > 0");
    const int d = g.dim();
    const double ell = g.ell();
    const ScalarField base = sample(g, [&](const double* y) { return sqrtR0(y) * plateau(radius(y, d) / ell) + theta; });

    // zeta_iota on the periodic grid, centred at the origin, normalized by quadrature.
    ScalarField kernel(g);
    const int n = g.n();
    std::vector<int> idx(d, 0);
    double total = 0.0;
    for (size_t i = 0; i < g.size(); ++i) {
        size_t rem = i;
        double r2 = 0.0;
        for (int a = d - 1; a >= 0; --a) {
            const double off = periodic_offset(g, static_cast<int>(rem % n));
            rem /= n;
            r2 += off * off;
        }
        kernel[i] = bump(std::sqrt(r2) / iota);
        total += kernel[i];
    }
    if (!(total > 0.0)) kernel[0] = 1.0, total = 1.0;  // support below the grid spacing: identity
    for (double& v : kernel.v) v /= total;

    const Spectrum fb = transform_forward(base);
    const Spectrum fk = transform_forward(kernel);
    Spectrum prod(fb.size());
    const double N = static_cast<double>(g.size());
    for (size_t s = 0; s < prod.size(); ++s) prod[s] = fb[s] * fk[s] * N;

    FluidState st(g);
    st.sqrtR = transform_inverse(g, std::move(prod));
    std::vector<double> out(d);
    for (size_t i = 0; i < g.size(); ++i) {
        double y[3];
        for (int a = 0; a < d; ++a) y[a] = g.y(a)[i];
        Lambda0(y, out.data());
        for (int a = 0; a < d; ++a) st.Lambda[a][i] = out[a];
    }
    return st;
}

DragSchedule drag_schedule(double ell, const ScalarField& R0, double eps) {
    if (!(ell > 0.0)) throw std::invalid_argument("drag_schedule: ell must be > 0");
    double acc = 0.0;
    for (double r : R0.v)
        if (r < 1.0) acc += std::log(std::max(r, 1e-300));
    acc *= R0.grid.weight();
    return {1.0 / (ell + acc * acc), 1.0 / ell, eps + 1.0 / ell};
}

namespace {

double profile(const GeneratorSpec& s, const double* y, int d, double ell) {
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) r2 += y[a] * y[a];
    switch (s.kind) {
        case GeneratorSpec::Kind::gaussian:
        case GeneratorSpec::Kind::plane_wave:
            return std::exp(-r2);
        case GeneratorSpec::Kind::perturbed_gaussian:
            return std::exp(-r2) * (1.0 + s.amplitude * std::cos(std::numbers::pi * s.mode * y[0] / ell));
        case GeneratorSpec::Kind::two_bump: {
            const double c = 0.5 * s.separation;
            const double w2 = s.width * s.width;
            const double rp = r2 - 2.0 * c * y[0] + c * c;
            const double rm = r2 + 2.0 * c * y[0] + c * c;
            return std::exp(-rp / w2) + std::exp(-rm / w2);
        }
    }
    return 0.0;
}

ScalarField amplitude_field(const Grid& g, const GeneratorSpec& s) {
    if (s.kind == GeneratorSpec::Kind::perturbed_gaussian && std::abs(s.amplitude) >= 1.0)
        throw std::invalid_argument("perturbed_gaussian: |amplitude| must be < 1");
    ScalarField a = sample(g, [&](const double* y) { return std::sqrt(profile(s, y, g.dim(), g.ell())); });
    if (s.mass > 0.0) a *= std::sqrt(s.mass / integrate(a * a));
    if (s.lift != 0.0)
        for (double& v : a.v) v += s.lift;
    return a;
}

double phase_wavenumber(const Grid& g, const GeneratorSpec& s) {
    return s.kind == GeneratorSpec::Kind::plane_wave ? std::numbers::pi * s.mode / g.ell() : 0.0;
}

}  // namespace

FluidState generate(const Grid& g, const GeneratorSpec& spec) {
    FluidState st(g);
    st.sqrtR = amplitude_field(g, spec);
    // Plane-wave phase with eps absorbed: U = velocity along axis 0.
    for (size_t i = 0; i < g.size(); ++i) st.Lambda[0][i] = st.sqrtR[i] * spec.velocity;
    return st;
}

WaveFunction generate_wave(const Grid& g, const GeneratorSpec& spec, double eps) {
    WaveFunction w(g, eps);
    const ScalarField a = amplitude_field(g, spec);
    std::mt19937_64 rng(spec.seed);
    const double phase0 = spec.seed == 0 ? 0.0 : std::uniform_real_distribution<double>(0.0, 2.0 * std::numbers::pi)(rng);
    const double k = phase_wavenumber(g, spec);
    const auto& y0 = g.y(0);
    for (size_t i = 0; i < g.size(); ++i) {
        const double ph = phase0 + k * y0[i];
        w.re[i] = a[i] * std::cos(ph);
        w.im[i] = a[i] * std::sin(ph);
    }
    return w;
}

}  // namespace qnsk
