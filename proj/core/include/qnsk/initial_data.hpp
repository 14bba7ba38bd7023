#pragma once

#include <cstdint>
#include <functional>

#include "qnsk/rescaling.hpp"

namespace qnsk {

using Sampler = std::function<double(const double* y)>;
using VectorSampler = std::function<void(const double* y, double* out)>;

/// Smooth plateau with 1_{|y| <= 1/2} <= chi <= 1_{|y| < 1}.
double plateau(double r);
/// Unnormalized bump exp(-1 / (1 - r^2)) on r < 1.
double bump(double r);

/// sqrt R = (sqrt R0 chi_ell + theta) * zeta_iota, Lambda sampled directly.
/// The convolution is the discrete periodic one with zeta_iota normalized on the grid.
FluidState prepare_initial_data(const Grid& g, const Sampler& sqrtR0, const VectorSampler& Lambda0, double theta,
                                double iota);

struct DragSchedule {
    double r0;
    double r1;
    double eps;
};
/// r0 = 1/(ell + (\int_{R0 < 1} log R0)^2), r1 = 1/ell, eps_ell = eps + 1/ell.
DragSchedule drag_schedule(double ell, const ScalarField& R0, double eps);

/// Named generators. `mass` rescales the density; `seed` feeds any random phase.
struct GeneratorSpec {
    enum class Kind { gaussian, perturbed_gaussian, two_bump, plane_wave } kind = Kind::gaussian;
    double mass = 0.0;        ///< 0 keeps the unit-amplitude profile
    double amplitude = 0.1;   ///< perturbation amplitude a
    int mode = 1;             ///< perturbation mode m
    double separation = 2.0;  ///< two-bump centre distance
    double width = 1.0;       ///< two-bump width
    double velocity = 0.0;    ///< plane-wave wave number or uniform drift
    double lift = 0.0;        ///< constant added to sqrt R
    std::uint64_t seed = 0;
};

FluidState generate(const Grid& g, const GeneratorSpec& spec);
WaveFunction generate_wave(const Grid& g, const GeneratorSpec& spec, double eps);

}  // namespace qnsk
