#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

namespace qnsk {

using cplx = std::complex<double>;
/// Half-complex coefficients of a real field (last axis stores modes 0..n/2),
/// normalized so that f(y) = sum_m c_m exp(i k_m . y).
using Spectrum = std::vector<cplx>;

namespace detail {
struct GridData;
}

/// Periodic box [-ell, ell]^d sampled by n points per axis, row-major.
class Grid {
public:
    Grid() = default;
    Grid(int d, double ell, int n);

    int dim() const;
    double ell() const;
    int n() const;
    size_t size() const;
    size_t spectral_size() const;
    double dy() const { return 2.0 * ell() / n(); }
    double weight() const;
    double volume() const;
    double coord(int j) const { return -ell() + j * dy(); }
    /// Integer mode of full-axis index j (the last spectral axis stores j itself).
    int mode(int j) const { return j < n() / 2 ? j : j - n(); }
    double kmax_dealiased() const;

    /// Wavenumber component along `axis` per spectral index, Nyquist zeroed (odd derivatives).
    const std::vector<double>& k(int axis) const;
    /// Same with the Nyquist wavenumber kept (even derivatives).
    const std::vector<double>& k_full(int axis) const;
    /// |k|^2 per spectral index, Nyquist included.
    const std::vector<double>& k2() const;
    /// 1 where every axis mode satisfies |m| <= n/3.
    const std::vector<unsigned char>& keep() const;
    /// Multiplicity of each stored coefficient in the full spectrum (1 or 2).
    const std::vector<double>& multiplicity() const;
    /// Axis-`axis` sample coordinate for each physical index.
    const std::vector<double>& y(int axis) const;

    void r2c(const double* in, cplx* out) const;
    /// Destroys `in`.
    void c2r(cplx* in, double* out) const;
    void c2c(cplx* in, cplx* out, bool forward) const;

    bool valid() const { return static_cast<bool>(data_); }
    friend bool operator==(const Grid& a, const Grid& b);
    friend bool operator!=(const Grid& a, const Grid& b) { return !(a == b); }

private:
    std::shared_ptr<const detail::GridData> data_;
};

struct ScalarField {
    Grid grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const Grid& g, double value = 0.0) : grid(g), v(g.size(), value) {}
    ScalarField(const Grid& g, std::vector<double> values);

    size_t size() const { return v.size(); }
    double& operator[](size_t i) { return v[i]; }
    double operator[](size_t i) const { return v[i]; }

    ScalarField& operator+=(const ScalarField& o);
    ScalarField& operator-=(const ScalarField& o);
    ScalarField& operator*=(const ScalarField& o);
    ScalarField& operator*=(double a);
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, const ScalarField& b);
ScalarField operator*(double a, ScalarField b);

struct VectorField {
    Grid grid;
    std::vector<ScalarField> c;

    VectorField() = default;
    explicit VectorField(const Grid& g, double value = 0.0);
    ScalarField& operator[](int i) { return c[i]; }
    const ScalarField& operator[](int i) const { return c[i]; }
    int dim() const { return static_cast<int>(c.size()); }
};

/// d*d row-major components, T[i*d + j].
using TensorField = std::vector<ScalarField>;

Spectrum transform_forward(const ScalarField& f);
ScalarField transform_inverse(const Grid& g, Spectrum coeffs);

ScalarField derivative(const ScalarField& f, int axis);
VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& u);
/// (grad u)_{ij} = d_j u_i.
TensorField gradient(const VectorField& u);
/// H_{ij} = d_i d_j f.
TensorField hessian(const ScalarField& f);
/// (Div T)_i = sum_j d_j T_ij.
VectorField divergence(const TensorField& t, const Grid& g);
ScalarField laplacian(const ScalarField& f);
ScalarField bilaplacian(const ScalarField& f);
ScalarField laplacian_power(const ScalarField& f, int p);
ScalarField dealias(const ScalarField& f);

/// Multiply coefficients by `symbol(spectral_index)`.
ScalarField apply_symbol(const ScalarField& f, const std::function<cplx(size_t)>& symbol);

double integrate(const ScalarField& f);
enum class Weight { one, y, r2 };
double moment(const ScalarField& f, Weight w, int axis = 0);
/// (2 ell)^d sum |c_m|^2 over the full spectrum.
double parseval_sum(const Grid& g, const Spectrum& c);

ScalarField coordinate(const Grid& g, int axis);
ScalarField radius_squared(const Grid& g);
ScalarField map(const ScalarField& f, const std::function<double(double)>& fn);
ScalarField sample(const Grid& g, const std::function<double(const double*)>& fn);
bool all_finite(const ScalarField& f);
double max_abs(const ScalarField& f);
double min_value(const ScalarField& f);
/// sqrt(integrate(f^2)).
double l2_norm(const ScalarField& f);
double dot(const VectorField& a, const VectorField& b);

}  // namespace qnsk
