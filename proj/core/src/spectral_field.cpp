#include "qnsk/spectral_field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace qnsk {

namespace detail {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct GridData {
    int d = 1;
    double ell = 1.0;
    int n = 8;
    size_t size = 0;
    size_t spectral_size = 0;
    std::vector<std::vector<double>> k;
    std::vector<std::vector<double>> kfull;
    std::vector<double> k2;
    std::vector<unsigned char> keep;
    std::vector<double> mult;
    std::vector<std::vector<double>> y;
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
    fftw_plan c2c_fwd = nullptr;
    fftw_plan c2c_bwd = nullptr;

    ~GridData() {
        std::lock_guard<std::mutex> lock(planner_mutex());
        for (fftw_plan p : {r2c, c2r, c2c_fwd, c2c_bwd})
            if (p) fftw_destroy_plan(p);
    }
};

}  // namespace detail

Grid::Grid(int d, double ell, int n) {
    if (d < 1 || d > 3) throw std::invalid_argument("Grid: dimension must be 1, 2 or 3");
    if (!(ell > 0.0)) throw std::invalid_argument("Grid: half-width must be positive");
    if (n < 8 || (n & (n - 1)) != 0) throw std::invalid_argument("Grid: n must be a power of two >= 8");

    auto g = std::make_shared<detail::GridData>();
    g->d = d;
    g->ell = ell;
    g->n = n;
    g->size = 1;
    for (int a = 0; a < d; ++a) g->size *= n;
    const int nh = n / 2 + 1;
    g->spectral_size = g->size / n * nh;

    const size_t S = g->spectral_size;
    g->k.assign(d, std::vector<double>(S));
    g->kfull.assign(d, std::vector<double>(S));
    g->k2.assign(S, 0.0);
    g->keep.assign(S, 1);
    g->mult.assign(S, 1.0);
    const double k0 = std::numbers::pi / ell;
    std::vector<int> idx(d, 0);
    for (size_t s = 0; s < S; ++s) {
        size_t r = s;
        for (int a = d - 1; a >= 0; --a) {
            const int len = a == d - 1 ? nh : n;
            idx[a] = static_cast<int>(r % len);
            r /= len;
        }
        double k2 = 0.0;
        bool keep = true;
        for (int a = 0; a < d; ++a) {
            const int m = a == d - 1 ? idx[a] : (idx[a] < n / 2 ? idx[a] : idx[a] - n);
            const bool nyq = std::abs(m) == n / 2;
            const double km = k0 * m;
            g->k[a][s] = nyq ? 0.0 : km;
            g->kfull[a][s] = km;
            k2 += km * km;
            if (3 * std::abs(m) > n) keep = false;
        }
        g->k2[s] = k2;
        g->keep[s] = keep ? 1 : 0;
        const int jl = idx[d - 1];
        g->mult[s] = (jl == 0 || jl == n / 2) ? 1.0 : 2.0;
    }

    g->y.assign(d, std::vector<double>(g->size));
    const double h = 2.0 * ell / n;
    for (size_t i = 0; i < g->size; ++i) {
        size_t r = i;
        for (int a = d - 1; a >= 0; --a) {
            g->y[a][i] = -ell + static_cast<double>(r % n) * h;
            r /= n;
        }
    }

    std::vector<int> dims(d, n);
    std::vector<double> rbuf(g->size);
    std::vector<cplx> cbuf(g->size), cbuf2(g->size);
    {
        std::lock_guard<std::mutex> lock(detail::planner_mutex());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        auto* cb = reinterpret_cast<fftw_complex*>(cbuf.data());
        auto* cb2 = reinterpret_cast<fftw_complex*>(cbuf2.data());
        g->r2c = fftw_plan_dft_r2c(d, dims.data(), rbuf.data(), cb, flags);
        g->c2r = fftw_plan_dft_c2r(d, dims.data(), cb, rbuf.data(), flags);
        g->c2c_fwd = fftw_plan_dft(d, dims.data(), cb, cb2, FFTW_FORWARD, flags);
        g->c2c_bwd = fftw_plan_dft(d, dims.data(), cb, cb2, FFTW_BACKWARD, flags);
    }
    if (!g->r2c || !g->c2r || !g->c2c_fwd || !g->c2c_bwd)
        throw std::runtime_error("Grid: FFT planning failed");
    data_ = std::move(g);
}

int Grid::dim() const { return data_->d; }
double Grid::ell() const { return data_->ell; }
int Grid::n() const { return data_->n; }
size_t Grid::size() const { return data_->size; }
size_t Grid::spectral_size() const { return data_->spectral_size; }
double Grid::weight() const { return std::pow(dy(), dim()); }
double Grid::volume() const { return std::pow(2.0 * ell(), dim()); }
double Grid::kmax_dealiased() const {
    return std::numbers::pi / ell() * (n() / 3) * std::sqrt(static_cast<double>(dim()));
}
const std::vector<double>& Grid::k(int axis) const { return data_->k.at(axis); }
const std::vector<double>& Grid::k_full(int axis) const { return data_->kfull.at(axis); }
const std::vector<double>& Grid::k2() const { return data_->k2; }
const std::vector<unsigned char>& Grid::keep() const { return data_->keep; }
const std::vector<double>& Grid::multiplicity() const { return data_->mult; }
const std::vector<double>& Grid::y(int axis) const { return data_->y.at(axis); }

void Grid::r2c(const double* in, cplx* out) const {
    fftw_execute_dft_r2c(data_->r2c, const_cast<double*>(in), reinterpret_cast<fftw_complex*>(out));
}
void Grid::c2r(cplx* in, double* out) const {
    fftw_execute_dft_c2r(data_->c2r, reinterpret_cast<fftw_complex*>(in), out);
}
void Grid::c2c(cplx* in, cplx* out, bool forward) const {
    fftw_execute_dft(forward ? data_->c2c_fwd : data_->c2c_bwd, reinterpret_cast<fftw_complex*>(in),
                     reinterpret_cast<fftw_complex*>(out));
}

bool operator==(const Grid& a, const Grid& b) {
    if (a.data_ == b.data_) return true;
    if (!a.data_ || !b.data_) return false;
    return a.dim() == b.dim() && a.n() == b.n() && a.ell() == b.ell();
}

ScalarField::ScalarField(const Grid& g, std::vector<double> values) : grid(g), v(std::move(values)) {
    if (v.size() != g.size()) throw std::invalid_argument("ScalarField: sample count mismatch");
}

namespace {
void check_same(const ScalarField& a, const ScalarField& b) {
    if (a.grid != b.grid) throw std::invalid_argument("field grids differ");
}
}  // namespace

ScalarField& ScalarField::operator+=(const ScalarField& o) {
    check_same(*this, o);
    for (size_t i = 0; i < v.size(); ++i) v[i] += o.v[i];
    return *this;
}
ScalarField& ScalarField::operator-=(const ScalarField& o) {
    check_same(*this, o);
    for (size_t i = 0; i < v.size(); ++i) v[i] -= o.v[i];
    return *this;
}
ScalarField& ScalarField::operator*=(const ScalarField& o) {
    check_same(*this, o);
    for (size_t i = 0; i < v.size(); ++i) v[i] *= o.v[i];
    return *this;
}
ScalarField& ScalarField::operator*=(double a) {
    for (double& x : v) x *= a;
    return *this;
}
ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
ScalarField operator*(double a, ScalarField b) { return b *= a; }

VectorField::VectorField(const Grid& g, double value) : grid(g), c(g.dim(), ScalarField(g, value)) {}

Spectrum transform_forward(const ScalarField& f) {
    const Grid& g = f.grid;
    Spectrum c(g.spectral_size());
    g.r2c(f.v.data(), c.data());
    const double inv = 1.0 / static_cast<double>(g.size());
    for (auto& x : c) x *= inv;
    return c;
}

ScalarField transform_inverse(const Grid& g, Spectrum coeffs) {
    if (coeffs.size() != g.spectral_size()) throw std::invalid_argument("transform_inverse: size mismatch");
    ScalarField f(g);
    g.c2r(coeffs.data(), f.v.data());
    return f;
}

ScalarField apply_symbol(const ScalarField& f, const std::function<cplx(size_t)>& symbol) {
    Spectrum c = transform_forward(f);
    for (size_t s = 0; s < c.size(); ++s) c[s] *= symbol(s);
    return transform_inverse(f.grid, std::move(c));
}

ScalarField derivative(const ScalarField& f, int axis) {
    const auto& k = f.grid.k(axis);
    Spectrum c = transform_forward(f);
    for (size_t s = 0; s < c.size(); ++s) c[s] *= cplx(0.0, k[s]);
    return transform_inverse(f.grid, std::move(c));
}

VectorField gradient(const ScalarField& f) {
    const Grid& g = f.grid;
    VectorField out(g);
    const Spectrum c = transform_forward(f);
    for (int a = 0; a < g.dim(); ++a) {
        const auto& k = g.k(a);
        Spectrum ca(c.size());
        for (size_t s = 0; s < c.size(); ++s) ca[s] = c[s] * cplx(0.0, k[s]);
        out[a] = transform_inverse(g, std::move(ca));
    }
    return out;
}

ScalarField divergence(const VectorField& u) {
    const Grid& g = u.grid;
    Spectrum acc(g.spectral_size(), 0.0);
    for (int a = 0; a < u.dim(); ++a) {
        const Spectrum c = transform_forward(u[a]);
        const auto& k = g.k(a);
        for (size_t s = 0; s < c.size(); ++s) acc[s] += c[s] * cplx(0.0, k[s]);
    }
    return transform_inverse(g, std::move(acc));
}

TensorField gradient(const VectorField& u) {
    const int d = u.dim();
    TensorField t(d * d);
    for (int i = 0; i < d; ++i) {
        VectorField gi = gradient(u[i]);
        for (int j = 0; j < d; ++j) t[i * d + j] = std::move(gi[j]);
    }
    return t;
}

TensorField hessian(const ScalarField& f) {
    const Grid& g = f.grid;
    const int d = g.dim();
    TensorField t(d * d);
    const Spectrum c = transform_forward(f);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            Spectrum cij(c.size());
            const auto& ki = g.k(i);
            const auto& kj = g.k(j);
            const auto& kf = g.k_full(i);
            for (size_t s = 0; s < c.size(); ++s) {
                // Second derivative along one axis keeps the Nyquist mode.
                const double sym = i == j ? -kf[s] * kf[s] : -ki[s] * kj[s];
                cij[s] = c[s] * sym;
            }
            t[i * d + j] = transform_inverse(g, std::move(cij));
            if (i != j) t[j * d + i] = t[i * d + j];
        }
    return t;
}

VectorField divergence(const TensorField& t, const Grid& g) {
    const int d = g.dim();
    VectorField out(g);
    for (int i = 0; i < d; ++i) {
        Spectrum acc(g.spectral_size(), 0.0);
        for (int j = 0; j < d; ++j) {
            const Spectrum c = transform_forward(t[i * d + j]);
            const auto& k = g.k(j);
            for (size_t s = 0; s < c.size(); ++s) acc[s] += c[s] * cplx(0.0, k[s]);
        }
        out[i] = transform_inverse(g, std::move(acc));
    }
    return out;
}

ScalarField laplacian_power(const ScalarField& f, int p) {
    if (p < 1) throw std::invalid_argument("laplacian_power: p must be >= 1");
    const auto& k2 = f.grid.k2();
    Spectrum c = transform_forward(f);
    for (size_t s = 0; s < c.size(); ++s) c[s] *= std::pow(-k2[s], p);
    return transform_inverse(f.grid, std::move(c));
}

ScalarField laplacian(const ScalarField& f) { return laplacian_power(f, 1); }
ScalarField bilaplacian(const ScalarField& f) { return laplacian_power(f, 2); }

ScalarField dealias(const ScalarField& f) {
    const auto& keep = f.grid.keep();
    Spectrum c = transform_forward(f);
    for (size_t s = 0; s < c.size(); ++s)
        if (!keep[s]) c[s] = 0.0;
    return transform_inverse(f.grid, std::move(c));
}

double integrate(const ScalarField& f) {
    double acc = 0.0;
    for (double x : f.v) acc += x;
    return acc * f.grid.weight();
}

double moment(const ScalarField& f, Weight w, int axis) {
    const Grid& g = f.grid;
    double acc = 0.0;
    switch (w) {
        case Weight::one:
            return integrate(f);
        case Weight::y: {
            const auto& y = g.y(axis);
            for (size_t i = 0; i < f.size(); ++i) acc += y[i] * f[i];
            break;
        }
        case Weight::r2: {
            for (int a = 0; a < g.dim(); ++a) {
                const auto& y = g.y(a);
                for (size_t i = 0; i < f.size(); ++i) acc += y[i] * y[i] * f[i];
            }
            break;
        }
    }
    return acc * g.weight();
}

double parseval_sum(const Grid& g, const Spectrum& c) {
    const auto& m = g.multiplicity();
    double acc = 0.0;
    for (size_t s = 0; s < c.size(); ++s) acc += m[s] * std::norm(c[s]);
    return acc * g.volume();
}

ScalarField coordinate(const Grid& g, int axis) { return ScalarField(g, g.y(axis)); }

ScalarField radius_squared(const Grid& g) {
    ScalarField r(g);
    for (int a = 0; a < g.dim(); ++a) {
        const auto& y = g.y(a);
        for (size_t i = 0; i < r.size(); ++i) r[i] += y[i] * y[i];
    }
    return r;
}

ScalarField map(const ScalarField& f, const std::function<double(double)>& fn) {
    ScalarField r(f.grid);
    for (size_t i = 0; i < f.size(); ++i) r[i] = fn(f[i]);
    return r;
}

ScalarField sample(const Grid& g, const std::function<double(const double*)>& fn) {
    ScalarField r(g);
    double y[3] = {0.0, 0.0, 0.0};
    for (size_t i = 0; i < r.size(); ++i) {
        for (int a = 0; a < g.dim(); ++a) y[a] = g.y(a)[i];
        r[i] = fn(y);
    }
    return r;
}

bool all_finite(const ScalarField& f) {
    return std::all_of(f.v.begin(), f.v.end(), [](double x) { return std::isfinite(x); });
}

double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::abs(x));
    return m;
}

double min_value(const ScalarField& f) { return *std::min_element(f.v.begin(), f.v.end()); }

double l2_norm(const ScalarField& f) {
    double acc = 0.0;
    for (double x : f.v) acc += x * x;
    return std::sqrt(acc * f.grid.weight());
}

double dot(const VectorField& a, const VectorField& b) {
    double acc = 0.0;
    for (int i = 0; i < a.dim(); ++i)
        for (size_t j = 0; j < a[i].size(); ++j) acc += a[i][j] * b[i][j];
    return acc * a.grid.weight();
}

}  // namespace qnsk
