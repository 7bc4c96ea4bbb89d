#include "sfpe/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sfpe/fft.hpp"

namespace sfpe {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void require_same_shape(const SpectralField& a, const SpectralField& b) {
    if (!(a.grid() == b.grid()) || a.components() != b.components())
        throw std::invalid_argument("spectral fields have mismatched shapes");
}

}  // namespace

Grid make_grid(int dim, int modes, double length) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("grid: dim must be 1 or 2");
    if (!power_of_two(modes)) throw std::invalid_argument("grid: modes must be a power of two");
    if (!(length > 0)) throw std::invalid_argument("grid: length must be positive");
    return Grid{dim, modes, length};
}

SpectralField::SpectralField(const Grid& g, int components)
    : grid_(g), components_(components) {
    if (components != 1 && components != g.dim)
        throw std::invalid_argument("field components must be 1 or dim");
    c_.assign(static_cast<std::size_t>(components) * g.total(), {0.0, 0.0});
}

void SpectralField::wavevector(std::size_t m, int* kv) const {
    if (grid_.dim == 1) {
        kv[0] = grid_.wavenumber(static_cast<int>(m));
    } else {
        int n = grid_.modes;
        kv[0] = grid_.wavenumber(static_cast<int>(m) / n);
        kv[1] = grid_.wavenumber(static_cast<int>(m) % n);
    }
}

double SpectralField::xi_sq(std::size_t m) const {
    int kv[2] = {0, 0};
    wavevector(m, kv);
    double s = 0.0;
    for (int a = 0; a < grid_.dim; ++a) {
        double x = grid_.xi(kv[a]);
        s += x * x;
    }
    return s;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    require_same_shape(*this, o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
    require_same_shape(*this, o);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double s) {
    for (auto& z : c_) z *= s;
    return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { a += b; return a; }
SpectralField operator-(SpectralField a, const SpectralField& b) { a -= b; return a; }
SpectralField operator*(double s, SpectralField a) { a *= s; return a; }

void TimeField::validate() const {
    if (times.size() != snaps.size() || times.empty())
        throw std::invalid_argument("time field: grid/snapshot mismatch");
    if (times.front() != 0.0) throw std::invalid_argument("time field: grid must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("time field: grid must be strictly increasing");
    for (const auto& s : snaps)
        if (!(s.grid() == snaps.front().grid()) || s.components() != snaps.front().components())
            throw std::invalid_argument("time field: snapshots must share shape");
}

std::vector<double> uniform_times(double T, int m_steps) {
    if (!(T > 0) || m_steps < 1) throw std::invalid_argument("uniform_times: bad arguments");
    std::vector<double> t(m_steps + 1);
    for (int j = 0; j <= m_steps; ++j) t[j] = T * j / m_steps;
    t.back() = T;
    return t;
}

std::vector<std::complex<double>> to_physical_complex(const SpectralField& f, int comp) {
    const Grid& g = f.grid();
    std::vector<std::complex<double>> out(g.total());
    fft::c2c(g.dim, g.modes, f.data(comp), out.data(), +1);
    return out;
}

std::vector<double> to_physical(const SpectralField& f, int comp) {
    auto z = to_physical_complex(f, comp);
    std::vector<double> out(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i].real();
    return out;
}

SpectralField from_physical(const Grid& g, const std::vector<double>& values) {
    if (values.size() != g.total())
        throw std::invalid_argument("from_physical: sample count mismatch");
    std::vector<std::complex<double>> in(values.begin(), values.end());
    SpectralField f(g, 1);
    fft::c2c(g.dim, g.modes, in.data(), f.data(0), -1);
    double scale = 1.0 / static_cast<double>(g.total());
    for (std::size_t m = 0; m < g.total(); ++m) f.coef(0, m) *= scale;
    return f;
}

double imag_residual(const SpectralField& f) {
    double worst = 0.0;
    for (int c = 0; c < f.components(); ++c) {
        auto z = to_physical_complex(f, c);
        double mx = 0.0, mi = 0.0;
        for (const auto& v : z) {
            mx = std::max(mx, std::abs(v));
            mi = std::max(mi, std::abs(v.imag()));
        }
        if (mx > 0) worst = std::max(worst, mi / mx);
    }
    return worst;
}

void make_hermitian(SpectralField& f) {
    const Grid& g = f.grid();
    int n = g.modes;
    auto conj_index = [&](std::size_t m) -> std::size_t {
        if (g.dim == 1) {
            int i = static_cast<int>(m);
            return static_cast<std::size_t>((n - i) % n);
        }
        int i0 = static_cast<int>(m) / n, i1 = static_cast<int>(m) % n;
        return static_cast<std::size_t>(((n - i0) % n) * n + (n - i1) % n);
    };
    for (int c = 0; c < f.components(); ++c) {
        for (std::size_t m = 0; m < g.total(); ++m) {
            std::size_t mc = conj_index(m);
            if (mc < m) continue;
            auto a = f.coef(c, m), b = f.coef(c, mc);
            auto sym = 0.5 * (a + std::conj(b));
            f.coef(c, m) = sym;
            f.coef(c, mc) = std::conj(sym);
        }
    }
}

void zero_nyquist(SpectralField& f) {
    const Grid& g = f.grid();
    int kv[2];
    for (int c = 0; c < f.components(); ++c)
        for (std::size_t m = 0; m < g.total(); ++m) {
            f.wavevector(m, kv);
            for (int a = 0; a < g.dim; ++a)
                if (kv[a] == -g.modes / 2) f.coef(c, m) = 0.0;
        }
}

SpectralField heat_propagate(const SpectralField& f, double t) {
    if (t < 0) throw std::invalid_argument("heat_propagate: t must be nonnegative");
    SpectralField out = f;
    for (int c = 0; c < f.components(); ++c)
        for (std::size_t m = 0; m < f.modes_total(); ++m)
            out.coef(c, m) *= std::exp(-0.5 * t * f.xi_sq(m));
    return out;
}

SpectralField gradient(const SpectralField& f) {
    if (f.components() != 1) throw std::invalid_argument("gradient expects a scalar field");
    const Grid& g = f.grid();
    SpectralField out(g, g.dim);
    int kv[2];
    for (std::size_t m = 0; m < g.total(); ++m) {
        f.wavevector(m, kv);
        for (int a = 0; a < g.dim; ++a) {
            if (kv[a] == -g.modes / 2) { out.coef(a, m) = 0.0; continue; }
            out.coef(a, m) = std::complex<double>(0.0, g.xi(kv[a])) * f.coef(0, m);
        }
    }
    return out;
}

SpectralField divergence(const SpectralField& F) {
    const Grid& g = F.grid();
    if (F.components() != g.dim)
        throw std::invalid_argument("divergence expects a dim-component field");
    SpectralField out(g, 1);
    int kv[2];
    for (std::size_t m = 0; m < g.total(); ++m) {
        F.wavevector(m, kv);
        std::complex<double> s = 0.0;
        for (int a = 0; a < g.dim; ++a) {
            if (kv[a] == -g.modes / 2) continue;
            s += std::complex<double>(0.0, g.xi(kv[a])) * F.coef(a, m);
        }
        out.coef(0, m) = s;
    }
    return out;
}

SpectralField laplacian(const SpectralField& f) {
    SpectralField out = f;
    for (int c = 0; c < f.components(); ++c)
        for (std::size_t m = 0; m < f.modes_total(); ++m)
            out.coef(c, m) *= -f.xi_sq(m);
    return out;
}

SpectralField convolve(const SpectralField& K, const SpectralField& f) {
    if (K.components() != 1) throw std::invalid_argument("convolve: kernel must be scalar");
    if (!(K.grid() == f.grid())) throw std::invalid_argument("convolve: grid mismatch");
    double vol = K.grid().volume();
    double mass = vol * K.coef(0, 0).real();
    if (std::abs(mass - 1.0) > 1e-8) {
        std::ostringstream os;
        os << "convolve: kernel not normalized, integral = " << mass
           << " (|error| = " << std::abs(mass - 1.0) << ")";
        throw std::invalid_argument(os.str());
    }
    auto kp = to_physical(K);
    double kmax = 0.0, kmin = 0.0;
    for (double v : kp) { kmax = std::max(kmax, std::abs(v)); kmin = std::min(kmin, v); }
    if (kmin < -1e-12 * std::max(kmax, 1.0)) {
        std::ostringstream os;
        os << "convolve: kernel has negative physical values, min = " << kmin;
        throw std::invalid_argument(os.str());
    }
    SpectralField out = f;
    for (int c = 0; c < f.components(); ++c)
        for (std::size_t m = 0; m < f.modes_total(); ++m)
            out.coef(c, m) *= vol * K.coef(0, m);
    return out;
}

SpectralField resample(const SpectralField& f, int new_modes) {
    const Grid& g = f.grid();
    if (new_modes < 2 || new_modes % 2 != 0)
        throw std::invalid_argument("resample: mode count must be even and >= 2");
    Grid ng{g.dim, new_modes, g.length};
    SpectralField out(ng, f.components());
    int n_src = g.modes, n_dst = new_modes;
    int half_src = n_src / 2, half_dst = n_dst / 2;

    // Per-axis transfer of wavenumber k with weight for Nyquist split/fold.
    auto axis_targets = [&](int k_src, int& k_dst, double& w) {
        w = 1.0;
        k_dst = k_src;
        if (n_dst > n_src) {
            if (k_src == -half_src) w = 0.5;  // split onto +/- half_src below
        } else if (n_dst < n_src) {
            if (k_src > half_dst || k_src < -half_dst) { w = 0.0; return; }
            if (k_src == half_dst) k_dst = -half_dst;  // fold onto target Nyquist
        }
    };

    int kv[2];
    for (int c = 0; c < f.components(); ++c) {
        for (std::size_t m = 0; m < g.total(); ++m) {
            f.wavevector(m, kv);
            // Each axis contributes either one target or a Nyquist pair.
            struct T { int k; double w; };
            T opts[2][2];
            int counts[2] = {1, 1};
            for (int a = 0; a < g.dim; ++a) {
                int kd; double w;
                axis_targets(kv[a], kd, w);
                if (w == 0.0) { counts[a] = 0; continue; }
                opts[a][0] = {kd, w};
                if (n_dst > n_src && kv[a] == -half_src) {
                    opts[a][1] = {half_src, w};
                    counts[a] = 2;
                } else {
                    counts[a] = 1;
                }
            }
            if (counts[0] == 0 || (g.dim == 2 && counts[1] == 0)) continue;
            const std::complex<double> val = f.coef(c, m);
            if (g.dim == 1) {
                for (int i = 0; i < counts[0]; ++i) {
                    std::size_t md = static_cast<std::size_t>(ng.axis_index(opts[0][i].k));
                    out.coef(c, md) += opts[0][i].w * val;
                }
            } else {
                for (int i = 0; i < counts[0]; ++i)
                    for (int j = 0; j < counts[1]; ++j) {
                        std::size_t md = static_cast<std::size_t>(ng.axis_index(opts[0][i].k)) * n_dst +
                                         ng.axis_index(opts[1][j].k);
                        out.coef(c, md) += opts[0][i].w * opts[1][j].w * val;
                    }
            }
        }
    }
    return out;
}

SpectralField multiply_dealiased(const SpectralField& f, const SpectralField& g) {
    if (f.components() != 1 || g.components() != 1)
        throw std::invalid_argument("multiply_dealiased expects scalar fields");
    if (!(f.grid() == g.grid())) throw std::invalid_argument("multiply_dealiased: grid mismatch");
    int n = f.grid().modes;
    int m = 3 * n / 2;
    SpectralField fp = resample(f, m), gp = resample(g, m);
    auto fv = to_physical_complex(fp), gv = to_physical_complex(gp);
    std::vector<double> prod(fv.size());
    for (std::size_t i = 0; i < fv.size(); ++i) prod[i] = fv[i].real() * gv[i].real();
    SpectralField big = from_physical(fp.grid(), prod);
    return resample(big, n);
}

double mean_value(const SpectralField& f, int comp) { return f.coef(comp, 0).real(); }

double integral(const SpectralField& f, int comp) {
    return f.grid().volume() * mean_value(f, comp);
}

double l1_norm(const SpectralField& f, int comp) {
    // |f| is not band-limited; quadrature on a 2x padded grid.
    SpectralField fp = resample(f, 2 * f.grid().modes);
    auto v = to_physical(fp, comp);
    double cellvol = 1.0;
    for (int a = 0; a < f.grid().dim; ++a) cellvol *= fp.grid().cell();
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s * cellvol;
}

double l2_norm_physical(const SpectralField& f, int comp) {
    auto v = to_physical(f, comp);
    double cellvol = 1.0;
    for (int a = 0; a < f.grid().dim; ++a) cellvol *= f.grid().cell();
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s * cellvol);
}

double l2_norm_spectral(const SpectralField& f, int comp) {
    double s = 0.0;
    for (std::size_t m = 0; m < f.modes_total(); ++m) s += std::norm(f.coef(comp, m));
    return std::sqrt(s * f.grid().volume());
}

double min_value(const SpectralField& f, int comp) {
    auto v = to_physical(f, comp);
    return *std::min_element(v.begin(), v.end());
}

double max_abs(const SpectralField& f, int comp) {
    auto v = to_physical(f, comp);
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

}  // namespace sfpe
