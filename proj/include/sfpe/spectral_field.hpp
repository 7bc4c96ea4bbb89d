#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace sfpe {

// Periodic grid descriptor: a d-torus of side `length` resolved with `modes`
// Fourier modes per axis (power of two). Coefficients are stored in FFT index
// order; index i on an axis carries integer wavenumber k = i < N/2 ? i : i-N.
struct Grid {
    int dim = 1;
    int modes = 0;
    double length = 0.0;

    std::size_t total() const {
        std::size_t t = 1;
        for (int a = 0; a < dim; ++a) t *= static_cast<std::size_t>(modes);
        return t;
    }
    int wavenumber(int axis_index) const {
        return axis_index < modes / 2 ? axis_index : axis_index - modes;
    }
    int axis_index(int k) const { return k >= 0 ? k : k + modes; }
    double xi(int k) const { return 6.283185307179586476925286766559 * k / length; }
    double cell() const { return length / modes; }
    double volume() const {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= length;
        return v;
    }
    bool operator==(const Grid&) const = default;
};

Grid make_grid(int dim, int modes, double length);

// Truncated Fourier representation of a real scalar or vector field on the
// torus. Component c, flat mode index m (row-major over axes, FFT order).
class SpectralField {
  public:
    SpectralField() = default;
    SpectralField(const Grid& g, int components);

    const Grid& grid() const { return grid_; }
    int components() const { return components_; }
    std::size_t modes_total() const { return grid_.total(); }

    std::complex<double>& coef(int comp, std::size_t m) { return c_[offset(comp) + m]; }
    const std::complex<double>& coef(int comp, std::size_t m) const { return c_[offset(comp) + m]; }
    std::complex<double>* data(int comp) { return c_.data() + offset(comp); }
    const std::complex<double>* data(int comp) const { return c_.data() + offset(comp); }

    // Integer wavenumber vector of flat index m; kv must hold grid().dim ints.
    void wavevector(std::size_t m, int* kv) const;
    // |xi|^2 of flat index m.
    double xi_sq(std::size_t m) const;

    SpectralField& operator+=(const SpectralField& o);
    SpectralField& operator-=(const SpectralField& o);
    SpectralField& operator*=(double s);

  private:
    std::size_t offset(int comp) const { return static_cast<std::size_t>(comp) * grid_.total(); }
    Grid grid_;
    int components_ = 0;
    std::vector<std::complex<double>> c_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

// A field sampled on a time grid t0 = 0 < ... < tM = T, uniform shapes.
struct TimeField {
    std::vector<double> times;
    std::vector<SpectralField> snaps;

    void validate() const;
    double horizon() const { return times.empty() ? 0.0 : times.back(); }
};

// Uniform grid 0..T with m_steps intervals (m_steps+1 nodes).
std::vector<double> uniform_times(double T, int m_steps);

// --- transforms ---------------------------------------------------------

// Physical samples of one component on the natural grid, row-major;
// x_j = j L / N per axis. Discards the imaginary part.
std::vector<double> to_physical(const SpectralField& f, int comp = 0);
// Complex samples (for Hermitian-symmetry diagnostics).
std::vector<std::complex<double>> to_physical_complex(const SpectralField& f, int comp = 0);
// Scalar field from real samples on the natural grid.
SpectralField from_physical(const Grid& g, const std::vector<double>& values);

// Largest |Im| of the physical samples relative to max |field|.
double imag_residual(const SpectralField& f);

// Projects onto Hermitian-symmetric (real-valued) coefficients.
void make_hermitian(SpectralField& f);
// Zeroes the unpaired |k| = N/2 modes.
void zero_nyquist(SpectralField& f);

// --- operators ----------------------------------------------------------

// Heat semigroup: per-mode multiplier exp(-t |xi|^2 / 2). Rejects t < 0.
SpectralField heat_propagate(const SpectralField& f, double t);

// Spectral derivative i xi_a per axis; Nyquist modes are zeroed so real
// fields stay real. gradient: scalar -> dim components.
SpectralField gradient(const SpectralField& f);
// divergence: dim components -> scalar.
SpectralField divergence(const SpectralField& F);
SpectralField laplacian(const SpectralField& f);

// Convolution with a probability-density kernel: coefficient product scaled
// by the torus volume so unit-mass kernels preserve the mean. K must be
// scalar, nonnegative in physical space and of unit integral (1e-8).
SpectralField convolve(const SpectralField& K, const SpectralField& f);

// Spectral resample to a new per-axis mode count (zero-pad or truncate;
// Nyquist split/fold keeps real fields real and round trips exactly).
SpectralField resample(const SpectralField& f, int new_modes);

// Dealiased pointwise product of scalar fields via 3/2 zero padding.
SpectralField multiply_dealiased(const SpectralField& f, const SpectralField& g);

// --- functionals --------------------------------------------------------

double mean_value(const SpectralField& f, int comp = 0);      // k = 0 coefficient
double integral(const SpectralField& f, int comp = 0);        // volume * mean
double l1_norm(const SpectralField& f, int comp = 0);         // quadrature of |f|, 2x grid
double l2_norm_physical(const SpectralField& f, int comp = 0);
double l2_norm_spectral(const SpectralField& f, int comp = 0);
double min_value(const SpectralField& f, int comp = 0);
double max_abs(const SpectralField& f, int comp = 0);

}  // namespace sfpe
