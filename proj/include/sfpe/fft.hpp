#pragma once

#include <complex>

namespace sfpe::fft {

// Out-of-place complex transform on a dim-dimensional cube of side n.
// sign -1: forward (e^{-ikx}), sign +1: backward (e^{+ikx}). No scaling.
// Plans are cached per (dim, n, sign) behind a mutex; execution is
// thread-safe on distinct buffers. FFTW_ESTIMATE keeps plan selection
// deterministic run to run.
void c2c(int dim, int n, const std::complex<double>* in, std::complex<double>* out, int sign);

}  // namespace sfpe::fft
