#include "sfpe/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace sfpe::fft {

namespace {

std::mutex plan_mutex;
std::map<std::tuple<int, int, int>, fftw_plan> plan_cache;

fftw_plan get_plan(int dim, int n, int sign) {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto key = std::make_tuple(dim, n, sign);
    auto it = plan_cache.find(key);
    if (it != plan_cache.end()) return it->second;

    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) total *= static_cast<std::size_t>(n);
    std::vector<std::complex<double>> ibuf(total), obuf(total);
    int dims[2] = {n, n};
    fftw_plan p = fftw_plan_dft(dim, dims,
                                reinterpret_cast<fftw_complex*>(ibuf.data()),
                                reinterpret_cast<fftw_complex*>(obuf.data()),
                                sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw std::runtime_error("fftw plan creation failed");
    plan_cache.emplace(key, p);
    return p;
}

}  // namespace

void c2c(int dim, int n, const std::complex<double>* in, std::complex<double>* out, int sign) {
    if (dim < 1 || dim > 2) throw std::invalid_argument("fft: dim must be 1 or 2");
    fftw_plan p = get_plan(dim, n, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD);
    fftw_execute_dft(p,
                     reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace sfpe::fft
