#include "mgsr/fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace mgsr::fft {

namespace {

struct FftwBuffer {
    explicit FftwBuffer(std::size_t count)
        : ptr(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * count))) {
        if (!ptr) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(ptr); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;

    fftw_complex* ptr;
};

// Planner calls are not thread-safe in FFTW; fftw_execute_dft on a
// finished plan with fftw_malloc'd arrays is.
fftw_plan plan_for(int n, int sign) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, fftw_plan> plans;
    std::lock_guard lock(mutex);
    auto it = plans.find({n, sign});
    if (it != plans.end()) return it->second;
    FftwBuffer in(static_cast<std::size_t>(n) * n);
    FftwBuffer out(static_cast<std::size_t>(n) * n);
    fftw_plan p = fftw_plan_dft_2d(n, n, in.ptr, out.ptr, sign, FFTW_ESTIMATE);
    if (!p) throw std::runtime_error("fftw planning failed");
    plans.emplace(std::make_pair(n, sign), p);
    return p;
}

void execute(int n, int sign, const std::vector<Complex>& src, std::vector<Complex>& dst) {
    const std::size_t count = static_cast<std::size_t>(n) * n;
    FftwBuffer in(count);
    FftwBuffer out(count);
    for (std::size_t k = 0; k < count; ++k) {
        in.ptr[k][0] = src[k].real();
        in.ptr[k][1] = src[k].imag();
    }
    fftw_execute_dft(plan_for(n, sign), in.ptr, out.ptr);
    dst.resize(count);
    for (std::size_t k = 0; k < count; ++k) dst[k] = Complex(out.ptr[k][0], out.ptr[k][1]);
}

} // namespace

Spectrum2d forward(const Grid& g) {
    std::vector<Complex> src(g.values().begin(), g.values().end());
    Spectrum2d s{g.n(), {}};
    execute(g.n(), FFTW_FORWARD, src, s.data);
    return s;
}

Grid inverse_real(const Spectrum2d& s) {
    std::vector<Complex> dst;
    execute(s.n, FFTW_BACKWARD, s.data, dst);
    Grid g(s.n);
    const double scale = 1.0 / (static_cast<double>(s.n) * s.n);
    auto v = g.values();
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = dst[k].real() * scale;
    return g;
}

} // namespace mgsr::fft
