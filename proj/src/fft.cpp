#include "gradnet/fft.hpp"

#include "gradnet/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

namespace gradnet {

namespace {
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct RealFft::Impl {
    double* real = nullptr;
    fftw_complex* spec = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;

    ~Impl() {
        std::lock_guard lock(planner_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (inv) fftw_destroy_plan(inv);
        fftw_free(real);
        fftw_free(spec);
    }
};

RealFft::RealFft(std::size_t n) : n_(n), impl_(std::make_unique<Impl>()) {
    if (n == 0) throw DomainError("FFT length must be positive");
    std::lock_guard lock(planner_mutex());
    impl_->real = fftw_alloc_real(n);
    impl_->spec = fftw_alloc_complex(n / 2 + 1);
    const int len = static_cast<int>(n);
    impl_->fwd = fftw_plan_dft_r2c_1d(len, impl_->real, impl_->spec, FFTW_ESTIMATE);
    impl_->inv = fftw_plan_dft_c2r_1d(len, impl_->spec, impl_->real, FFTW_ESTIMATE);
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
    if (in.size() != n_ || out.size() != spectrum_size()) throw ShapeError("FFT buffer size mismatch");
    std::copy(in.begin(), in.end(), impl_->real);
    fftw_execute(impl_->fwd);
    const auto* src = reinterpret_cast<const std::complex<double>*>(impl_->spec);
    std::copy(src, src + spectrum_size(), out.begin());
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
    if (in.size() != spectrum_size() || out.size() != n_) throw ShapeError("FFT buffer size mismatch");
    auto* dst = reinterpret_cast<std::complex<double>*>(impl_->spec);
    std::copy(in.begin(), in.end(), dst);
    // c2r ignores the imaginary parts of the self-conjugate bins; keep them real explicitly.
    dst[0] = {dst[0].real(), 0.0};
    if (n_ % 2 == 0) dst[n_ / 2] = {dst[n_ / 2].real(), 0.0};
    fftw_execute(impl_->inv);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) out[i] = impl_->real[i] * scale;
}

}  // namespace gradnet
