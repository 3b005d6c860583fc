#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace gradnet {

/// Real-to-half-complex DFT of fixed length.
///
/// forward:  X_m = sum_j x_j exp(-2 pi i j m / N), m = 0..N/2
/// inverse:  x_j = (1/N) sum_m X_m exp(+2 pi i j m / N) (Hermitian extension implied)
///
/// Plans are created with FFTW_ESTIMATE so results are reproducible run to run. Plan
/// creation is serialized internally; executing distinct instances concurrently is safe.
class RealFft {
public:
    explicit RealFft(std::size_t n);
    ~RealFft();
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;
    RealFft(RealFft&&) noexcept;
    RealFft& operator=(RealFft&&) noexcept;

    std::size_t size() const noexcept { return n_; }
    std::size_t spectrum_size() const noexcept { return n_ / 2 + 1; }

    void forward(std::span<const double> in, std::span<std::complex<double>> out);
    void inverse(std::span<const std::complex<double>> in, std::span<double> out);

private:
    struct Impl;
    std::size_t n_;
    std::unique_ptr<Impl> impl_;
};

}  // namespace gradnet
