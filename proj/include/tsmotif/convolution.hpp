#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <mutex>
#include <span>
#include <stdexcept>

#include <fftw3.h>

namespace tsmotif {

namespace detail {
// FFTW plan creation/destruction is not thread safe; execution on
// distinct arrays is.
inline std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}
} // namespace detail

/// Sliding dot products of length-w patterns against a fixed series via
/// cyclic convolution: the forward transform of the series is computed
/// once and shared by every pattern. `compute` is safe to call
/// concurrently.
class SlidingDotProduct {
public:
    SlidingDotProduct(std::span<const double> series, uint32_t window)
        : n_(series.size()), w_(window) {
        if (w_ == 0 || w_ > n_) throw std::invalid_argument("window invalid for series");
        fft_size_ = 1;
        while (fft_size_ < n_ + w_) fft_size_ <<= 1;
        bins_ = fft_size_ / 2 + 1;

        series_freq_ = (fftw_complex*)fftw_malloc(sizeof(fftw_complex) * bins_);
        double* real = (double*)fftw_malloc(sizeof(double) * fft_size_);
        fftw_complex* freq = (fftw_complex*)fftw_malloc(sizeof(fftw_complex) * bins_);
        {
            std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
            // FFTW_ESTIMATE keeps planning deterministic and leaves the
            // input arrays untouched.
            forward_ = fftw_plan_dft_r2c_1d((int)fft_size_, real, freq, FFTW_ESTIMATE);
            inverse_ = fftw_plan_dft_c2r_1d((int)fft_size_, freq, real, FFTW_ESTIMATE);
        }
        std::memset(real, 0, sizeof(double) * fft_size_);
        std::memcpy(real, series.data(), sizeof(double) * n_);
        fftw_execute_dft_r2c(forward_, real, series_freq_);
        fftw_free(real);
        fftw_free(freq);
    }

    SlidingDotProduct(const SlidingDotProduct&) = delete;
    SlidingDotProduct& operator=(const SlidingDotProduct&) = delete;

    ~SlidingDotProduct() {
        {
            std::lock_guard<std::mutex> lock(detail::fftw_plan_mutex());
            fftw_destroy_plan(forward_);
            fftw_destroy_plan(inverse_);
        }
        fftw_free(series_freq_);
    }

    size_t num_offsets() const { return n_ - w_ + 1; }
    uint32_t window() const { return (uint32_t)w_; }

    /// out[t] = sum_i series[t+i] * pattern[i] for t in [0, n-w].
    void compute(std::span<const double> pattern, std::span<double> out) const {
        if (pattern.size() != w_) throw std::invalid_argument("pattern length mismatch");
        if (out.size() < num_offsets()) throw std::invalid_argument("output too small");

        double* real = (double*)fftw_malloc(sizeof(double) * fft_size_);
        fftw_complex* freq = (fftw_complex*)fftw_malloc(sizeof(fftw_complex) * bins_);
        std::memset(real, 0, sizeof(double) * fft_size_);
        for (size_t i = 0; i < w_; i++) real[i] = pattern[w_ - 1 - i];
        fftw_execute_dft_r2c(forward_, real, freq);

        const double scale = 1.0 / (double)fft_size_;
        for (size_t i = 0; i < bins_; i++) {
            const double re = freq[i][0] * series_freq_[i][0] - freq[i][1] * series_freq_[i][1];
            const double im = freq[i][0] * series_freq_[i][1] + freq[i][1] * series_freq_[i][0];
            freq[i][0] = re * scale;
            freq[i][1] = im * scale;
        }
        fftw_execute_dft_c2r(inverse_, freq, real);
        for (size_t t = 0; t < num_offsets(); t++) out[t] = real[t + w_ - 1];

        fftw_free(real);
        fftw_free(freq);
    }

private:
    size_t n_, w_;
    size_t fft_size_ = 0, bins_ = 0;
    fftw_complex* series_freq_ = nullptr;
    fftw_plan forward_{}, inverse_{};
};

} // namespace tsmotif
