#pragma once

// Real-to-complex FFT workspace on a periodic box plus the Fourier
// multipliers the solvers need (derivatives, 2/3-rule truncation,
// band-limited interpolation).

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <mutex>
#include <numbers>
#include <span>
#include <vector>

#include "kdva/core.hpp"

namespace kdva {

/// FFTW's planner is not thread-safe; execution is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

/// Owns aligned buffers and a forward/backward plan pair for one size.
/// Plans are built with FFTW_ESTIMATE so results are reproducible run to run.
/// Not shareable across threads; create one per simulation.
class Fourier {
public:
    using Complex = std::complex<double>;

    explicit Fourier(const Grid1D& grid) : grid_(grid), n_(grid.size()), nc_(grid.size() / 2 + 1) {
        real_ = fftw_alloc_real(n_);
        spec_ = fftw_alloc_complex(nc_);
        std::lock_guard lock(fftw_planner_mutex());
        forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), real_, spec_, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), spec_, real_, FFTW_ESTIMATE);

        wavenumber_.resize(nc_);
        const double dk = std::numbers::pi / grid.half_length();
        for (std::size_t j = 0; j < nc_; ++j) wavenumber_[j] = dk * static_cast<double>(j);
    }

    Fourier(const Fourier&) = delete;
    Fourier& operator=(const Fourier&) = delete;

    ~Fourier() {
        {
            std::lock_guard lock(fftw_planner_mutex());
            fftw_destroy_plan(forward_);
            fftw_destroy_plan(backward_);
        }
        fftw_free(real_);
        fftw_free(spec_);
    }

    const Grid1D& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return n_; }
    std::size_t modes() const noexcept { return nc_; }
    std::size_t nyquist() const noexcept { return nc_ - 1; }

    /// Non-negative wavenumber of mode j (index n/2 is the Nyquist mode).
    double wavenumber(std::size_t j) const noexcept { return wavenumber_[j]; }

    /// Unnormalized forward transform.
    void forward(std::span<const double> in, std::span<Complex> out) {
        std::copy(in.begin(), in.end(), real_);
        fftw_execute(forward_);
        const auto* s = reinterpret_cast<const Complex*>(spec_);
        std::copy(s, s + nc_, out.begin());
    }

    /// Inverse transform including the 1/n normalization.
    void backward(std::span<const Complex> in, std::span<double> out) {
        auto* s = reinterpret_cast<Complex*>(spec_);
        std::copy(in.begin(), in.end(), s);
        fftw_execute(backward_);
        const double scale = 1.0 / static_cast<double>(n_);
        for (std::size_t i = 0; i < n_; ++i) out[i] = real_[i] * scale;
    }

    std::vector<Complex> forward(std::span<const double> in) {
        std::vector<Complex> out(nc_);
        forward(in, out);
        return out;
    }

    std::vector<double> backward(std::span<const Complex> in) {
        std::vector<double> out(n_);
        backward(in, out);
        return out;
    }

    /// (i k)^order. Odd orders vanish on the Nyquist mode so real data stays real.
    Complex derivative_multiplier(std::size_t j, int order) const {
        if (order % 2 == 1 && j == nyquist()) return 0.0;
        const Complex ik(0.0, wavenumber_[j]);
        Complex m = 1.0;
        for (int o = 0; o < order; ++o) m *= ik;
        return m;
    }

    std::vector<double> derivative(std::span<const double> in, int order) {
        auto hat = forward(in);
        for (std::size_t j = 0; j < nc_; ++j) hat[j] *= derivative_multiplier(j, order);
        return backward(hat);
    }

    /// 2/3 rule: zero every mode with index above n/3.
    void dealias(std::span<Complex> hat) const {
        const std::size_t cutoff = n_ / 3;
        for (std::size_t j = cutoff + 1; j < nc_; ++j) hat[j] = 0.0;
    }

    /// Trigonometric interpolant of the data whose forward transform is `hat`,
    /// evaluated at an arbitrary (periodically wrapped) point.
    double interpolate(std::span<const Complex> hat, double x) const {
        const double theta = std::numbers::pi * (x + grid_.half_length()) / grid_.half_length();
        const Complex step(std::cos(theta), std::sin(theta));
        Complex phase = step;
        double sum = hat[0].real();
        for (std::size_t j = 1; j < nyquist(); ++j) {
            sum += 2.0 * (hat[j] * phase).real();
            phase *= step;
        }
        sum += (hat[nyquist()] * phase).real();
        return sum / static_cast<double>(n_);
    }

private:
    Grid1D grid_;
    std::size_t n_;
    std::size_t nc_;
    double* real_ = nullptr;
    fftw_complex* spec_ = nullptr;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
    std::vector<double> wavenumber_;
};

}  // namespace kdva
