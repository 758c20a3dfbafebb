#pragma once

// Pseudo-spectral solver for the generalized KdV equations of the two
// pseudo-characteristic families:
//   Left  (zeta = (x - ct)/eps):  S_t =  K S_zzz - d/dzeta h(S)
//   Right (zeta = (x + ct)/eps):  S_t = -K S_zzz + d/dzeta h(S)
// Time stepping is the integrating-factor RK4 scheme: the dispersive term is
// propagated exactly in Fourier space, the flux term by classical RK4 with
// the 2/3 rule applied to h(S).

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "kdva/core.hpp"
#include "kdva/effective.hpp"
#include "kdva/full_solver.hpp"
#include "kdva/spectral.hpp"

namespace kdva {

enum class Direction { Left, Right };

inline double direction_sign(Direction d) { return d == Direction::Left ? 1.0 : -1.0; }

struct KdvState {
    Grid1D grid;
    std::vector<double> S;
    double t = 0.0;
    Direction direction = Direction::Left;

    double mass() const {
        double sum = 0.0;
        for (double s : S) sum += s;
        return sum * grid.dx();
    }

    double square_integral() const {
        double sum = 0.0;
        for (double s : S) sum += s * s;
        return sum * grid.dx();
    }

    double max_abs() const {
        double m = 0.0;
        for (double s : S) m = std::max(m, std::abs(s));
        return m;
    }
};

/// Right side of the evolution equation, pseudo-spectrally.
inline std::vector<double> kdv_rhs(const KdvState& state, const EffectiveParams& eff,
                                   const UnivariatePolynomial& h) {
    Fourier fourier(state.grid);
    const double sign = direction_sign(state.direction);
    auto s_hat = fourier.forward(state.S);
    std::vector<double> flux(state.S.size());
    for (std::size_t i = 0; i < flux.size(); ++i) flux[i] = h(state.S[i]);
    auto flux_hat = fourier.forward(flux);
    fourier.dealias(flux_hat);

    std::vector<Fourier::Complex> rhs_hat(fourier.modes());
    for (std::size_t j = 0; j < fourier.modes(); ++j) {
        rhs_hat[j] = sign * (eff.K * fourier.derivative_multiplier(j, 3) * s_hat[j] -
                             fourier.derivative_multiplier(j, 1) * flux_hat[j]);
    }
    return fourier.backward(rhs_hat);
}

/// Default step 0.2 dx / max(1, max |h'(S)|).
inline double kdv_default_dt(const KdvState& state, const UnivariatePolynomial& h) {
    const auto dh = h.derivative();
    double speed = 1.0;
    for (double s : state.S) speed = std::max(speed, std::abs(dh(s)));
    return 0.2 * state.grid.dx() / speed;
}

/// Integrating-factor RK4 integrator. Holds the solution in Fourier space
/// between steps, so the mean mode is untouched and h = 0 runs are exact.
class KdvIntegrator {
public:
    using Complex = Fourier::Complex;

    KdvIntegrator(const KdvState& initial, const EffectiveParams& eff, UnivariatePolynomial h)
        : fourier_(initial.grid),
          grid_(initial.grid),
          direction_(initial.direction),
          h_(std::move(h)),
          linear_(h_.is_zero()),
          t_(initial.t),
          work_real_(initial.grid.size()) {
        const double sign = direction_sign(direction_);
        const std::size_t m = fourier_.modes();
        linear_op_.resize(m);
        flux_op_.resize(m);
        for (std::size_t j = 0; j < m; ++j) {
            linear_op_[j] = sign * eff.K * fourier_.derivative_multiplier(j, 3);
            flux_op_[j] = -sign * fourier_.derivative_multiplier(j, 1);
        }
        s_hat_ = fourier_.forward(initial.S);
        for (auto* buf : {&ka_, &kb_, &kc_, &kd_, &stage_, &half_, &full_}) buf->resize(m);
    }

    void step(double dt) {
        const std::size_t m = fourier_.modes();
        if (dt != cached_dt_) {
            for (std::size_t j = 0; j < m; ++j) {
                half_[j] = std::exp(linear_op_[j] * (0.5 * dt));
                full_[j] = std::exp(linear_op_[j] * dt);
            }
            cached_dt_ = dt;
        }
        if (linear_) {
            for (std::size_t j = 0; j < m; ++j) s_hat_[j] *= full_[j];
        } else {
            nonlinear(s_hat_, ka_, dt);
            for (std::size_t j = 0; j < m; ++j) stage_[j] = half_[j] * (s_hat_[j] + 0.5 * ka_[j]);
            nonlinear(stage_, kb_, dt);
            for (std::size_t j = 0; j < m; ++j) stage_[j] = half_[j] * s_hat_[j] + 0.5 * kb_[j];
            nonlinear(stage_, kc_, dt);
            for (std::size_t j = 0; j < m; ++j) stage_[j] = full_[j] * s_hat_[j] + half_[j] * kc_[j];
            nonlinear(stage_, kd_, dt);
            for (std::size_t j = 0; j < m; ++j) {
                s_hat_[j] = full_[j] * s_hat_[j] +
                            (full_[j] * ka_[j] + 2.0 * half_[j] * (kb_[j] + kc_[j]) + kd_[j]) / 6.0;
            }
        }
        t_ += dt;
    }

    KdvState state() {
        KdvState out{grid_, fourier_.backward(s_hat_), t_, direction_};
        if (!std::all_of(out.S.begin(), out.S.end(), [](double s) { return std::isfinite(s); })) {
            fail(ErrorKind::NonFiniteState, "KdV state became non-finite at t = " + std::to_string(t_));
        }
        return out;
    }

    double time() const noexcept { return t_; }
    void set_time(double t) noexcept { t_ = t; }

private:
    void nonlinear(std::span<const Complex> hat, std::span<Complex> out, double dt) {
        fourier_.backward(hat, work_real_);
        for (double& s : work_real_) s = h_(s);
        fourier_.forward(work_real_, out);
        fourier_.dealias(out);
        for (std::size_t j = 0; j < out.size(); ++j) out[j] *= dt * flux_op_[j];
    }

    Fourier fourier_;
    Grid1D grid_;
    Direction direction_;
    UnivariatePolynomial h_;
    bool linear_;
    double t_;
    double cached_dt_ = -1.0;
    std::vector<Complex> linear_op_, flux_op_, s_hat_;
    std::vector<Complex> ka_, kb_, kc_, kd_, stage_, half_, full_;
    std::vector<double> work_real_;
};

inline KdvState kdv_step(const KdvState& state, const EffectiveParams& eff, const UnivariatePolynomial& h,
                         double dt) {
    KdvIntegrator integrator(state, eff, h);
    integrator.step(dt);
    return integrator.state();
}

struct KdvRunOptions {
    double dt = 0.0;            ///< 0 selects kdv_default_dt, re-evaluated per output interval
    double decay_tolerance = 1e-6;  ///< final edge magnitude relative to max |S|; <= 0 disables
};

/// Snapshots at ascending `output_times` (each >= initial.t).
inline std::vector<KdvState> simulate_kdv(const KdvState& initial, const EffectiveParams& eff,
                                          const UnivariatePolynomial& h, std::span<const double> output_times,
                                          const KdvRunOptions& options = {}) {
    KdvIntegrator integrator(initial, eff, h);
    KdvState current = initial;
    std::vector<KdvState> snapshots;
    snapshots.reserve(output_times.size());
    for (double target : output_times) {
        if (target < integrator.time() - 1e-12) {
            fail(ErrorKind::ValidationError, "KdV output times must be ascending", "time.output_times");
        }
        const double span = target - integrator.time();
        if (span > 0.0) {
            const double dt_max = options.dt > 0.0 ? options.dt : kdv_default_dt(current, h);
            const auto steps = static_cast<long>(std::ceil(span / dt_max - 1e-9));
            const double dt = span / static_cast<double>(steps);
            for (long s = 0; s < steps; ++s) integrator.step(dt);
            integrator.set_time(target);
            current = integrator.state();
        }
        snapshots.push_back(current);
    }
    if (options.decay_tolerance > 0.0 && !snapshots.empty()) {
        const auto& last = snapshots.back();
        const double peak = last.max_abs();
        if (peak > 0.0 && detail::edge_magnitude(last.S) > options.decay_tolerance * peak) {
            fail(ErrorKind::BoxTooSmall, "KdV solution is not decayed at the zeta-box edge");
        }
    }
    return snapshots;
}

}  // namespace kdva
