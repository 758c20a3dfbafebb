#pragma once

// Derived constants of the leading-order theory and numerical certificates
// for the solvability identities behind them.
//
// With c^2 = (b k1 + a k2)/(a + b) the order-eps system is consistent because
// b (c^2 - k1) + a (c^2 - k2) = 0. At order eps^2 the consistency condition,
// after eliminating S1 v and integrating once in zeta with zero flux at
// infinity, reads
//     S_t = K S_zzz - d/dzeta h(S)
//     K   = (c^2 - k1)(c^2 - k2) / (2 c (a + b))
//     h(S) = gamma_h f(S, (a/b) S),   gamma_h = (c^2 - k2) / (2 c (a + b)).

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "kdva/core.hpp"
#include "kdva/spectral.hpp"

namespace kdva {

struct EffectiveParams {
    double c2 = 0.0;
    double c = 0.0;
    double K = 0.0;
    double gamma_h = 0.0;
};

/// Polynomial in one variable, coeffs[k] multiplies S^k.
struct UnivariatePolynomial {
    std::vector<double> coeffs;

    double operator()(double s) const {
        double acc = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * s + *it;
        return acc;
    }

    UnivariatePolynomial derivative() const {
        UnivariatePolynomial d;
        for (std::size_t k = 1; k < coeffs.size(); ++k) d.coeffs.push_back(static_cast<double>(k) * coeffs[k]);
        return d;
    }

    bool is_zero() const {
        return std::all_of(coeffs.begin(), coeffs.end(), [](double c) { return c == 0.0; });
    }
};

inline double effective_speed_squared(const PhysParams& params) {
    if (params.k1 == params.k2) return params.k1;
    const double c2 = (params.b * params.k1 + params.a * params.k2) / (params.a + params.b);
    return std::clamp(c2, std::min(params.k1, params.k2), std::max(params.k1, params.k2));
}

/// |b (c^2 - k1) + a (c^2 - k2)|; throws SolvabilityBroken above round-off level.
inline double check_solvability(const PhysParams& params) {
    const double c2 = effective_speed_squared(params);
    const double residual = std::abs(params.b * (c2 - params.k1) + params.a * (c2 - params.k2));
    const double threshold = 1e-12 * (params.a + params.b) * std::max(params.k1, params.k2);
    if (!(residual < threshold) && residual != 0.0) {
        fail(ErrorKind::SolvabilityBroken, "order-eps solvability identity violated: residual " +
                                               std::to_string(residual));
    }
    return residual;
}

inline double dispersion_coefficient(const PhysParams& params) {
    const double c2 = effective_speed_squared(params);
    return (c2 - params.k1) * (c2 - params.k2) / (2.0 * std::sqrt(c2) * (params.a + params.b));
}

inline double flux_coefficient(const PhysParams& params) {
    const double c2 = effective_speed_squared(params);
    return (c2 - params.k2) / (2.0 * std::sqrt(c2) * (params.a + params.b));
}

inline EffectiveParams effective_params(const PhysParams& params) {
    EffectiveParams eff;
    eff.c2 = effective_speed_squared(params);
    eff.c = std::sqrt(eff.c2);
    eff.K = dispersion_coefficient(params);
    eff.gamma_h = flux_coefficient(params);
    return eff;
}

/// h(S) = gamma * f(S, (a/b) S) expanded into powers of S.
inline UnivariatePolynomial nonlinear_flux(const PhysParams& params, const NonlinearitySpec& f, double gamma) {
    UnivariatePolynomial h;
    const double ratio = params.a / params.b;
    for (const auto& term : f.terms) {
        const auto degree = static_cast<std::size_t>(term.i + term.j);
        if (h.coeffs.size() <= degree) h.coeffs.resize(degree + 1, 0.0);
        h.coeffs[degree] += gamma * term.coeff * ipow(ratio, term.j);
    }
    return h;
}

inline UnivariatePolynomial nonlinear_flux(const PhysParams& params, const NonlinearitySpec& f) {
    return nonlinear_flux(params, f, flux_coefficient(params));
}

struct CancellationResult {
    double residual_linf = 0.0;
    double scale = 0.0;
};

/// Evaluates the order-eps^2 consistency condition
///   (c^2-k1) S1u_zz - 2c S0u_zt + (c^2-k2) S1v_zz - 2c S0v_zt
/// on a sampled profile S0u, with S1u = 0,
///   S1v = ((c^2 - k1) S_zz - f(S, (a/b) S)) / b,
/// S0v = (a/b) S0u and S0u_t replaced by K S_zzz - h(S)_z using the supplied
/// constants. Derivatives are spectral. `scale` is max(|S|, |f(S, aS/b)|).
inline CancellationResult order2_residual(const PhysParams& params, const NonlinearitySpec& f,
                                          const Grid1D& grid, std::span<const double> profile,
                                          const EffectiveParams& eff) {
    Fourier fourier(grid);
    const std::size_t n = grid.size();
    const double ratio = params.a / params.b;
    const double c2 = eff.c2;

    std::vector<double> fvals(n), hvals(n);
    const auto h = nonlinear_flux(params, f, eff.gamma_h);
    CancellationResult result;
    for (std::size_t i = 0; i < n; ++i) {
        fvals[i] = evaluate_nonlinearity(f, profile[i], ratio * profile[i]);
        hvals[i] = h(profile[i]);
        result.scale = std::max({result.scale, std::abs(profile[i]), std::abs(fvals[i])});
    }

    const auto s_zz = fourier.derivative(profile, 2);
    const auto s_zzz = fourier.derivative(profile, 3);
    const auto h_z = fourier.derivative(hvals, 1);

    std::vector<double> s1v(n), s0u_t(n);
    for (std::size_t i = 0; i < n; ++i) {
        s1v[i] = ((c2 - params.k1) * s_zz[i] - fvals[i]) / params.b;
        s0u_t[i] = eff.K * s_zzz[i] - h_z[i];
    }
    const auto s1v_zz = fourier.derivative(s1v, 2);
    const auto s0u_zt = fourier.derivative(s0u_t, 1);

    for (std::size_t i = 0; i < n; ++i) {
        const double s0v_zt = ratio * s0u_zt[i];
        const double lhs = (c2 - params.k2) * s1v_zz[i] - 2.0 * eff.c * s0u_zt[i] - 2.0 * eff.c * s0v_zt;
        result.residual_linf = std::max(result.residual_linf, std::abs(lhs));
    }
    return result;
}

/// Certifies the adopted (K, gamma_h); throws DerivationMismatch when the
/// residual exceeds 1e-6 * scale.
inline double verify_order2_cancellation(const PhysParams& params, const NonlinearitySpec& f, const Grid1D& grid,
                                         std::span<const double> profile) {
    const auto result = order2_residual(params, f, grid, profile, effective_params(params));
    if (result.residual_linf > 1e-6 * result.scale) {
        fail(ErrorKind::DerivationMismatch,
             "order-eps^2 solvability residual " + std::to_string(result.residual_linf) + " exceeds tolerance");
    }
    return result.residual_linf;
}

}  // namespace kdva
