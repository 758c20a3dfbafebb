#pragma once

// Leading-order regular asymptotics for smooth on-manifold data: u0_bar solves
// the effective wave equation u_tt = c^2 u_xx with the original initial data,
// v0_bar = (a/b) u0_bar, and the first correction of v with u1_bar = 0.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>

#include "kdva/core.hpp"
#include "kdva/effective.hpp"

namespace kdva {

namespace detail {

inline double integrate_profile(const Profile& profile, double lo, double hi) {
    if (lo == hi || profile.shape == ProfileShape::Zero || profile.amplitude == 0.0) return 0.0;
    auto integrand = [&profile](double s) { return profile(s); };
    double error = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, lo, hi, 20, 1e-14, &error);
}

}  // namespace detail

/// d'Alembert solution with wave speed c:
///   1/2 [u0(x - ct) + u0(x + ct)] + 1/(2c) int_{x-ct}^{x+ct} phi(s) ds.
inline double dalembert_u0(const InitialConditionSpec& spec, double c, double x, double t) {
    if (t == 0.0) return spec.u0(x);
    const double left = x - c * t;
    const double right = x + c * t;
    return 0.5 * (spec.u0(left) + spec.u0(right)) + detail::integrate_profile(spec.phi, left, right) / (2.0 * c);
}

/// Time derivative of the d'Alembert solution.
inline double dalembert_u0_rate(const InitialConditionSpec& spec, double c, double x, double t) {
    const double left = x - c * t;
    const double right = x + c * t;
    return 0.5 * c * (spec.u0.derivative(right) - spec.u0.derivative(left)) +
           0.5 * (spec.phi(right) + spec.phi(left));
}

inline double v0_from_u0(const PhysParams& params, double u0_value) {
    return equilibrium_projection(params, u0_value);
}

/// First correction of v on the slow manifold with u1_bar = 0. Balancing
/// -a u + b v against -eps^m f gives v = (a/b) u - eps^m f / b, so the
/// correction is -f(u0, (a/b) u0) / b.
inline double v1_correction(const PhysParams& params, const NonlinearitySpec& f, double u0_value) {
    return -evaluate_nonlinearity(f, u0_value, v0_from_u0(params, u0_value)) / params.b;
}

/// (u0_bar, v0_bar) and their rates sampled on a grid.
inline FieldPair regular_fields(const InitialConditionSpec& spec, const PhysParams& params, const Grid1D& grid,
                                double t) {
    const double c = std::sqrt(effective_speed_squared(params));
    FieldPair fields = FieldPair::zeros(grid.size(), t);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.node(i);
        fields.u[i] = dalembert_u0(spec, c, x, t);
        fields.p[i] = dalembert_u0_rate(spec, c, x, t);
        fields.v[i] = v0_from_u0(params, fields.u[i]);
        fields.q[i] = v0_from_u0(params, fields.p[i]);
    }
    return fields;
}

/// v0_bar + eps^m v1_bar on the grid, the improved approximation of v.
inline std::vector<double> corrected_v(const FieldPair& regular, const PhysParams& params,
                                       const NonlinearitySpec& f, Epsilon eps) {
    const double scale = ipow(eps.value(), f.eps_power);
    std::vector<double> v(regular.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = regular.v[i] + scale * v1_correction(params, f, regular.u[i]);
    return v;
}

}  // namespace kdva
