#pragma once

// Domain types shared by every module: physical constants, the small
// parameter, the polynomial coupling nonlinearity, periodic grids, field
// state and initial-condition profiles.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kdva/errors.hpp"

namespace kdva {

/// Constants of the coupled string system
///   eps^3 (u_tt - k1 u_xx) = -a u + b v + eps^m f(u, v)
///   eps^3 (v_tt - k2 v_xx) =  a u - b v - eps^m f(u, v)
/// k1 and k2 are squared wave speeds.
struct PhysParams {
    double k1 = 1.0;
    double k2 = 4.0;
    double a = 1.0;
    double b = 1.0;

    void validate() const {
        auto positive = [](double value, const char* field) {
            if (!(std::isfinite(value) && value > 0.0)) {
                fail(ErrorKind::ValidationError, std::string(field) + " must be finite and > 0", field);
            }
        };
        positive(k1, "params.k1");
        positive(k2, "params.k2");
        positive(a, "params.a");
        positive(b, "params.b");
    }

    double max_speed() const { return std::sqrt(std::max(k1, k2)); }
};

class Epsilon {
public:
    explicit Epsilon(double value) : value_(value) {
        if (!(std::isfinite(value) && value > 0.0 && value <= 1.0)) {
            fail(ErrorKind::ValidationError, "epsilon must lie in (0, 1]", "epsilon");
        }
    }
    double value() const noexcept { return value_; }

private:
    double value_;
};

inline double ipow(double base, int exponent) {
    double result = 1.0;
    for (int i = 0; i < exponent; ++i) result *= base;
    return result;
}

/// One monomial coeff * u^i * v^j.
struct Term {
    int i = 0;
    int j = 0;
    double coeff = 0.0;
};

/// f(u, v) = sum coeff * u^i v^j. `eps_power` is the power m of epsilon
/// multiplying f in the coupled system; 2 reproduces the original system,
/// 1 is the scaling under which f reaches the leading-order burst equation.
struct NonlinearitySpec {
    std::vector<Term> terms;
    int eps_power = 2;

    void validate() const {
        std::set<std::pair<int, int>> seen;
        for (std::size_t k = 0; k < terms.size(); ++k) {
            const auto& term = terms[k];
            const std::string field = "nonlinearity.terms[" + std::to_string(k) + "]";
            if (term.i < 0 || term.j < 0) {
                fail(ErrorKind::ValidationError, field + ": exponents must be >= 0", field);
            }
            if (!std::isfinite(term.coeff)) {
                fail(ErrorKind::ValidationError, field + ": coefficient must be finite", field + ".coeff");
            }
            if (!seen.emplace(term.i, term.j).second) {
                fail(ErrorKind::ValidationError, field + ": duplicate exponent pair", field);
            }
        }
        if (eps_power < 0) {
            fail(ErrorKind::ValidationError, "nonlinearity.eps_power must be >= 0", "nonlinearity.eps_power");
        }
    }

    bool is_zero() const {
        return std::all_of(terms.begin(), terms.end(), [](const Term& t) { return t.coeff == 0.0; });
    }
};

inline double evaluate_nonlinearity(const NonlinearitySpec& f, double u, double v) {
    double sum = 0.0;
    for (const auto& term : f.terms) sum += term.coeff * ipow(u, term.i) * ipow(v, term.j);
    return sum;
}

/// Point on the slow manifold a u - b v = 0 above u.
inline double equilibrium_projection(const PhysParams& params, double u) { return params.a / params.b * u; }

/// Uniform periodic grid x_i = -L + i dx on [-L, L).
class Grid1D {
public:
    Grid1D(double half_length, std::size_t n) : half_length_(half_length), n_(n) {
        if (!(std::isfinite(half_length) && half_length > 0.0)) {
            fail(ErrorKind::ValidationError, "grid half-length must be > 0", "grid.L");
        }
        if (n < 8 || !std::has_single_bit(n)) {
            fail(ErrorKind::ValidationError, "grid size must be a power of two >= 8", "grid.n");
        }
    }

    double half_length() const noexcept { return half_length_; }
    std::size_t size() const noexcept { return n_; }
    double dx() const noexcept { return 2.0 * half_length_ / static_cast<double>(n_); }
    double node(std::size_t i) const noexcept { return -half_length_ + static_cast<double>(i) * dx(); }

    std::vector<double> nodes() const {
        std::vector<double> x(n_);
        for (std::size_t i = 0; i < n_; ++i) x[i] = node(i);
        return x;
    }

    bool operator==(const Grid1D& other) const = default;

private:
    double half_length_;
    std::size_t n_;
};

/// u, v and their time derivatives p = u_t, q = v_t at `time`.
struct FieldPair {
    std::vector<double> u, v, p, q;
    double time = 0.0;

    static FieldPair zeros(std::size_t n, double time = 0.0) {
        return FieldPair{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                         std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), time};
    }

    std::size_t size() const noexcept { return u.size(); }

    bool all_finite() const {
        auto finite = [](const std::vector<double>& a) {
            return std::all_of(a.begin(), a.end(), [](double x) { return std::isfinite(x); });
        };
        return finite(u) && finite(v) && finite(p) && finite(q);
    }
};

enum class ProfileShape { Zero, Gaussian, Sech2, SmoothedStep };

/// Localized profile used for initial displacement and velocity.
///   Gaussian:      A exp(-((x - x0)/w)^2)
///   Sech2:         A sech^2((x - x0)/w)
///   SmoothedStep:  A/2 [tanh((x - x0 + P)/w) - tanh((x - x0 - P)/w)], a plateau
///                  of half-width P with smoothed edges. Not Gaussian-decaying.
struct Profile {
    ProfileShape shape = ProfileShape::Zero;
    double amplitude = 0.0;
    double width = 1.0;
    double center = 0.0;
    double plateau = 0.0;

    static Profile gaussian(double amplitude, double width, double center = 0.0) {
        return {ProfileShape::Gaussian, amplitude, width, center, 0.0};
    }
    static Profile sech2(double amplitude, double width, double center = 0.0) {
        return {ProfileShape::Sech2, amplitude, width, center, 0.0};
    }
    static Profile smoothed_step(double amplitude, double width, double plateau, double center = 0.0) {
        return {ProfileShape::SmoothedStep, amplitude, width, center, plateau};
    }

    double operator()(double x) const {
        const double y = (x - center) / width;
        switch (shape) {
            case ProfileShape::Zero: return 0.0;
            case ProfileShape::Gaussian: return amplitude * std::exp(-y * y);
            case ProfileShape::Sech2: {
                const double s = 1.0 / std::cosh(y);
                return amplitude * s * s;
            }
            case ProfileShape::SmoothedStep: {
                const double r = plateau / width;
                return 0.5 * amplitude * (std::tanh(y + r) - std::tanh(y - r));
            }
        }
        return 0.0;
    }

    double derivative(double x) const {
        const double y = (x - center) / width;
        switch (shape) {
            case ProfileShape::Zero: return 0.0;
            case ProfileShape::Gaussian: return -2.0 * y / width * amplitude * std::exp(-y * y);
            case ProfileShape::Sech2: {
                const double s = 1.0 / std::cosh(y);
                return -2.0 * amplitude * s * s * std::tanh(y) / width;
            }
            case ProfileShape::SmoothedStep: {
                const double r = plateau / width;
                const double s1 = 1.0 / std::cosh(y + r);
                const double s2 = 1.0 / std::cosh(y - r);
                return 0.5 * amplitude * (s1 * s1 - s2 * s2) / width;
            }
        }
        return 0.0;
    }

    bool gaussian_decay() const { return shape == ProfileShape::Zero || shape == ProfileShape::Gaussian; }

    /// Distance from `center` beyond which |profile| < rel_tol * |amplitude|.
    double extent(double rel_tol = 1e-12) const {
        if (shape == ProfileShape::Zero || amplitude == 0.0) return 0.0;
        const double threshold = rel_tol * std::abs(amplitude);
        auto above = [&](double r) {
            return std::max(std::abs((*this)(center + r)), std::abs((*this)(center - r))) >= threshold;
        };
        double hi = width + plateau;
        while (above(hi)) hi *= 2.0;
        double lo = 0.0;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (lo + hi);
            (above(mid) ? lo : hi) = mid;
        }
        return hi;
    }

    void validate(const std::string& field) const {
        if (!std::isfinite(amplitude) || !std::isfinite(center)) {
            fail(ErrorKind::ValidationError, field + ": amplitude and center must be finite", field);
        }
        if (shape != ProfileShape::Zero && !(std::isfinite(width) && width > 0.0)) {
            fail(ErrorKind::ValidationError, field + ".width must be > 0", field + ".width");
        }
        if (shape == ProfileShape::SmoothedStep && !(std::isfinite(plateau) && plateau >= 0.0)) {
            fail(ErrorKind::ValidationError, field + ".plateau must be >= 0", field + ".plateau");
        }
    }
};

enum class IcKind { Smooth, Burst };

/// Smooth data is sampled at x, burst data at x / eps.
struct InitialConditionSpec {
    IcKind kind = IcKind::Smooth;
    Profile u0;
    Profile phi;

    double argument(double x, double eps) const { return kind == IcKind::Burst ? x / eps : x; }
};

namespace detail {

inline void check_profile_decay(const Profile& profile, double edge, const char* name) {
    if (profile.shape == ProfileShape::Zero || profile.amplitude == 0.0) return;
    const double limit = 1e-12 * std::abs(profile.amplitude);
    const double worst = std::max(std::abs(profile(edge)), std::abs(profile(-edge)));
    if (worst >= limit) {
        fail(ErrorKind::DecayViolation,
             std::string(name) + " is not decayed at the box edge (|profile| = " + std::to_string(worst) + ")",
             std::string("initial.") + name);
    }
}

}  // namespace detail

/// Samples the initial data on the slow manifold: v = (a/b) u, q = (a/b) p.
inline FieldPair sample_initial(const InitialConditionSpec& spec, const Grid1D& grid, Epsilon eps,
                                const PhysParams& params) {
    const double edge = spec.argument(grid.half_length(), eps.value());
    detail::check_profile_decay(spec.u0, edge, "u0");
    detail::check_profile_decay(spec.phi, edge, "phi");

    FieldPair state = FieldPair::zeros(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double arg = spec.argument(grid.node(i), eps.value());
        state.u[i] = spec.u0(arg);
        state.p[i] = spec.phi(arg);
        state.v[i] = equilibrium_projection(params, state.u[i]);
        state.q[i] = equilibrium_projection(params, state.p[i]);
    }
    return state;
}

}  // namespace kdva
