#pragma once

// Leading-order burst asymptotics: two KdV solutions carried along the
// pseudo-characteristics x -/+ c t in the stretched variables
// zeta_{1,2} = (x -/+ c t)/eps, summed, with v = (a/b) u.

#include <cmath>
#include <future>
#include <span>
#include <utility>
#include <vector>

#include "kdva/core.hpp"
#include "kdva/effective.hpp"
#include "kdva/full_solver.hpp"
#include "kdva/kdv.hpp"
#include "kdva/spectral.hpp"

namespace kdva {

struct BurstAsymptotics {
    std::vector<KdvState> left;   ///< on zeta1 = (x - c t)/eps
    std::vector<KdvState> right;  ///< on zeta2 = (x + c t)/eps
    double eps = 0.0;
    double c = 0.0;
    EffectiveParams eff;
    UnivariatePolynomial h;
};

/// Equal split of the burst displacement between the two families; the
/// initial velocity is not represented at leading order.
inline std::pair<KdvState, KdvState> split_initial_burst(const InitialConditionSpec& spec, const Grid1D& zeta_grid) {
    std::vector<double> half(zeta_grid.size());
    for (std::size_t i = 0; i < half.size(); ++i) half[i] = 0.5 * spec.u0(zeta_grid.node(i));
    return {KdvState{zeta_grid, half, 0.0, Direction::Left}, KdvState{zeta_grid, half, 0.0, Direction::Right}};
}

/// Runs both KdV equations (concurrently) to every time in `times`.
inline BurstAsymptotics build_burst_asymptotics(const InitialConditionSpec& spec, const PhysParams& params,
                                                const NonlinearitySpec& f, Epsilon eps, const Grid1D& zeta_grid,
                                                std::span<const double> times, const KdvRunOptions& options = {}) {
    BurstAsymptotics asym;
    asym.eps = eps.value();
    asym.eff = effective_params(params);
    asym.c = asym.eff.c;
    asym.h = nonlinear_flux(params, f);

    auto [left0, right0] = split_initial_burst(spec, zeta_grid);
    std::vector<double> owned_times(times.begin(), times.end());
    auto right_run = std::async(std::launch::async, [&, right0 = std::move(right0)] {
        return simulate_kdv(right0, asym.eff, asym.h, owned_times, options);
    });
    asym.left = simulate_kdv(left0, asym.eff, asym.h, owned_times, options);
    asym.right = right_run.get();
    return asym;
}

namespace detail {

inline const KdvState& snapshot_at(const std::vector<KdvState>& run, double t) {
    for (const auto& s : run) {
        if (std::abs(s.t - t) <= 1e-12 * std::max(1.0, std::abs(t))) return s;
    }
    fail(ErrorKind::ValidationError, "time " + std::to_string(t) + " is not present in the KdV trajectory",
         "time.output_times");
}

/// Band-limited evaluation of one or more spectral fields on a zeta-grid.
class ZetaSampler {
public:
    ZetaSampler(const KdvState& state, std::span<const std::vector<double>* const> fields)
        : fourier_(state.grid), half_length_(state.grid.half_length()) {
        const double peak = state.max_abs();
        decayed_ = peak == 0.0 || edge_magnitude(state.S) <= 1e-6 * peak;
        for (const auto* field : fields) hats_.push_back(fourier_.forward(*field));
    }

    /// Returns false (and leaves `out` untouched) when zeta is outside the box.
    bool sample(double zeta, std::span<double> out) const {
        if (zeta < -half_length_ || zeta > half_length_) {
            if (!decayed_) {
                fail(ErrorKind::OutOfBox, "zeta = " + std::to_string(zeta) +
                                              " lies outside a KdV box whose solution is not decayed");
            }
            return false;
        }
        for (std::size_t k = 0; k < hats_.size(); ++k) out[k] = fourier_.interpolate(hats_[k], zeta);
        return true;
    }

private:
    Fourier fourier_;
    double half_length_;
    bool decayed_ = true;
    std::vector<std::vector<Fourier::Complex>> hats_;
};

}  // namespace detail

/// u(x, t) = S_left((x - ct)/eps, t) + S_right((x + ct)/eps, t), v = (a/b) u.
inline std::pair<std::vector<double>, std::vector<double>> compose(const BurstAsymptotics& asym,
                                                                   const PhysParams& params,
                                                                   std::span<const double> x, double t) {
    const auto& left = detail::snapshot_at(asym.left, t);
    const auto& right = detail::snapshot_at(asym.right, t);
    const std::vector<double>* lf[] = {&left.S};
    const std::vector<double>* rf[] = {&right.S};
    const detail::ZetaSampler ls(left, lf);
    const detail::ZetaSampler rs(right, rf);

    std::vector<double> u(x.size(), 0.0), v(x.size());
    double value[1];
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (ls.sample((x[i] - asym.c * t) / asym.eps, value)) u[i] += value[0];
        if (rs.sample((x[i] + asym.c * t) / asym.eps, value)) u[i] += value[0];
        v[i] = equilibrium_projection(params, u[i]);
    }
    return {std::move(u), std::move(v)};
}

/// Composed fields with rates u_t = sum over families of (S_t -/+ (c/eps) S_zeta).
inline FieldPair compose_fields(const BurstAsymptotics& asym, const PhysParams& params, const Grid1D& grid,
                                double t) {
    FieldPair out = FieldPair::zeros(grid.size(), t);
    const double sweep = asym.c / asym.eps;
    for (const auto* run : {&asym.left, &asym.right}) {
        const auto& snap = detail::snapshot_at(*run, t);
        const double sign = snap.direction == Direction::Left ? -1.0 : 1.0;
        Fourier fourier(snap.grid);
        const auto s_z = fourier.derivative(snap.S, 1);
        const auto s_t = kdv_rhs(snap, asym.eff, asym.h);
        const std::vector<double>* fields[] = {&snap.S, &s_z, &s_t};
        const detail::ZetaSampler sampler(snap, fields);
        double value[3];
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (sampler.sample((grid.node(i) + sign * asym.c * t) / asym.eps, value)) {
                out.u[i] += value[0];
                out.p[i] += value[2] + sign * sweep * value[1];
            }
        }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out.v[i] = equilibrium_projection(params, out.u[i]);
        out.q[i] = equilibrium_projection(params, out.p[i]);
    }
    return out;
}

}  // namespace kdva
