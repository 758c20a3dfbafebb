#pragma once

// Cross-validation of the asymptotic constructions against the full solver:
// error norms, PDE residuals, epsilon sweeps with a fitted convergence order,
// and the zero-initial-remainder check for smooth data.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "kdva/composer.hpp"
#include "kdva/core.hpp"
#include "kdva/effective.hpp"
#include "kdva/full_solver.hpp"
#include "kdva/kdv.hpp"
#include "kdva/regular.hpp"
#include "kdva/spectral.hpp"

namespace kdva {

enum class SweepMode { SmoothRegular, BurstKdv };

/// Everything needed to run one comparison except epsilon.
struct Problem {
    PhysParams params;
    NonlinearitySpec f;
    InitialConditionSpec initial;
    Grid1D grid{30.0, 1024};
    Grid1D zeta_grid{40.0, 512};
    SolverConfig solver;
    KdvRunOptions kdv;
};

struct ErrorNorms {
    double l2_u = 0.0;
    double linf_u = 0.0;
    double l2_v = 0.0;
    double linf_v = 0.0;
};

struct ErrorRow {
    double eps = 0.0;
    double err_l2_u = 0.0;
    double err_linf_u = 0.0;
    double err_l2_v = 0.0;
    double err_linf_v = 0.0;
    double pde_residual_linf = 0.0;
    double seconds = 0.0;
};

struct ErrorReport {
    SweepMode mode = SweepMode::SmoothRegular;
    std::vector<ErrorRow> rows;  ///< by decreasing eps
    double fitted_order = std::numeric_limits<double>::quiet_NaN();
};

/// dx-weighted discrete L2 and max norms of (full - approx).
inline ErrorNorms error_norms(const FieldPair& full, const FieldPair& approx, const Grid1D& grid) {
    if (full.size() != grid.size() || approx.size() != grid.size() || approx.v.size() != full.v.size()) {
        fail(ErrorKind::GridMismatch, "fields do not live on the same grid");
    }
    if (std::abs(full.time - approx.time) > 1e-12 * std::max(1.0, std::abs(full.time))) {
        fail(ErrorKind::GridMismatch, "fields are given at different times");
    }
    ErrorNorms n;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double du = full.u[i] - approx.u[i];
        const double dv = full.v[i] - approx.v[i];
        n.l2_u += du * du;
        n.l2_v += dv * dv;
        n.linf_u = std::max(n.linf_u, std::abs(du));
        n.linf_v = std::max(n.linf_v, std::abs(dv));
    }
    n.l2_u = std::sqrt(n.l2_u * grid.dx());
    n.l2_v = std::sqrt(n.l2_v * grid.dx());
    return n;
}

struct PdeResidual {
    std::vector<double> u;  ///< defect of the u equation at the middle snapshot
    std::vector<double> v;

    double linf() const {
        double m = 0.0;
        for (double r : u) m = std::max(m, std::abs(r));
        for (double r : v) m = std::max(m, std::abs(r));
        return m;
    }
    double l2(const Grid1D& grid) const {
        double s = 0.0;
        for (double r : u) s += r * r;
        for (double r : v) s += r * r;
        return std::sqrt(s * grid.dx());
    }
};

/// Defect of both equations at the middle of three equally spaced snapshots:
/// spectral x-derivatives, centered second difference in time.
inline PdeResidual pde_residual(std::span<const FieldPair> snapshots, const Grid1D& grid, const PhysParams& params,
                                const NonlinearitySpec& f, Epsilon eps) {
    if (snapshots.size() < 3) fail(ErrorKind::InsufficientSnapshots, "need three consecutive snapshots");
    const auto& s0 = snapshots[snapshots.size() / 2 - 1];
    const auto& s1 = snapshots[snapshots.size() / 2];
    const auto& s2 = snapshots[snapshots.size() / 2 + 1];
    const double h1 = s1.time - s0.time;
    const double h2 = s2.time - s1.time;
    if (!(h1 > 0.0) || std::abs(h1 - h2) > 1e-9 * h1) {
        fail(ErrorKind::InsufficientSnapshots, "snapshots must be strictly increasing and equally spaced");
    }
    for (const auto* s : {&s0, &s1, &s2}) {
        if (s->size() != grid.size()) fail(ErrorKind::GridMismatch, "snapshot size differs from grid");
    }

    Fourier fourier(grid);
    const auto uxx = fourier.derivative(s1.u, 2);
    const auto vxx = fourier.derivative(s1.v, 2);
    const double e3 = ipow(eps.value(), 3);
    const double em = ipow(eps.value(), f.eps_power);
    const double inv_h2 = 1.0 / (h1 * h1);

    PdeResidual r{std::vector<double>(grid.size()), std::vector<double>(grid.size())};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double utt = (s0.u[i] - 2.0 * s1.u[i] + s2.u[i]) * inv_h2;
        const double vtt = (s0.v[i] - 2.0 * s1.v[i] + s2.v[i]) * inv_h2;
        const double coupling = -params.a * s1.u[i] + params.b * s1.v[i];
        const double forcing = em * evaluate_nonlinearity(f, s1.u[i], s1.v[i]);
        r.u[i] = e3 * (utt - params.k1 * uxx[i]) - (coupling + forcing);
        r.v[i] = e3 * (vtt - params.k2 * vxx[i]) - (-coupling - forcing);
    }
    return r;
}

/// Least-squares slope of log(err) against log(eps); NaN for fewer than two
/// usable points.
inline double fitted_order(std::span<const double> eps, std::span<const double> err) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (!(eps[i] > 0.0 && err[i] > 0.0)) continue;
        const double x = std::log(eps[i]);
        const double y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 2) return std::numeric_limits<double>::quiet_NaN();
    const double denom = static_cast<double>(m) * sxx - sx * sx;
    if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return (static_cast<double>(m) * sxy - sx * sy) / denom;
}

/// Worker count for sweeps: KDV_ASYMPTOTICS_THREADS if set, else hardware.
inline unsigned sweep_threads() {
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("KDV_ASYMPTOTICS_THREADS")) {
        char* end = nullptr;
        const long value = std::strtol(env, &end, 10);
        if (end != env && value > 0) threads = static_cast<unsigned>(value);
    }
    return threads;
}

struct Comparison {
    ErrorRow row;
    FieldPair full;
    FieldPair approx;
};

/// Step used for the centered time difference of the asymptotic residual.
inline double residual_time_step(SweepMode mode, double eps) { return mode == SweepMode::BurstKdv ? 1e-3 * eps : 1e-3; }

/// Runs the full solver and the asymptotic construction for one epsilon and
/// compares them at solver.t_end.
inline Comparison compare_at(const Problem& problem, Epsilon eps, SweepMode mode) {
    const auto start = std::chrono::steady_clock::now();
    const double t_end = problem.solver.t_end;
    const double final_time[] = {t_end};
    auto full = simulate_full(problem.initial, problem.grid, problem.params, problem.f, eps, problem.solver,
                              final_time);

    const double delta = residual_time_step(mode, eps.value());
    std::vector<FieldPair> approx;
    if (mode == SweepMode::SmoothRegular) {
        for (double t : {t_end - delta, t_end, t_end + delta}) {
            approx.push_back(regular_fields(problem.initial, problem.params, problem.grid, std::max(t, 0.0)));
        }
    } else {
        const std::vector<double> times = {t_end - delta, t_end, t_end + delta};
        const auto asym = build_burst_asymptotics(problem.initial, problem.params, problem.f, eps,
                                                  problem.zeta_grid, times, problem.kdv);
        for (double t : times) approx.push_back(compose_fields(asym, problem.params, problem.grid, t));
    }

    Comparison out;
    const auto norms = error_norms(full.back(), approx[1], problem.grid);
    out.row.eps = eps.value();
    out.row.err_l2_u = norms.l2_u;
    out.row.err_linf_u = norms.linf_u;
    out.row.err_l2_v = norms.l2_v;
    out.row.err_linf_v = norms.linf_v;
    if (t_end > delta) {
        out.row.pde_residual_linf = pde_residual(approx, problem.grid, problem.params, problem.f, eps).linf();
    }
    out.full = std::move(full.back());
    out.approx = std::move(approx[1]);
    out.row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

/// Independent rows run concurrently on up to `threads` workers.
inline ErrorReport convergence_sweep(const Problem& problem, std::span<const double> eps_list, SweepMode mode,
                                     unsigned threads = sweep_threads()) {
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        if (!(eps_list[i] >= 0.05 && eps_list[i] <= 1.0)) {
            fail(ErrorKind::ValidationError, "sweep epsilons must lie in [0.05, 1]", "epsilon_list");
        }
        if (i > 0 && !(eps_list[i] < eps_list[i - 1])) {
            fail(ErrorKind::ValidationError, "epsilon_list must be strictly decreasing", "epsilon_list");
        }
    }

    ErrorReport report;
    report.mode = mode;
    report.rows.resize(eps_list.size());
    std::vector<std::exception_ptr> errors(eps_list.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < eps_list.size(); i = next++) {
            try {
                report.rows[i] = compare_at(problem, Epsilon(eps_list[i]), mode).row;
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned count = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(eps_list.size())));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < count; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    std::vector<double> eps(eps_list.begin(), eps_list.end()), err;
    for (const auto& row : report.rows) err.push_back(row.err_linf_u);
    report.fitted_order = fitted_order(eps, err);
    return report;
}

struct RemainderReport {
    double eps = 0.0;
    std::vector<double> times;
    std::vector<ErrorNorms> norms;  ///< R = full - (u0_bar, v0_bar) at each time

    double max_linf() const {
        double m = 0.0;
        for (const auto& n : norms) m = std::max({m, n.linf_u, n.linf_v});
        return m;
    }
    double max_l2() const {
        double m = 0.0;
        for (const auto& n : norms) m = std::max({m, n.l2_u, n.l2_v});
        return m;
    }
};

/// Remainder of the regular approximation over time for smooth data.
inline RemainderReport remainder_check(const Problem& problem, Epsilon eps, std::span<const double> times) {
    if (problem.initial.kind != IcKind::Smooth) {
        fail(ErrorKind::ValidationError, "remainder check needs smooth initial data", "initial.kind");
    }
    const auto full = simulate_full(problem.initial, problem.grid, problem.params, problem.f, eps, problem.solver,
                                    times);
    RemainderReport report;
    report.eps = eps.value();
    for (const auto& snap : full) {
        const auto regular = regular_fields(problem.initial, problem.params, problem.grid, snap.time);
        report.times.push_back(snap.time);
        report.norms.push_back(error_norms(snap, regular, problem.grid));
    }
    return report;
}

/// dx-weighted centroid of u restricted to x > 0 (or x < 0).
inline double half_line_centroid(std::span<const double> u, const Grid1D& grid, bool positive_side) {
    double moment = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid.node(i);
        if ((positive_side && x > 0.0) || (!positive_side && x < 0.0)) {
            moment += x * u[i];
            mass += u[i];
        }
    }
    return moment / mass;
}

struct HumpSpeeds {
    double right_moving = 0.0;
    double left_moving = 0.0;
};

/// Centroid velocities of the two humps between two separated snapshots.
inline HumpSpeeds hump_speeds(std::span<const double> u_early, double t_early, std::span<const double> u_late,
                              double t_late, const Grid1D& grid) {
    const double dt = t_late - t_early;
    return {(half_line_centroid(u_late, grid, true) - half_line_centroid(u_early, grid, true)) / dt,
            (half_line_centroid(u_late, grid, false) - half_line_centroid(u_early, grid, false)) / dt};
}

}  // namespace kdva
