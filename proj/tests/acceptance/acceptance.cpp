// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "kdva/kdva.hpp"

using namespace kdva;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

const PhysParams canonical{1, 4, 1, 1};
const NonlinearitySpec smooth_f{{{2, 0, 1.0}}, 2};
const NonlinearitySpec burst_f{{{2, 0, 1.0}}, 1};
const std::vector<double> eps_list = {0.4, 0.3, 0.2};
constexpr double burst_amplitude = 0.5;

Problem smooth_benchmark() {
    Problem p;
    p.params = canonical;
    p.f = smooth_f;
    p.initial = {IcKind::Smooth, Profile::gaussian(1.0, 1.0), Profile{}};
    p.grid = Grid1D(30.0, 1024);
    p.solver.t_end = 1.0;
    return p;
}

Problem burst_benchmark() {
    Problem p;
    p.params = canonical;
    p.f = burst_f;
    p.initial = {IcKind::Burst, Profile::gaussian(burst_amplitude, 1.0), Profile{}};
    p.grid = Grid1D(30.0, 2048);
    p.zeta_grid = Grid1D(80.0, 1024);
    p.solver.t_end = 1.0;
    return p;
}

double max_diff(const std::vector<double>& x, const std::vector<double>& y) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

double max_abs(const std::vector<double>& x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

// 1. Order-eps solvability identity over random parameter draws.
Verdict solvability_identity() {
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> log_scale(-3.0, 3.0);
    double worst_ratio = 0.0;
    for (int draw = 0; draw < 10000; ++draw) {
        const PhysParams p{std::exp(log_scale(rng)), std::exp(log_scale(rng)), std::exp(log_scale(rng)),
                           std::exp(log_scale(rng))};
        const double c2 = effective_speed_squared(p);
        const double residual = std::abs(p.b * (c2 - p.k1) + p.a * (c2 - p.k2));
        worst_ratio = std::max(worst_ratio, residual / (1e-12 * (p.a + p.b) * std::max(p.k1, p.k2)));
    }
    return {worst_ratio < 1.0, fmt("10000 draws, max residual / threshold = %.3g", worst_ratio)};
}

// 2. Order-eps^2 consistency with the adopted constants, and sign discrimination.
Verdict derivation_oracle() {
    const Grid1D grid(40.0, 512);
    std::vector<double> profile(grid.size());
    const auto g = Profile::gaussian(1.0, 1.0);
    for (std::size_t i = 0; i < grid.size(); ++i) profile[i] = g(grid.node(i));
    const auto eff = effective_params(canonical);
    const auto good = order2_residual(canonical, smooth_f, grid, profile, eff);
    auto flipped = eff;
    flipped.gamma_h = -flipped.gamma_h;
    const auto bad = order2_residual(canonical, smooth_f, grid, profile, flipped);
    const bool pass = good.residual_linf < 1e-6 * good.scale && bad.residual_linf > 1e-1 * bad.scale;
    return {pass, fmt("adopted residual/scale = %.3g (< 1e-6), flipped residual/scale = %.3g (> 0.1)",
                      good.residual_linf / good.scale, bad.residual_linf / bad.scale)};
}

// 3. Exactness of the two substeps and the stiff frequency.
Verdict substep_exactness() {
    const Grid1D grid(20.0, 256);
    const Epsilon eps(0.25);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    FieldPair s = FieldPair::zeros(grid.size());
    for (auto* field : {&s.u, &s.v, &s.p, &s.q}) {
        for (int bump = 0; bump < 4; ++bump) {
            const auto g = Profile::gaussian(uni(rng), 1.0 + 0.5 * std::abs(uni(rng)), 4.0 * uni(rng));
            for (std::size_t i = 0; i < grid.size(); ++i) (*field)[i] += g(grid.node(i));
        }
    }

    // Per-mode wave energy (sqrt(k) kappa |u_hat|)^2 + |p_hat|^2.
    const auto waved = wave_substep(s, grid, canonical, 0.917);
    Fourier fourier(grid);
    double wave_drift = 0.0;
    for (const auto& [field, rate, k] : {std::tuple{&FieldPair::u, &FieldPair::p, canonical.k1},
                                         std::tuple{&FieldPair::v, &FieldPair::q, canonical.k2}}) {
        const auto u0 = fourier.forward(s.*field), p0 = fourier.forward(s.*rate);
        const auto u1 = fourier.forward(waved.*field), p1 = fourier.forward(waved.*rate);
        // Modes below 1e-6 of the peak mode energy are at the level of transform round-off.
        std::vector<double> e0(fourier.modes()), e1(fourier.modes());
        double peak = 0.0;
        for (std::size_t j = 1; j < fourier.modes(); ++j) {
            const double w = std::sqrt(k) * fourier.wavenumber(j);
            e0[j] = std::norm(w * u0[j]) + std::norm(p0[j]);
            e1[j] = std::norm(w * u1[j]) + std::norm(p1[j]);
            peak = std::max(peak, e0[j]);
        }
        for (std::size_t j = 1; j < fourier.modes(); ++j) {
            if (e0[j] > 1e-6 * peak) wave_drift = std::max(wave_drift, std::abs(e1[j] - e0[j]) / e0[j]);
        }
    }

    // Per-node oscillator invariant omega^2 d^2 + d_t^2 with f = 0.
    const double omega = relaxation_frequency(canonical, eps);
    const auto relaxed = relaxation_substep(s, canonical, NonlinearitySpec{}, eps, 0.0371);
    double relax_drift = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        auto invariant = [&](const FieldPair& f) {
            const double d = canonical.a * f.u[i] - canonical.b * f.v[i];
            const double r = canonical.a * f.p[i] - canonical.b * f.q[i];
            return omega * omega * d * d + r * r;
        };
        relax_drift = std::max(relax_drift, std::abs(invariant(relaxed) - invariant(s)) / invariant(s));
    }

    // Dominant frequency of a - b v at the origin for off-manifold data, full scheme.
    const Grid1D wide(40.0, 256);
    FieldPair off = FieldPair::zeros(wide.size());
    for (std::size_t i = 0; i < wide.size(); ++i) off.u[i] = std::exp(-std::pow(wide.node(i) / 3.0, 2));
    const double dt = 2.0 * std::numbers::pi / omega / 32.0;
    StrangStepper stepper(wide, canonical, NonlinearitySpec{}, eps);
    std::vector<double> d;
    for (int k = 0; k < 32 * 24; ++k) {
        d.push_back(canonical.a * off.u[wide.size() / 2] - canonical.b * off.v[wide.size() / 2]);
        stepper.step(off, dt);
    }
    double mean = 0.0;
    for (double x : d) mean += x / static_cast<double>(d.size());
    double best = 0.0, best_power = -1.0;
    for (double w = 2.0; w < 40.0; w += 0.001) {
        std::complex<double> sum = 0.0;
        for (std::size_t k = 0; k < d.size(); ++k) {
            const double window = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * k / (d.size() - 1));
            sum += window * (d[k] - mean) * std::polar(1.0, -w * k * dt);
        }
        if (std::norm(sum) > best_power) best_power = std::norm(sum), best = w;
    }
    const double expected = std::sqrt(2.0) * std::pow(0.25, -1.5);
    const double freq_error = std::abs(best - expected) / expected;
    const bool pass = wave_drift < 1e-12 && relax_drift < 1e-12 && freq_error < 0.01;
    return {pass, fmt("wave energy drift %.2g, oscillator drift %.2g (< 1e-12); measured omega %.5f vs %.5f "
                      "(rel. error %.2g < 0.01)",
                      wave_drift, relax_drift, best, expected, freq_error)};
}

// 4. Time order of the Strang scheme on the smooth benchmark.
Verdict strang_order() {
    const auto problem = smooth_benchmark();
    const Epsilon eps(0.3);
    const auto initial = sample_initial(problem.initial, problem.grid, eps, problem.params);
    const double dt = max_stable_dt(problem.solver, problem.grid, problem.params, eps);
    const auto steps = static_cast<int>(std::ceil(problem.solver.t_end / dt));
    auto run = [&](int n) {
        FieldPair s = initial;
        StrangStepper stepper(problem.grid, problem.params, problem.f, eps);
        for (int k = 0; k < n; ++k) stepper.step(s, problem.solver.t_end / n);
        return s;
    };
    const auto reference = run(steps * 8);
    const auto coarse = run(steps);
    const auto half = run(steps * 2);
    const double e1 = std::max(max_diff(coarse.u, reference.u), max_diff(coarse.v, reference.v));
    const double e2 = std::max(max_diff(half.u, reference.u), max_diff(half.v, reference.v));
    const double order = std::log2(e1 / e2);
    return {std::abs(order - 2.0) <= 0.2,
            fmt("eps 0.3, %d steps: errors %.3g -> %.3g, observed order %.3f (2.0 +- 0.2)", steps, e1, e2, order)};
}

// 5. Soliton transit, mass conservation and exact linear propagation.
Verdict kdv_soliton() {
    const Grid1D grid(40.0, 256);
    const auto eff = effective_params(canonical);
    const double gamma = eff.gamma_h;
    // S = A sech^2(B (z - V t)) solves S_t = K S_zzz - (gamma S^2)_z iff V = -4 K B^2 and A = 3 V / (2 gamma).
    const double B = 0.5;
    const double V = -4.0 * eff.K * B * B;
    const double A = 3.0 * V / (2.0 * gamma);
    auto soliton = [&](double z) {
        const double s = 1.0 / std::cosh(B * z);
        return A * s * s;
    };
    KdvState initial{grid, std::vector<double>(grid.size()), 0.0, Direction::Left};
    for (std::size_t i = 0; i < grid.size(); ++i) initial.S[i] = soliton(grid.node(i));
    const double transit = 2.0 * grid.half_length() / V;
    const double times[] = {transit};
    const auto out = simulate_kdv(initial, eff, UnivariatePolynomial{{0.0, 0.0, gamma}}, times).back();
    const double shape = max_diff(out.S, initial.S);
    const double mass = std::abs(out.mass() - initial.mass()) / std::abs(initial.mass());

    // h = 0: every Fourier mode is multiplied by exp(K (i q)^3 t).
    KdvState noise{grid, std::vector<double>(grid.size()), 0.0, Direction::Left};
    std::mt19937_64 rng(5);
    std::normal_distribution<double> normal;
    for (double& s : noise.S) s = normal(rng);
    Fourier fourier(grid);
    auto hat = fourier.forward(noise.S);
    const double t_lin = 13.7;
    for (std::size_t j = 0; j < hat.size(); ++j) {
        if (j == fourier.nyquist()) continue;  // odd multiplier vanishes there
        const double q = fourier.wavenumber(j);
        hat[j] *= std::polar(1.0, -eff.K * q * q * q * t_lin);
    }
    const auto analytic = fourier.backward(hat);
    const double lin_times[] = {t_lin};
    const auto lin = simulate_kdv(noise, eff, UnivariatePolynomial{}, lin_times, {0.37, 0.0}).back();
    const double linear = max_diff(lin.S, analytic) / max_abs(analytic);

    const bool pass = shape < 1e-4 && mass < 1e-10 && linear < 1e-12;
    return {pass, fmt("n 256, transit time %.1f: shape error %.3g (< 1e-4), mass drift %.3g (< 1e-10), linear "
                      "mismatch %.3g (< 1e-12)",
                      transit, shape, mass, linear)};
}

// 6. Regular asymptotics against the full solver.
Verdict regular_convergence() {
    const auto problem = smooth_benchmark();
    const auto report = convergence_sweep(problem, eps_list, SweepMode::SmoothRegular);
    bool decreasing = true;
    std::string errs;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        if (i > 0 && !(report.rows[i].err_linf_u < report.rows[i - 1].err_linf_u)) decreasing = false;
        errs += fmt("%s%.4g", i ? ", " : "", report.rows[i].err_linf_u);
    }
    double initial_remainder = 0.0;
    const double t0[] = {0.0};
    for (double e : eps_list) {
        const auto r = remainder_check(problem, Epsilon(e), t0);
        initial_remainder = std::max(initial_remainder, r.max_linf());
    }
    const bool pass = decreasing && report.fitted_order >= 0.8 && initial_remainder == 0.0;
    return {pass, fmt("max errors [%s], fitted order %.3f (>= 0.8), remainder at t = 0: %g", errs.c_str(),
                      report.fitted_order, initial_remainder)};
}

// 7. Composed KdV asymptotics against the full solver, and hump speeds.
Verdict burst_asymptotics() {
    const auto problem = burst_benchmark();
    const auto report = convergence_sweep(problem, eps_list, SweepMode::BurstKdv);
    bool decreasing = true;
    std::string errs;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const double rel = report.rows[i].err_linf_u / burst_amplitude;
        if (i > 0 && !(rel < report.rows[i - 1].err_linf_u / burst_amplitude)) decreasing = false;
        errs += fmt("%s%.4g", i ? ", " : "", rel);
    }

    const double c = std::sqrt(effective_speed_squared(problem.params));
    double worst_speed = 0.0;
    for (double e : eps_list) {
        const double t1 = 3.0 * e * problem.initial.u0.width / c, t2 = problem.solver.t_end;
        const double times[] = {t1, t2};
        const auto asym = build_burst_asymptotics(problem.initial, problem.params, problem.f, Epsilon(e),
                                                  problem.zeta_grid, times, problem.kdv);
        const auto u1 = compose(asym, problem.params, problem.grid.nodes(), t1).first;
        const auto u2 = compose(asym, problem.params, problem.grid.nodes(), t2).first;
        const auto speeds = hump_speeds(u1, t1, u2, t2, problem.grid);
        worst_speed = std::max({worst_speed, std::abs(speeds.right_moving / c - 1.0),
                                std::abs(speeds.left_moving / c + 1.0)});
    }
    const bool pass = decreasing && worst_speed < 0.02;
    return {pass, fmt("relative max errors [%s], worst hump speed deviation %.3g (< 0.02)", errs.c_str(),
                      worst_speed)};
}

// 8. Right evolution equals mirrored Left evolution.
Verdict direction_symmetry() {
    const Grid1D grid(40.0, 512);
    const auto eff = effective_params(canonical);
    const auto h = nonlinear_flux(canonical, NonlinearitySpec{{{2, 0, 1.0}, {3, 0, 0.2}}, 1});
    auto profile = [](double z) { return 0.9 * std::exp(-z * z / 2.0) - 0.4 * std::exp(-std::pow(z - 2.0, 2)); };
    KdvState right{grid, std::vector<double>(grid.size()), 0.0, Direction::Right};
    KdvState left{grid, std::vector<double>(grid.size()), 0.0, Direction::Left};
    for (std::size_t i = 0; i < grid.size(); ++i) {
        right.S[i] = profile(grid.node(i));
        left.S[i] = profile(-grid.node(i));
    }
    const double times[] = {5.0};
    const auto r = simulate_kdv(right, eff, h, times, {0.0, 0.0}).back();
    const auto l = simulate_kdv(left, eff, h, times, {0.0, 0.0}).back();
    const std::size_t n = grid.size();
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(r.S[i] - l.S[(n - i) % n]));
    return {worst < 1e-10, fmt("max |right - mirrored left| = %.3g (< 1e-10)", worst)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// 9. Two sweep runs with the same config write identical bytes.
Verdict cli_determinism() {
    const fs::path root = fs::temp_directory_path() / ("kdva_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const std::string config = std::string(KDVA_CONFIG_DIR) + "/smooth_sweep.json";
    std::vector<std::string> outputs;
    for (const char* run : {"first", "second"}) {
        const std::string cmd = std::string(KDVA_CLI_PATH) + " sweep --quiet --config " + config + " --out-dir " +
                                (root / run).string();
        const int raw = std::system(cmd.c_str());
        if (!WIFEXITED(raw) || WEXITSTATUS(raw) != 0) {
            fs::remove_all(root);
            return {false, fmt("sweep exited with status %d", raw)};
        }
        outputs.push_back(slurp(root / run / "smooth_sweep.csv") + slurp(root / run / "smooth_sweep.svg"));
    }
    fs::remove_all(root);
    const bool same = !outputs[0].empty() && outputs[0] == outputs[1];
    return {same, fmt("%zu bytes per run, identical: %s", outputs[0].size(), same ? "yes" : "no")};
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"solvability identity", solvability_identity},
        {"order-2 derivation oracle", derivation_oracle},
        {"full-solver substep exactness", substep_exactness},
        {"Strang self-convergence", strang_order},
        {"KdV soliton preservation", kdv_soliton},
        {"regular asymptotics convergence", regular_convergence},
        {"burst asymptotics", burst_asymptotics},
        {"direction symmetry", direction_symmetry},
        {"CLI determinism", cli_determinism},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[k].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s [%zu] %s: %s (%.2f s)\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first,
                    v.detail.c_str(), seconds);
        std::fflush(stdout);
        failures += v.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
