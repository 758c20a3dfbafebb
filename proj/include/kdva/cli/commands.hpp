#pragma once

// Command dispatch for the kdv_asymptotics executable. Each command reads a
// validated ExperimentConfig, writes CSV (and optionally SVG) files under the
// output directory and returns the process exit status.

#include <cmath>
#include <filesystem>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "kdva/cli/config.hpp"
#include "kdva/cli/csv.hpp"
#include "kdva/cli/svg.hpp"
#include "kdva/composer.hpp"
#include "kdva/core.hpp"
#include "kdva/effective.hpp"
#include "kdva/errors.hpp"
#include "kdva/full_solver.hpp"
#include "kdva/regular.hpp"
#include "kdva/verifier.hpp"

namespace kdva::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_validation = 2;
inline constexpr int exit_numerical = 3;

inline const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"simulate-full", "simulate-regular", "simulate-kdv",
                                                   "compare",       "sweep",            "verify-derivation"};
    return names;
}

struct RunOptions {
    std::string out_dir = ".";
    bool quiet = false;
    bool timing = false;  ///< record wall-clock seconds in the sweep summary (otherwise nan)
    std::string version = "v0.1.0";
};

inline int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ParseError:
        case ErrorKind::ValidationError:
        case ErrorKind::DecayViolation:
        case ErrorKind::BoxTooSmall:
            return exit_validation;
        default:
            return exit_numerical;
    }
}

/// One line: `error kind=<Kind> field=<path|-> message="<text>"`.
inline std::string failure_line(std::string_view kind, const std::string& field, const std::string& message) {
    std::string clean;
    for (char ch : message) {
        if (ch == '\n' || ch == '\r') {
            clean += ' ';
        } else if (ch == '"') {
            clean += '\'';
        } else {
            clean += ch;
        }
    }
    return "error kind=" + std::string(kind) + " field=" + (field.empty() ? "-" : field) + " message=\"" + clean +
           "\"";
}

namespace detail {

struct Context {
    const ExperimentConfig& cfg;
    const RunOptions& opts;
    const std::string& command;
    std::ostream& out;

    std::filesystem::path resolve(const std::string& path) const {
        std::filesystem::path p(path);
        return p.is_absolute() ? p : std::filesystem::path(opts.out_dir) / p;
    }

    /// csv_path with `suffix` inserted before the extension.
    std::filesystem::path variant(const std::string& path, const std::string& suffix) const {
        auto p = resolve(path);
        if (suffix.empty()) return p;
        return p.parent_path() / (p.stem().string() + suffix + p.extension().string());
    }

    std::vector<std::string> header(double eps, double t) const {
        return {"kdv_asymptotics " + opts.version, "command: " + command, "config: " + to_json(cfg).dump(),
                "epsilon: " + format_number(eps), "time: " + format_number(t)};
    }

    void emit_csv(const std::filesystem::path& path, const Table& table) const {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        write_csv(path.string(), table, cfg.outputs.precision);
        if (!opts.quiet) out << "wrote " << path.string() << "\n";
    }

    void emit_svg(const std::string& suffix, const ChartSpec& spec, const std::vector<Series>& series) const {
        if (!cfg.outputs.svg_path) return;
        const auto path = variant(*cfg.outputs.svg_path, suffix);
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        write_svg(path.string(), spec, series);
        if (!opts.quiet) out << "wrote " << path.string() << "\n";
    }

    std::string snapshot_suffix(std::size_t k, std::size_t count) const {
        if (count == 1) return "";
        char buf[16];
        std::snprintf(buf, sizeof buf, "_%03zu", k);
        return buf;
    }
};

inline Table field_table(const Context& ctx, const Grid1D& grid, std::span<const double> u, std::span<const double> v,
                         double eps, double t) {
    Table table;
    table.comments = ctx.header(eps, t);
    table.names = {"x", "u", "v"};
    table.columns = {grid.nodes(), std::vector<double>(u.begin(), u.end()), std::vector<double>(v.begin(), v.end())};
    return table;
}

inline void emit_snapshots(const Context& ctx, const Grid1D& grid, const std::vector<FieldPair>& snaps, double eps,
                           const std::string& title) {
    for (std::size_t k = 0; k < snaps.size(); ++k) {
        ctx.emit_csv(ctx.variant(ctx.cfg.outputs.csv_path, ctx.snapshot_suffix(k, snaps.size())),
                     field_table(ctx, grid, snaps[k].u, snaps[k].v, eps, snaps[k].time));
    }
    if (!snaps.empty()) {
        const auto& last = snaps.back();
        ctx.emit_svg("", {title + ", t = " + format_number(last.time, 6), "x", "value"},
                     {{"u", grid.nodes(), last.u}, {"v", grid.nodes(), last.v}});
    }
}

inline Problem make_problem(const ExperimentConfig& cfg) {
    Problem problem;
    problem.params = cfg.params;
    problem.f = cfg.nonlinearity;
    problem.initial = cfg.initial;
    problem.grid = cfg.grid.grid();
    problem.zeta_grid = cfg.kdv_grid.grid();
    problem.solver = cfg.time.solver();
    return problem;
}

inline SweepMode mode_of(const ExperimentConfig& cfg) {
    return cfg.initial.kind == IcKind::Burst ? SweepMode::BurstKdv : SweepMode::SmoothRegular;
}

inline const std::vector<std::string>& summary_columns() {
    static const std::vector<std::string> names = {"eps",        "err_l2_u",          "err_linf_u", "err_l2_v",
                                                   "err_linf_v", "pde_residual_linf", "seconds"};
    return names;
}

inline Table summary_table(const Context& ctx, const std::vector<ErrorRow>& rows) {
    Table table;
    table.names = summary_columns();
    table.columns.assign(table.names.size(), {});
    for (const auto& r : rows) {
        const double seconds = ctx.opts.timing ? r.seconds : std::numeric_limits<double>::quiet_NaN();
        const double values[] = {r.eps,       r.err_l2_u,          r.err_linf_u, r.err_l2_v,
                                 r.err_linf_v, r.pde_residual_linf, seconds};
        for (std::size_t k = 0; k < table.columns.size(); ++k) table.columns[k].push_back(values[k]);
    }
    return table;
}

inline int simulate_full_cmd(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const Grid1D grid = cfg.grid.grid();
    const auto times = cfg.time.resolved_output_times();
    const auto snaps = simulate_full(cfg.initial, grid, cfg.params, cfg.nonlinearity, Epsilon(cfg.epsilon),
                                     cfg.time.solver(), times);
    emit_snapshots(ctx, grid, snaps, cfg.epsilon, "full solution");
    return exit_ok;
}

inline int simulate_regular_cmd(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    if (cfg.initial.kind != IcKind::Smooth) {
        fail(ErrorKind::ValidationError, "simulate-regular needs smooth initial data", "initial.kind");
    }
    const Grid1D grid = cfg.grid.grid();
    sample_initial(cfg.initial, grid, Epsilon(cfg.epsilon), cfg.params);
    std::vector<FieldPair> snaps;
    for (double t : cfg.time.resolved_output_times()) {
        snaps.push_back(regular_fields(cfg.initial, cfg.params, grid, t));
    }
    emit_snapshots(ctx, grid, snaps, cfg.epsilon, "regular asymptotics");
    return exit_ok;
}

inline int simulate_kdv_cmd(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    if (cfg.initial.kind != IcKind::Burst) {
        fail(ErrorKind::ValidationError, "simulate-kdv needs burst initial data", "initial.kind");
    }
    const Grid1D grid = cfg.grid.grid();
    const Grid1D zeta_grid = cfg.kdv_grid.grid();
    const Epsilon eps(cfg.epsilon);
    kdva::detail::check_profile_decay(cfg.initial.u0, zeta_grid.half_length(), "u0");
    const auto times = cfg.time.resolved_output_times();
    const auto asym = build_burst_asymptotics(cfg.initial, cfg.params, cfg.nonlinearity, eps, zeta_grid, times);

    std::vector<FieldPair> snaps;
    for (std::size_t k = 0; k < times.size(); ++k) {
        auto [u, v] = compose(asym, cfg.params, grid.nodes(), times[k]);
        FieldPair snap = FieldPair::zeros(grid.size(), times[k]);
        snap.u = std::move(u);
        snap.v = std::move(v);
        snaps.push_back(std::move(snap));

        Table zeta;
        zeta.comments = ctx.header(cfg.epsilon, times[k]);
        zeta.names = {"zeta", "S_left", "S_right"};
        zeta.columns = {zeta_grid.nodes(), asym.left[k].S, asym.right[k].S};
        ctx.emit_csv(ctx.variant(cfg.outputs.csv_path, "_zeta" + ctx.snapshot_suffix(k, times.size())), zeta);
    }
    emit_snapshots(ctx, grid, snaps, cfg.epsilon, "composed KdV asymptotics");
    return exit_ok;
}

inline int compare_cmd(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const Problem problem = make_problem(cfg);
    const auto result = compare_at(problem, Epsilon(cfg.epsilon), mode_of(cfg));
    const auto& grid = problem.grid;
    ctx.emit_csv(ctx.variant(cfg.outputs.csv_path, "_full"),
                 field_table(ctx, grid, result.full.u, result.full.v, cfg.epsilon, result.full.time));
    ctx.emit_csv(ctx.variant(cfg.outputs.csv_path, "_asymptotic"),
                 field_table(ctx, grid, result.approx.u, result.approx.v, cfg.epsilon, result.approx.time));
    Table summary = summary_table(ctx, {result.row});
    summary.comments = ctx.header(cfg.epsilon, problem.solver.t_end);
    ctx.emit_csv(ctx.variant(cfg.outputs.csv_path, "_summary"), summary);
    ctx.emit_svg("", {"full vs asymptotic, t = " + format_number(problem.solver.t_end, 6), "x", "u"},
                 {{"full", grid.nodes(), result.full.u}, {"asymptotic", grid.nodes(), result.approx.u}});
    if (!ctx.opts.quiet) {
        ctx.out << "err_linf_u=" << format_number(result.row.err_linf_u)
                << " err_l2_u=" << format_number(result.row.err_l2_u) << "\n";
    }
    return exit_ok;
}

inline int sweep_cmd(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    if (cfg.epsilon_list.empty()) fail(ErrorKind::ValidationError, "sweep needs a non-empty epsilon_list", "epsilon_list");
    const Problem problem = make_problem(cfg);
    const auto report = convergence_sweep(problem, cfg.epsilon_list, mode_of(cfg));

    Table summary = summary_table(ctx, report.rows);
    summary.comments = {"kdv_asymptotics " + ctx.opts.version, "command: sweep", "config: " + to_json(cfg).dump(),
                        "mode: " + std::string(report.mode == SweepMode::BurstKdv ? "burst_kdv" : "smooth_regular"),
                        "time: " + format_number(problem.solver.t_end),
                        "fitted_order: " + format_number(report.fitted_order)};
    ctx.emit_csv(ctx.resolve(cfg.outputs.csv_path), summary);

    std::vector<double> eps, linf, l2;
    for (const auto& r : report.rows) {
        eps.push_back(r.eps);
        linf.push_back(r.err_linf_u);
        l2.push_back(r.err_l2_u);
    }
    ctx.emit_svg("", {"error against epsilon", "epsilon", "error in u", true, true},
                 {{"max norm", eps, linf}, {"L2 norm", eps, l2}});
    if (!ctx.opts.quiet) ctx.out << "fitted_order=" << format_number(report.fitted_order) << "\n";
    return exit_ok;
}

inline int verify_derivation_cmd(const Context& ctx) {
    const auto& cfg = ctx.cfg;
    const double solvability = check_solvability(cfg.params);
    const double solvability_limit = 1e-12 * (cfg.params.a + cfg.params.b) * std::max(cfg.params.k1, cfg.params.k2);

    const Grid1D grid = cfg.kdv_grid.grid();
    const Profile profile = cfg.initial.u0.shape == ProfileShape::Zero || cfg.initial.u0.amplitude == 0.0
                                ? Profile::gaussian(1.0, 1.0)
                                : cfg.initial.u0;
    std::vector<double> samples(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) samples[i] = profile(grid.node(i));
    const auto order2 = order2_residual(cfg.params, cfg.nonlinearity, grid, samples, effective_params(cfg.params));

    Table table;
    table.comments = ctx.header(cfg.epsilon, 0.0);
    table.names = {"solvability_residual", "solvability_threshold", "order2_residual", "order2_threshold"};
    table.columns = {{solvability}, {solvability_limit}, {order2.residual_linf}, {1e-6 * order2.scale}};
    ctx.emit_csv(ctx.resolve(cfg.outputs.csv_path), table);
    if (!ctx.opts.quiet) {
        ctx.out << "solvability_residual=" << format_number(solvability)
                << " threshold=" << format_number(solvability_limit) << "\n"
                << "order2_residual=" << format_number(order2.residual_linf)
                << " threshold=" << format_number(1e-6 * order2.scale) << "\n";
    }
    if (order2.residual_linf > 1e-6 * order2.scale) {
        fail(ErrorKind::DerivationMismatch, "order-eps^2 solvability residual exceeds tolerance");
    }
    return exit_ok;
}

}  // namespace detail

/// Runs `command`; failures are reported as one line on `err` and mapped to
/// exit status 2 (validation) or 3 (numerical).
inline int run_command(const std::string& command, const ExperimentConfig& cfg, const RunOptions& opts,
                       std::ostream& out, std::ostream& err) {
    const detail::Context ctx{cfg, opts, command, out};
    try {
        if (command == "simulate-full") return detail::simulate_full_cmd(ctx);
        if (command == "simulate-regular") return detail::simulate_regular_cmd(ctx);
        if (command == "simulate-kdv") return detail::simulate_kdv_cmd(ctx);
        if (command == "compare") return detail::compare_cmd(ctx);
        if (command == "sweep") return detail::sweep_cmd(ctx);
        if (command == "verify-derivation") return detail::verify_derivation_cmd(ctx);
        fail(ErrorKind::ValidationError, "unknown command " + command, "command");
    } catch (const Error& e) {
        err << failure_line(to_string(e.kind()), e.field(), e.what()) << "\n";
        return exit_code(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
        err << failure_line("ValidationError", "outputs", e.what()) << "\n";
        return exit_validation;
    } catch (const std::exception& e) {
        err << failure_line("NumericalFailure", "", e.what()) << "\n";
        return exit_numerical;
    }
}

}  // namespace kdva::cli
