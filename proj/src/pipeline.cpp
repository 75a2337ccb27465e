#include "mpps/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>

#include "mpps/analysis.hpp"
#include "mpps/embedded_configs.hpp"
#include "mpps/svgplot.hpp"

namespace mpps {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Nodes of traj inside [a, b] as a standalone trajectory (grid-aligned, so
// this is pure indexing).
Trajectory clip(const Trajectory& traj, double a, double b) {
    Trajectory out;
    out.t0 = a;
    out.dt = traj.dt;
    out.system_id = traj.system_id;
    out.rtol = traj.rtol;
    out.atol = traj.atol;
    auto first = static_cast<std::size_t>(std::max(0.0, std::ceil((a - traj.t0) / traj.dt - 1e-9)));
    out.t0 = traj.time(first);
    for (std::size_t j = first; j < traj.size() && traj.time(j) <= b + 1e-9; ++j)
        out.samples.push_back(traj.samples[j]);
    return out;
}

svg::Series coordinate_series(const Trajectory& traj, int i, const std::string& label) {
    svg::Series s;
    s.label = label;
    s.x.reserve(traj.size());
    s.y.reserve(traj.size());
    for (std::size_t j = 0; j < traj.size(); ++j) {
        s.x.push_back(traj.time(j));
        s.y.push_back(traj.samples[j][i]);
    }
    return s;
}

void write_plots(const std::string& dir, const Trajectory& traj,
                 const std::shared_ptr<ThetaSignal>& theta, double t0, double t1,
                 const std::string& id) {
    // Time series of every coordinate in one frame.
    svg::PlotSpec coords;
    coords.title = id + ": coordinates";
    coords.xlabel = "t";
    coords.ylabel = "x_i(t)";
    for (int i = 0; i < traj.dim(); ++i)
        coords.series.push_back(coordinate_series(traj, i, "x" + std::to_string(i + 1)));
    write_text(dir + "/coordinates.svg", svg::render_plot(coords));

    // Phase portrait: single plane for 2-dimensional systems, the three
    // coordinate-plane projections otherwise.
    auto plane = [&](int a, int b) {
        svg::PlotSpec p;
        p.xlabel = "x" + std::to_string(a + 1);
        p.ylabel = "x" + std::to_string(b + 1);
        svg::Series s;
        for (std::size_t j = 0; j < traj.size(); ++j) {
            s.x.push_back(traj.samples[j][a]);
            s.y.push_back(traj.samples[j][b]);
        }
        p.series.push_back(std::move(s));
        return p;
    };
    if (traj.dim() == 2) {
        svg::PlotSpec p = plane(0, 1);
        p.title = id + ": phase plane";
        write_text(dir + "/phase.svg", svg::render_plot(p, 540, 540));
    } else if (traj.dim() >= 3) {
        std::vector<svg::PlotSpec> panels = {plane(0, 1), plane(0, 2), plane(1, 2)};
        write_text(dir + "/phase.svg", svg::render_panels(panels));
    }

    if (theta) {
        svg::PlotSpec tp;
        tp.title = id + ": Poisson stable forcing signal";
        tp.xlabel = "t";
        tp.ylabel = "Theta(t)";
        svg::Series s;
        double step = traj.dt > 0 ? traj.dt : (t1 - t0) / 2000.0;
        for (double t = t0; t <= t1 + 1e-9; t += step) {
            s.x.push_back(t);
            s.y.push_back(theta->eval(t));
        }
        tp.series.push_back(std::move(s));
        write_text(dir + "/theta.svg", svg::render_plot(tp));
    }
}

} // namespace

PipelineResult run_pipeline(SystemConfig cfg, const PipelineOptions& opt) {
    if (opt.seed > 0.0) cfg.logistic.seed = opt.seed;
    if (opt.tol > 0.0) {
        cfg.solver.rtol = opt.tol;
        cfg.solver.atol = opt.tol * 1e-2;
    }
    if (opt.burn_in > 0.0) cfg.solver.burn_in = opt.burn_in;
    if (opt.grid > 0) cfg.solver.grid_per_period = opt.grid;
    if (opt.eps > 0.0) cfg.verify.eps = opt.eps;
    if (opt.interval) {
        cfg.verify.a = opt.interval->first;
        cfg.verify.b = opt.interval->second;
    }

    const std::string dir = opt.out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + dir + ": " + ec.message());

    BuiltSystem built = make_system(cfg);
    QuasilinearSystem& sys = built.sys;
    const double rtol = cfg.solver.rtol;
    const int gpp = cfg.solver.grid_per_period;

    PipelineResult res;

    // Multipliers and the decay pair of the (periodic part of the) linear part.
    const PeriodicMatrixFn& lin = sys.has_split ? sys.B : sys.A;
    res.fd_estimated = multipliers(lin, rtol);
    const bool stable = res.fd_estimated.c4_satisfied;
    if (stable) estimate_dichotomy(lin, res.fd_estimated, rtol);
    res.fd_used = res.fd_estimated;
    res.pair_source = "estimated";
    if (cfg.declared.present) {
        res.fd_used.K = cfg.declared.K;
        res.fd_used.alpha = cfg.declared.alpha;
        res.pair_source = "declared";
    }

    res.conditions = check_conditions(sys, res.fd_used);
    res.conditions.pair_source = res.pair_source;
    res.gate_passed = res.conditions.gate_passed(sys);
    res.forced = !res.gate_passed && opt.force;

    {
        json fj = to_json(res.fd_used);
        fj["pair_source"] = res.pair_source;
        fj["estimated"] = to_json(res.fd_estimated);
        write_json_file(dir + "/floquet.json", fj);

        json cj = to_json(res.conditions);
        cj["gate_passed"] = res.gate_passed;
        if (res.forced)
            cj["warning"] = "conditions failed; solution forced past the gate with --force";
        write_json_file(dir + "/conditions.json", cj);
    }

    if (!res.gate_passed && !opt.force)
        throw ConditionFailed("condition gate failed for \"" + sys.id +
                              "\"; details in conditions.json (use --force to run regardless)");

    const double t0 = cfg.simulation.t0, t1 = cfg.simulation.t1;
    double va = cfg.verify.a, vb = cfg.verify.b;
    if (!(vb > va)) {
        va = t0;
        vb = t0 + 2.0 * sys.omega;
    }
    const double eps = cfg.verify.eps;

    double burn = cfg.solver.burn_in;
    if (burn <= 0.0) burn = res.fd_used.alpha > 0.0 ? 40.0 / res.fd_used.alpha : 40.0;
    if (built.theta) // the Poisson signal only covers t >= its origin
        burn = std::min(burn, t0 - built.theta->t_begin());

    json summary;
    summary["id"] = sys.id;
    summary["gate_passed"] = res.gate_passed;
    summary["pair_source"] = res.pair_source;

    // The bounded solution is only solved over the requested window; shifted
    // copies needed by the recurrence verification are reconstructed later by
    // short burned forward runs instead of one enormous solve.
    const double T1_solve = std::max(t1, vb);
    std::optional<LinearSolution> lin_sol;
    if (stable) {
        if (sys.has_split) {
            PicardResult pr = solve_mpps_coefficients(sys, res.fd_estimated, t0, T1_solve,
                                                      cfg.solver.iter_tol, cfg.solver.max_iter,
                                                      burn, gpp);
            res.solution = std::move(pr.traj);
            res.solved = true;
            json pj = to_json(pr);
            pj["route"] = "split";
            write_json_file(dir + "/picard.json", pj);
        } else if (sys.linear()) {
            lin_sol = bounded_solution_linear(sys.A, sys.forcing, t0, T1_solve, rtol, burn, gpp);
            res.solution = lin_sol->x;
            res.solved = true;
            summary["periodicity_residual"] = lin_sol->periodicity_residual;
            write_trajectory_csv(dir + "/solution_periodic.csv", clip(lin_sol->x_phi, t0, t1));
            write_trajectory_csv(dir + "/solution_poisson.csv", clip(lin_sol->x_psi, t0, t1));
        } else {
            PicardResult pr = picard_solve(sys, res.fd_used, t0, T1_solve, cfg.solver.iter_tol,
                                           cfg.solver.max_iter, burn, gpp);
            res.solution = std::move(pr.traj);
            res.solved = true;
            json pj = to_json(pr);
            pj["route"] = "picard";
            write_json_file(dir + "/picard.json", pj);
        }
    }

    res.forward = simulate_forward(sys, cfg.simulation.initial, t0, t1, rtol, gpp);
    write_trajectory_csv(dir + "/forward.csv", res.forward);
    if (res.solved) {
        write_trajectory_csv(dir + "/solution.csv", clip(res.solution, t0, t1));
        // Past the burn-in the forward run should ride the bounded solution.
        double wa = t0 + burn, wb = std::min(t1, t0 + burn + 3.0 * sys.omega);
        if (wb > wa) {
            res.route_equivalence = sup_distance(clip(res.forward, wa, wb), res.solution, wa, wb);
            summary["route_equivalence_sup"] = res.route_equivalence;
        }
    }

    // Recurrence artifacts and the Poisson verification report.
    if (built.theta && !built.seq.times.empty()) {
        write_sequence_csv(dir + "/sequence.csv", built.seq);
        {
            std::vector<double> ts, vs;
            double step = res.forward.dt > 0 ? res.forward.dt : (t1 - t0) / 2000.0;
            for (double t = t0; t <= t1 + 1e-9; t += step) {
                ts.push_back(t);
                vs.push_back(built.theta->eval(t));
            }
            write_signal_csv(dir + "/theta.csv", ts, vs);
        }
        json rj;
        ShiftSpectrum sp = shift_spectrum(built.seq, sys.omega);
        rj["spectrum"] = to_json(sp);
        ThetaPoissonReport tr = verify_theta_poisson(*built.theta, built.seq, va, vb, eps);
        rj["theta"] = to_json(tr);
        summary["theta_poisson_pass"] = tr.pass;
        if (res.solved) {
            // The bounded solution attracts every trajectory at the decay
            // rate, so its value near a far shifted window is recovered by a
            // zero-state run started `burn` earlier -- no long solve needed.
            std::vector<Trajectory> wins;
            for (double tau : built.seq.times) {
                if (vb + tau <= res.solution.t_end() + 1e-9) continue;
                double start = std::max(va + tau - burn, built.theta->t_begin());
                Trajectory run = simulate_forward(sys, Eigen::VectorXd::Zero(sys.dim), start,
                                                  vb + tau, rtol, gpp);
                // One grid step of slack so the window covers its endpoints.
                wins.push_back(clip(run, va + tau - run.dt, vb + tau + run.dt));
            }
            const Trajectory* sol = &res.solution;
            const std::vector<Trajectory>* wp = &wins;
            auto sol_eval = [sol, wp](double t) -> Eigen::VectorXd {
                for (const Trajectory& w : *wp)
                    if (t >= w.t0 - 1e-9 && t <= w.t_end() + 1e-9) return w.at(t);
                return sol->at(t);
            };
            ConvergenceReport sv = verify_poisson(sol_eval, built.seq, va, vb, eps);
            rj["solution"] = to_json(sv);
            summary["solution_poisson_pass"] = sv.pass;

            if (lin_sol && sys.forcing.psi) {
                // Definition-2 sum check: the periodic part wraps exactly,
                // the Poisson part is the remainder of the full solution.
                const Trajectory* xp = &lin_sol->x_phi;
                const double om = sys.omega, wrap0 = t0;
                auto phi_eval = [xp, om, wrap0](double t) -> Eigen::VectorXd {
                    double r = std::fmod(t - wrap0, om);
                    if (r < 0.0) r += om;
                    return xp->at(wrap0 + r);
                };
                auto psi_eval = [&phi_eval, &sol_eval](double t) -> Eigen::VectorXd {
                    return sol_eval(t) - phi_eval(t);
                };
                ConvergenceReport sum =
                    check_mpps_sum(phi_eval, psi_eval, built.seq, sys.omega, va, vb, eps);
                rj["sum"] = to_json(sum);
                summary["sum_check_pass"] = sum.pass;
                summary["sum_check_detail"] = sum.detail;
            }
        }
        write_json_file(dir + "/recurrence.json", rj);
    }

    if (cfg.gronwall.enabled) {
        GronwallReport gr =
            verify_gronwall_decay(sys, res.fd_used, cfg.simulation.initial, cfg.gronwall.z0, t0,
                                  t0 + cfg.gronwall.span, rtol, gpp);
        write_json_file(dir + "/gronwall.json", to_json(gr));
        summary["gronwall_pass"] = gr.pass;
    }

    if (opt.plots) write_plots(dir, res.forward, built.theta, t0, t1, sys.id);

    res.summary = summary;
    write_json_file(dir + "/summary.json", summary);
    return res;
}

const char* bundled_config(int n) {
    switch (n) {
    case 1: return embedded::example1_json;
    case 2: return embedded::example2_json;
    case 3: return embedded::example3_json;
    default: throw ConfigError("bundled example index must be 1, 2 or 3");
    }
}

SystemConfig bundled_system_config(int n) { return parse_config(bundled_config(n)); }

} // namespace mpps
