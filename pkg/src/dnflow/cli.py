"""Command line front end.

Subcommands:

* ``run``      advance the configured scenario and write the per-step CSV
* ``steady``   print the analytic and the discrete steady state
* ``decay``    relaxation experiment (exponential convergence to steady state)
* ``track``    quasi-steady tracking experiment (slowly varying data)
* ``converge`` self-convergence study under (h, tau) refinement
* ``check``    full invariant suite on the configured scenario

Every subcommand takes ``--config <path>``; outputs land in ``--out <dir>``
(default: current directory).  Exit status is 0 when all asserted checks
pass, 1 on a failed check (the report path is printed), 2 on usage errors.
"""

import argparse
import sys
import numpy as np
from pathlib import Path

from . import diagnostics
from .config import ConfigError, parse_config
from .experiments import (ExperimentReport, run_convergence, run_relaxation,
                          run_tracking, scenario_summary, standard_checks)
from .newton import NonconvergenceError
from .steady import steady_analytic, steady_discrete
from .stepper import advance, jacobian


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="dnflow",
        description="entropy-stable solver for doubly nonlinear diffusion on an interval",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in [
        ("run", "advance the scenario and write per-step diagnostics"),
        ("steady", "print analytic and discrete steady states"),
        ("decay", "relaxation-to-steady-state experiment"),
        ("track", "quasi-steady tracking experiment"),
        ("converge", "grid/time refinement study"),
        ("check", "run the full invariant suite"),
    ]:
        cmd = sub.add_parser(name, help=doc)
        cmd.add_argument("--config", required=True, help="path to the JSON configuration")
        cmd.add_argument("--out", default=".", help="output directory (default: .)")
        if name == "converge":
            cmd.add_argument("--levels", type=int, default=None,
                             help="number of refinement levels (default from config)")
        if name == "check":
            cmd.add_argument("--seed", type=int, default=0,
                             help="seed for the randomized sweeps (default 0)")
    return parser


def _report_lines(report: ExperimentReport):
    for key in sorted(report.checks):
        print(f"{key}: {'PASS' if report.checks[key] else 'FAIL'}")
    for key in sorted(report.fitted):
        val = report.fitted[key]
        print(f"{key} = {val:.6g}" if isinstance(val, float) else f"{key} = {val}")


def _finish(report: ExperimentReport, out_dir):
    _report_lines(report)
    if not report.passed:
        print(f"FAILED; report under {out_dir}", file=sys.stderr)
        return 1
    return 0


def _cmd_run(cfg, out_dir):
    scenario = cfg.build_scenario()
    traj = advance(scenario, cfg.build_solver_options())
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "trajectory.csv"
    diagnostics.records_to_csv(traj.diagnostics, path)
    print(f"advanced {scenario.n_steps} steps; diagnostics in {path}")
    checks = standard_checks(traj, scenario)
    for key in sorted(checks):
        print(f"{key}: {'PASS' if checks[key] else 'FAIL'}")
    return 0 if all(checks.values()) else 1


def _cmd_steady(cfg, out_dir):
    model = cfg.build_model()
    grid = cfg.build_grid()
    schedule = cfg.build_schedule()
    ua, ub = schedule.value(0.0)
    analytic = steady_analytic(model, cfg.alpha, grid.length, ua, ub, grid=grid)
    discrete = steady_discrete(grid, model, cfg.alpha, ua, ub)
    print(f"analytic: u_left={analytic.u_left:.6f}, slope={analytic.slope:.6f}")
    print(f"discrete: u_left={discrete.u_left:.6f}, slope={discrete.slope:.6f}")
    print("x,analytic,discrete")
    for x, a, d in zip(grid.nodes, analytic.nodal, discrete.nodal):
        print(f"{x:.17g},{a:.17g},{d:.17g}")
    return 0


def _cmd_decay(cfg, out_dir):
    scenario = cfg.build_scenario()
    opts = cfg.build_solver_options()
    report = run_relaxation(scenario, opts, out_dir=out_dir,
                            burn_in_fraction=cfg.experiment["burn_in_fraction"],
                            name="decay")
    return _finish(report, out_dir)


def _cmd_track(cfg, out_dir):
    scenario = cfg.build_scenario()
    opts = cfg.build_solver_options()
    report = run_tracking(scenario, opts, gamma=cfg.experiment.get("gamma"),
                          out_dir=out_dir,
                          late_fraction=cfg.experiment["late_fraction"])
    return _finish(report, out_dir)


def _cmd_converge(cfg, out_dir, levels):
    scenario = cfg.build_scenario()
    opts = cfg.build_solver_options()
    report = run_convergence(scenario, levels or cfg.experiment["levels"],
                             opts, out_dir=out_dir)
    for row in report.table:
        order = "-" if row["order"] is None else f"{row['order']:.3f}"
        print(f"level {row['level']}: cells={row['cells']} tau={row['tau']:g} "
              f"error={row['error']:.6e} order={order}")
    return _finish(report, out_dir)


def _cmd_check(cfg, out_dir, seed):
    scenario = cfg.build_scenario()
    opts = cfg.build_solver_options(keep_iterates=True)
    traj = advance(scenario, opts)

    checks = standard_checks(traj, scenario)
    checks["newton_within_budget"] = all(
        r.newton_iterations <= opts.newton_max_iter for r in traj.diagnostics)

    m_ok = True
    for k, step_iterates in enumerate(traj.iterates):
        t_k = traj.times[k + 1]
        for it in [*step_iterates, traj.states[k + 1]]:
            ok, _ = diagnostics.check_m_matrix(
                jacobian(scenario, it, t_k, opts.eps_reg))
            m_ok = m_ok and ok
    checks["m_matrix_at_iterates"] = m_ok

    rng = np.random.default_rng(seed)
    grid = scenario.grid
    equiv_ok = True
    for _ in range(200):
        v = rng.standard_normal(grid.cells + 1)
        exact = grid.exact_l2_inner(v, v)
        lumped = grid.lumped_inner(v, v)
        equiv_ok = equiv_ok and (exact <= lumped * (1 + 1e-12)
                                 and lumped <= 3 * exact * (1 + 1e-12))
    checks["norm_equivalence"] = equiv_ok

    steady_ok = True
    model = scenario.model
    for _ in range(5):
        ua, ub = rng.uniform(model.u_min, model.u_max, size=2)
        hat = steady_analytic(model, scenario.alpha, grid.length, ua, ub, grid=grid)
        num = steady_discrete(grid, model, scenario.alpha, ua, ub)
        steady_ok = steady_ok and float(np.max(np.abs(hat.nodal - num.nodal))) <= 1e-8
    checks["steady_cross_validation"] = steady_ok

    report = ExperimentReport("check", scenario_summary(scenario), checks,
                              {"seed": seed})
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "check_report.json"
    report.write(path)
    for key in sorted(checks):
        print(f"{key}: {'PASS' if checks[key] else 'FAIL'}")
    if not report.passed:
        print(f"FAILED; see {path}", file=sys.stderr)
        return 1
    print(f"all checks passed; report in {path}")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config)
    except ConfigError as err:
        print(f"configuration rejected: {err}", file=sys.stderr)
        return 1
    try:
        if args.command == "run":
            return _cmd_run(cfg, args.out)
        if args.command == "steady":
            return _cmd_steady(cfg, args.out)
        if args.command == "decay":
            return _cmd_decay(cfg, args.out)
        if args.command == "track":
            return _cmd_track(cfg, args.out)
        if args.command == "converge":
            return _cmd_converge(cfg, args.out, args.levels)
        if args.command == "check":
            return _cmd_check(cfg, args.out, args.seed)
    except NonconvergenceError as err:
        print(f"solver failure: {err}", file=sys.stderr)
        return 1
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
