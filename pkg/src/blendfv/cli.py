"""Command-line interface: run benchmarks, generate data, train, report.

Exit codes: 0 success, 2 usage error (argparse), 3 solver failure
(positivity or CFL), 4 file I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources

import numpy as np

from . import datagen, experiments, nn
from .euler import GasModel
from .mesh import CflError, PositivityError
from .schemes import PRESETS, LimiterParams

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOLVER = 3
EXIT_IO = 4

DEFAULT_WEIGHTS_RESOURCE = "ddlft_weights.json"


def load_default_weights():
    ref = resources.files("blendfv.data").joinpath(DEFAULT_WEIGHTS_RESOURCE)
    with resources.as_file(ref) as path:
        return nn.load_weights(path)


def _limiter_params(args) -> LimiterParams:
    params = LimiterParams()
    if getattr(args, "scheme", None) == "ddlft":
        if getattr(args, "weights", None):
            params.nn_model = nn.load_weights(args.weights)
        else:
            params.nn_model = load_default_weights()
    return params


def _cmd_run(args) -> int:
    result = experiments.run_scheme(
        args.scheme, args.testcase, args.cells, args.t_end,
        gas=GasModel(args.gamma), cfl=args.cfl, limiter_params=_limiter_params(args),
    )
    grid = result.final.grid
    from .euler import primitives

    rho, v, p = primitives(result.final.states, GasModel(args.gamma))
    alpha_left = result.alphas[-1][:-1] if result.alphas else np.zeros(grid.n_cells)
    table = np.column_stack([grid.centers(), rho, v, p, alpha_left])
    header = "x,rho,v,p,alpha_left_interface"
    if args.out:
        np.savetxt(args.out, table, delimiter=",", header=header, comments="")
        print(f"wrote {args.out}: {grid.n_cells} cells at t={result.final.time:g}, "
              f"{result.step_count} steps, {result.wall_time:.2f}s")
    else:
        print(header)
        np.savetxt(sys.stdout, table, delimiter=",")
    return EXIT_OK


def _cmd_gen_data(args) -> int:
    result = datagen.build_dataset(
        n_ics=args.n_ics, coarse_cells=args.coarse_cells, n_fine=args.n_fine,
        t_end=args.t_end, n_samples=args.n_samples, seed=args.seed, cfl=args.cfl,
        gas=GasModel(args.gamma),
        progress=lambda done, total: print(f"IC {done}/{total}", flush=True),
    )
    manifest = args.manifest or (args.out + ".manifest.json")
    datagen.save_dataset_csv(result, args.out, manifest)
    print(f"wrote {result.targets.size} samples to {args.out}")
    return EXIT_OK


def _cmd_train(args) -> int:
    x, y = datagen.load_dataset_csv(args.data)
    result = nn.train(x, y, nn.SCHEDULES[args.schedule], kind=args.loss, seed=args.seed)
    nn.save_weights(result.model, args.out)
    first, last = result.epoch_losses[0], result.epoch_losses[-1]
    print(f"trained on {x.shape[0]} samples: epoch loss {first:.4e} -> {last:.4e}")
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_convergence(args) -> int:
    lo, hi = args.levels.split("..")
    levels = range(int(lo), int(hi) + 1)
    cells, errors, orders = experiments.convergence_study(
        args.scheme, levels, t_end=args.t_end, gas=GasModel(args.gamma), cfl=args.cfl,
        limiter_params=_limiter_params(args),
    )
    print(f"{'N':>6} {'L1(rho)':>12} {'EOC':>6}")
    for i, (n, e) in enumerate(zip(cells, errors)):
        order = f"{orders[i - 1]:.2f}" if i else "-"
        print(f"{n:>6} {e:>12.4e} {order:>6}")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write("cells,l1_density,eoc\n")
            for i, (n, e) in enumerate(zip(cells, errors)):
                fh.write(f"{n},{e:.10e},{orders[i - 1] if i else ''}\n")
    return EXIT_OK


def _cmd_entropy_report(args) -> int:
    result = experiments.run_scheme(
        args.scheme, args.testcase, args.cells, args.t_end,
        gas=GasModel(args.gamma), cfl=args.cfl, limiter_params=_limiter_params(args),
    )
    report = experiments.entropy_production_report(result, result.final.grid.dx)
    print(f"cells x steps: {report.productions.shape[1]} x {report.productions.shape[0]}")
    print(f"max production: {report.max_production:.4e} (scale max|U| = {report.scale:.4e})")
    print(f"entries above {report.tolerance:.1e}: {report.violation_fraction:.3%}")
    if args.out:
        np.savetxt(args.out, report.productions, delimiter=",")
        print(f"wrote per-step productions to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="blendfv", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, scheme=True):
        if scheme:
            p.add_argument("--scheme", choices=sorted(PRESETS), required=True)
        p.add_argument("--cfl", type=float, default=0.45)
        p.add_argument("--gamma", type=float, default=1.4)
        p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("run", help="advance one scheme on one benchmark, write CSV")
    common(p)
    p.add_argument("--testcase", choices=["shu-osher", "smooth-transport"], required=True)
    p.add_argument("--cells", type=int, default=400)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--weights", help="DDLFT weight file (default: packaged)")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("gen-data", help="generate the training dataset")
    common(p, scheme=False)
    p.add_argument("--n-ics", type=int, default=32)
    p.add_argument("--coarse-cells", type=int, default=100)
    p.add_argument("--n-fine", type=int, default=4000)
    p.add_argument("--n-samples", type=int, default=100)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--out", required=True)
    p.add_argument("--manifest")
    p.set_defaults(func=_cmd_gen_data)

    p = sub.add_parser("train", help="train the blend predictor on a dataset CSV")
    p.add_argument("--data", required=True)
    p.add_argument("--loss", choices=list(nn.LOSS_KINDS), default="nonsym")
    p.add_argument("--schedule", choices=sorted(nn.SCHEDULES), default="paper")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("convergence", help="smooth-transport EOC table")
    common(p)
    p.add_argument("--levels", default="5..10", help="power-of-two range, e.g. 5..10")
    p.add_argument("--t-end", type=float, default=0.5)
    p.add_argument("--weights")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_convergence)

    p = sub.add_parser("entropy-report", help="per-cell entropy production summary")
    common(p)
    p.add_argument("--testcase", choices=["shu-osher", "smooth-transport"], default="shu-osher")
    p.add_argument("--cells", type=int, default=400)
    p.add_argument("--t-end", type=float, default=1.8)
    p.add_argument("--weights")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_entropy_report)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PositivityError, CflError) as err:
        print(f"solver failure: {err}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
