#!/usr/bin/env python3
"""Run the two benchmark experiments for all schemes and print summaries.

Produces per-scheme CSV profiles of the Shu-Osher run, an EOC table for the
smooth transport test, and entropy-production statistics. DDLFT needs a
weight file (defaults to the packaged one).
"""

import argparse
import sys
import time

import numpy as np

from blendfv import experiments, nn
from blendfv.cli import load_default_weights
from blendfv.datagen import project_to_coarse
from blendfv.euler import primitives
from blendfv.schemes import LimiterParams


def limiter_params_for(scheme, weights):
    params = LimiterParams()
    if scheme == "ddlft":
        params.nn_model = nn.load_weights(weights) if weights else load_default_weights()
    return params


def shu_osher_suite(schemes, weights, cells, out_prefix):
    gas = experiments.GasModel(1.4)
    print(f"== Shu-Osher, {cells} cells, T=1.8 ==")
    print("reference: 4000-cell MUSCL ...", flush=True)
    t0 = time.time()
    grid_fine, ref = experiments.reference_shu_osher()
    ref_coarse = project_to_coarse(ref, grid_fine.n_cells // cells)
    tv_ref = experiments.total_variation(ref_coarse[:, 0])
    print(f"   done in {time.time() - t0:.0f}s, reference density TV = {tv_ref:.4f}")
    for scheme in schemes:
        t0 = time.time()
        result = experiments.run_scheme(
            scheme, "shu-osher", cells, 1.8, limiter_params=limiter_params_for(scheme, weights)
        )
        err = experiments.l1_error(result.final.states, ref, result.final.grid.dx)
        tv = experiments.total_variation(result.final.states[:, 0])
        report = experiments.entropy_production_report(result, result.final.grid.dx)
        print(
            f"{scheme:>9}: steps={result.step_count:4d}  L1(rho)={err.density:.4e}  "
            f"TV={tv:.4f} (ref {tv_ref:.4f})  max_prod={report.max_production:+.2e}  "
            f"viol={report.violation_fraction:.2%}  wall={time.time() - t0:.1f}s"
        )
        if out_prefix:
            rho, v, p = primitives(result.final.states, gas)
            alpha = result.alphas[-1][:-1]
            np.savetxt(
                f"{out_prefix}_{scheme}.csv",
                np.column_stack([result.final.grid.centers(), rho, v, p, alpha]),
                delimiter=",", header="x,rho,v,p,alpha_left_interface", comments="",
            )


def convergence_suite(schemes, weights):
    print("== smooth transport EOC (t=0.5, cfl 0.45) ==")
    for scheme in schemes:
        levels = range(5, 10) if scheme == "ddlft" else range(5, 11)
        t0 = time.time()
        cells, errors, orders = experiments.convergence_study(
            scheme, levels, limiter_params=limiter_params_for(scheme, weights)
        )
        err_s = " ".join(f"{e:.2e}" for e in errors)
        ord_s = " ".join(f"{o:.2f}" for o in orders)
        print(f"{scheme:>9}: N={list(cells)}\n           L1: {err_s}\n          EOC: {ord_s}"
              f"   ({time.time() - t0:.1f}s)")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--schemes", nargs="+",
                    default=["delft", "pplft", "ddlft", "palft", "dafermos"])
    ap.add_argument("--weights", help="DDLFT weight file (default: packaged)")
    ap.add_argument("--cells", type=int, default=400)
    ap.add_argument("--out-prefix", default="artifacts/shu_osher")
    ap.add_argument("--skip-shu-osher", action="store_true")
    ap.add_argument("--skip-convergence", action="store_true")
    args = ap.parse_args(argv)

    if not args.skip_shu_osher:
        shu_osher_suite(args.schemes, args.weights, args.cells, args.out_prefix)
    if not args.skip_convergence:
        convergence_suite([s for s in args.schemes if s != "pplft"], args.weights)
    return 0


if __name__ == "__main__":
    sys.exit(main())
