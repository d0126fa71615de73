#!/usr/bin/env python3
"""Train the blend-predictor network on a generated dataset.

Reads the CSV written by make_training_data.py, runs the sectioned ADAM
schedule and writes the JSON weight file consumed by the ddlft scheme.
"""

import argparse
import sys
import time

from blendfv import datagen, nn


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", default="artifacts/train_data.csv")
    ap.add_argument("--loss", choices=list(nn.LOSS_KINDS), default="nonsym")
    ap.add_argument("--schedule", choices=sorted(nn.SCHEDULES), default="paper")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--out", default="artifacts/weights.json")
    ap.add_argument("--loss-log", default=None, help="optional CSV of per-epoch losses")
    args = ap.parse_args(argv)

    x, y = datagen.load_dataset_csv(args.data)
    print(f"dataset: {x.shape[0]} samples, target mean {y.mean():.4f}")
    started = time.time()
    result = nn.train(x, y, nn.SCHEDULES[args.schedule], kind=args.loss, seed=args.seed)
    print(f"trained in {time.time() - started:.1f}s")
    losses = result.epoch_losses
    for sec, start in enumerate(result.section_boundaries):
        end = (
            result.section_boundaries[sec + 1]
            if sec + 1 < len(result.section_boundaries)
            else len(losses)
        )
        print(f"section {sec + 1}: first epoch {losses[start]:.3e}, last {losses[end - 1]:.3e}")
    nn.save_weights(result.model, args.out)
    print(f"wrote {args.out}")
    if args.loss_log:
        with open(args.loss_log, "w") as fh:
            fh.write("epoch,loss\n")
            fh.writelines(f"{i},{v:.10e}\n" for i, v in enumerate(losses))
    return 0


if __name__ == "__main__":
    sys.exit(main())
