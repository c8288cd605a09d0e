"""Command-line entry point: ``lrfhss <command> ...`` or ``python -m lrfhss``."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from . import analytic, harness
from .core import SequenceSet, generate_sequences, make_rng
from .decoder import ILP_FORMS, decode_exact, decode_greedy, decode_online, decode_partial, export_lp
from .simulator import ObservedMatrix, generate_traffic, observe

log = logging.getLogger("lrfhss")


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="INI config file; flags override its values")
    p.add_argument("--preset", help="regional preset, e.g. EU_DR8 (sets --obws)")
    p.add_argument("--obws", type=int, help="OBWs per grid (C)")
    p.add_argument("--slots", type=int, help="time slots (T)")
    p.add_argument("--sequences", type=int, help="number of hopping sequences (S)")
    p.add_argument("--max-len", type=int, help="stored hops per sequence (P_max)")
    p.add_argument("--frames", help="frame counts F, e.g. 500:3300:100 or 500,1000")
    p.add_argument("--fragments", help="fragments per frame P, e.g. 10,30,50")
    p.add_argument("--runs", type=int, help="runs per (F, P) step")
    p.add_argument("--seed", type=int, help="base seed")
    p.add_argument("--decoder", choices=harness.DECODERS)
    p.add_argument("--match-fraction", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--out", help="output directory")


def _config(args) -> harness.ExperimentConfig:
    cfg = harness.ExperimentConfig.from_file(args.config) if args.config else harness.ExperimentConfig()
    C = args.obws
    if args.preset and C is None:
        from .core import preset

        C = preset(args.preset).obw_per_grid
    return cfg.replace(
        preset=args.preset, C=C, T_slots=args.slots, S=args.sequences, P_max=args.max_len,
        frame_range=harness.parse_int_list(args.frames) if args.frames else None,
        fragment_values=harness.parse_int_list(args.fragments) if args.fragments else None,
        runs_per_step=args.runs, base_seed=args.seed, decoder=args.decoder,
        match_fraction=args.match_fraction, workers=args.workers, output_dir=args.out,
        plots=True if getattr(args, "plots", False) else None,
    )


def cmd_sweep(args) -> int:
    cfg = _config(args)
    os.makedirs(cfg.output_dir, exist_ok=True)
    records = harness.run_sweep(cfg)
    path = os.path.join(cfg.output_dir, "sweep.csv")
    harness.emit_csv(records, path)
    print(path)
    if cfg.plots:
        for f in harness.emit_plots(records, os.path.join(cfg.output_dir, "sweep")):
            print(f)
    failed = sum(not r.ok for r in records)
    if failed:
        print(f"error: {failed} of {len(records)} runs failed", file=sys.stderr)
        return 1
    return 0


def cmd_bench(args) -> int:
    cfg = _config(args)
    os.makedirs(cfg.output_dir, exist_ok=True)
    res = harness.benchmark(cfg)
    path = os.path.join(cfg.output_dir, f"bench_{cfg.decoder}.csv")
    res.write_csv(path)
    print(path)
    print(f"spearman(decode time, fragments) = {res.spearman:.3f}")
    return 0 if all(r.ok for r in res.records) else 1


def cmd_simulate(args) -> int:
    seqs = generate_sequences(args.sequences, args.obws, args.max_len, args.seed)
    tx = generate_traffic(args.frames, seqs, args.slots, args.fragments, make_rng(args.seed, 1))
    M, cmap = observe(tx, seqs, args.slots, args.obws)
    os.makedirs(args.out, exist_ok=True)
    seqs.save(os.path.join(args.out, "sequences.txt"))
    M.save(os.path.join(args.out, "matrix.txt"))
    with open(os.path.join(args.out, "cells.csv"), "w", encoding="ascii") as fh:
        fh.write(cmap.dumps_cells())
    with open(os.path.join(args.out, "truth.csv"), "w", encoding="ascii") as fh:
        fh.write("s,t,p\n" + "".join(f"{a},{b},{c}\n" for a, b, c in tx))
    print(args.out)
    return 0


def cmd_decode(args) -> int:
    M = ObservedMatrix.load(args.matrix)
    seqs = SequenceSet.load(args.sequences)
    P = args.fragments
    if args.decoder == "exact":
        out = decode_exact(M, seqs, P)
    elif args.decoder == "online":
        out = decode_online(M.columns(), seqs, P, M.obws)
    elif args.match_fraction < 1.0:
        out = decode_partial(M, seqs, P, args.match_fraction)
    else:
        out = decode_greedy(M, seqs, P)
    text = out.dumps()
    if args.out:
        with open(args.out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_analytic(args) -> int:
    n_tx = harness.parse_int_list(args.frames)
    Ps = harness.parse_int_list(args.fragments)
    rows = analytic.analytic_rows(n_tx, Ps, ("fast", "robust"), args.obws, args.slots)
    if args.out:
        analytic.write_analytic_csv(args.out, rows)
        print(args.out)
    else:
        sys.stdout.write(",".join(analytic.ANALYTIC_COLUMNS) + "\n")
        for r in rows:
            sys.stdout.write(",".join(str(r[c]) for c in analytic.ANALYTIC_COLUMNS) + "\n")
    return 0


def cmd_export_lp(args) -> int:
    M = ObservedMatrix.load(args.matrix)
    seqs = SequenceSet.load(args.sequences)
    export_lp(M, seqs, args.fragments, args.out, form=args.form)
    print(args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lrfhss", description="Headerless LR-FHSS frame recovery")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sweep", help="run a parameter sweep and write sweep.csv")
    _add_model_flags(p)
    p.add_argument("--plots", action="store_true", help="also write SVG figures")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bench", help="time the decoder over a sweep")
    _add_model_flags(p)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("simulate", help="write one random instance (sequences, matrix, truth)")
    p.add_argument("--obws", type=int, default=35)
    p.add_argument("--slots", type=int, default=1000)
    p.add_argument("--sequences", type=int, default=512)
    p.add_argument("--max-len", type=int, default=90)
    p.add_argument("--frames", type=int, default=1000)
    p.add_argument("--fragments", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="instance")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("decode", help="decode a serialized matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--sequences", required=True)
    p.add_argument("--fragments", type=int, required=True)
    p.add_argument("--decoder", choices=harness.DECODERS, default="greedy")
    p.add_argument("--match-fraction", type=float, default=1.0)
    p.add_argument("--out", help="CSV output path (default stdout)")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("analytic", help="header/payload/frame reception curves")
    p.add_argument("--frames", default="0:3300:100", help="n_tx values")
    p.add_argument("--fragments", default="10,30,50,70,90")
    p.add_argument("--obws", type=int, default=35)
    p.add_argument("--slots", type=int, default=1000)
    p.add_argument("--out")
    p.set_defaults(func=cmd_analytic)

    p = sub.add_parser("export-lp", help="write the decoding ILP in LP format")
    p.add_argument("--matrix", required=True)
    p.add_argument("--sequences", required=True)
    p.add_argument("--fragments", type=int, required=True)
    p.add_argument("--form", choices=ILP_FORMS, default="forcing")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_lp)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (OSError, ValueError, KeyError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
