"""``streamfuzz`` command line."""

from __future__ import annotations

import argparse
import logging
import sys

from .bench import EXIT_CONFIG, RunConfig, run_benchmark


def _sizes(text: str) -> tuple[int, ...]:
    try:
        sizes = tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of integers: {text!r}") from None
    if not sizes:
        raise argparse.ArgumentTypeError("empty chunk size list")
    return sizes


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="streamfuzz",
        description="Replay a labeled stream in chunks through WFCM and WFCM-AC and write comparison metrics.",
    )
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", metavar="PATH", help="KDD'99-format CSV, optionally gzip-compressed")
    src.add_argument("--synthetic", metavar="SPEC",
                     help="synthetic blob stream, e.g. 'n=20000,blobs=5,d=2,std=0.5,birth=0,seed=0'")
    p.add_argument("--chunk-size", type=_sizes, default=(1000, 2000, 3000, 4000), metavar="LIST",
                   help="comma-separated chunk sizes (default 1000,2000,3000,4000)")
    p.add_argument("--algo", choices=("wfcm", "wfcm-ac", "both"), default="both")
    p.add_argument("--k", type=int, default=5, help="(initial) number of clusters")
    p.add_argument("--m", type=float, default=2.0, help="fuzzifier")
    p.add_argument("--epsilon", type=float, default=1e-5, help="objective improvement tolerance")
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--lambda", dest="decay", type=float, default=0.1, help="time-weight decay per chunk")
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int, default=None, help="default: twice --k")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", metavar="DIR", default="results")
    p.add_argument("--norm", choices=("cumulative", "per-chunk"), default="cumulative")
    p.add_argument("--label-map", metavar="PATH", help="attack_name,class_name CSV (default: bundled KDD'99 map)")
    p.add_argument("--valid-by", choices=("support", "validity"), default="support",
                   help="valid-cluster rule: crisp support count or per-cluster Xie-Beni test")
    p.add_argument("--min-support", type=int, default=None,
                   help="points a cluster needs to count as valid (default max(2, 0.5%% of chunk))")
    p.add_argument("--max-records", type=int, default=None, help="only read this many records")
    p.add_argument("-v", "--verbose", action="count", default=0)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        config = RunConfig(
            input=args.input, synthetic=args.synthetic, chunk_sizes=args.chunk_size, algo=args.algo,
            k=args.k, m=args.m, epsilon=args.epsilon, max_iter=args.max_iter, decay=args.decay,
            k_min=args.k_min, k_max=args.k_max, seed=args.seed, out=args.out, norm=args.norm,
            label_map=args.label_map, valid_by=args.valid_by, min_support=args.min_support,
            max_records=args.max_records,
        )
    except (TypeError, ValueError) as exc:
        logging.error("configuration error: %s", exc)
        return EXIT_CONFIG
    return run_benchmark(config)


if __name__ == "__main__":
    sys.exit(main())
