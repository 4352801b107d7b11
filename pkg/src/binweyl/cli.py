"""Command-line interface.

Exit codes: 0 success, 2 usage error, 3 data/parse error, 4 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import bench as bench_mod
from .errors import IntegrityError, ParseError, UsageError, WeylError
from .pooling import (
    REFERENCE_A_CLASSES_M4,
    REFERENCE_B_CLASSES_M4,
    default_partition,
    patch_descriptors,
    vectorize_columnwise,
)
from .pipeline.experiment import ExperimentConfig, normalize_patches, run_experiment
from .pipeline.imageio import load_pgm, save_pgm
from .pipeline.textures import sample_patches, synth_texture
from .transform import weyl_fast, weyl_naive, write_spectrum


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def read_signal(path: Path, m: int) -> np.ndarray:
    """Signal from a numeric CSV (any layout) or a square PGM patch (columnwise)."""
    if path.suffix.lower() in (".pgm", ".pnm"):
        px = load_pgm(path).pixels
        if px.shape[0] != px.shape[1] or px.size != 1 << m:
            raise UsageError(f"PGM patch {px.shape} does not hold 2**{m} samples in a square")
        return vectorize_columnwise(px)
    values = []
    for line_no, row in enumerate(csv.reader(path.read_text().splitlines()), 1):
        for cell in row:
            cell = cell.strip()
            if not cell:
                continue
            try:
                values.append(float(cell))
            except ValueError:
                if values:
                    raise ParseError(f"{path}:{line_no}: not a number: {cell!r}") from None
    y = np.array(values)
    if y.size != 1 << m:
        raise UsageError(f"signal has {y.size} samples, --m {m} needs {1 << m}")
    return y


def cmd_transform(args) -> int:
    y = read_signal(Path(args.input), args.m)
    s = weyl_naive(y) if args.naive else weyl_fast(y)
    write_spectrum(args.out, s)
    return 0


def cmd_describe(args) -> int:
    img = load_pgm(args.image)
    ps = sample_patches(img, args.n, args.size, args.seed)
    patches = normalize_patches(ps.patches, args.remove_mean, args.unit_norm)
    p = default_partition(4)
    desc = patch_descriptors(patches, p, args.include_zeros)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["row", "col"] + [f"d{i}" for i in range(desc.shape[-1])])
        for (r, c), d in zip(ps.positions, desc.reshape(len(ps), -1)):
            w.writerow([int(r), int(c)] + [repr(float(x)) for x in d])
    return 0


def _canonical(classes) -> list[list[int]]:
    return sorted(sorted(int(x, 2) if isinstance(x, str) else x for x in c) for c in classes)


def cmd_inspect_partition(args) -> int:
    p = default_partition(args.m)
    if args.m == 4:
        if _canonical(p.a_classes) != _canonical(REFERENCE_A_CLASSES_M4):
            raise IntegrityError("a-classes differ from the reference m=4 partition")
        if _canonical(p.b_classes) != _canonical(REFERENCE_B_CLASSES_M4):
            raise IntegrityError("b-classes differ from the reference m=4 partition")
        if len(p.classes) != 36 or sum(p.retained) != 24:
            raise IntegrityError(f"expected 36 classes / 24 retained, got {len(p.classes)} / {sum(p.retained)}")
    Path(args.out).write_text(json.dumps(p.to_json(), indent=2) + "\n")
    print(f"m={p.m} classes={len(p.classes)} retained={sum(p.retained)} id={p.partition_id}")
    return 0


def _load_images(paths):
    return [load_pgm(p) for p in paths], [Path(p).name for p in paths]


def cmd_cluster(args) -> int:
    images, names = _load_images(args.images)
    cfg = ExperimentConfig(
        mode="cluster",
        patches_per_texture=args.n,
        n_clusters=args.k,
        seed=args.seed,
        dihedral=args.dihedral,
        include_structural_zeros=args.include_zeros,
        remove_mean=args.remove_mean,
        unit_norm=args.unit_norm,
        workers=args.workers,
    )
    report = run_experiment(cfg, images, names, args.report)
    print(f"accuracy={report['accuracy']:.4f} patches={report['n_patches']}")
    return 0


def cmd_classify(args) -> int:
    images, names = _load_images(args.images)
    cfg = ExperimentConfig(
        mode="classify",
        patches_per_texture=args.n,
        train_per_class=args.train_per_class,
        k_coeffs=args.k_coeffs,
        k_sweep=args.sweep or [],
        seed=args.seed,
        selection_signal=args.signal,
        absolute=args.absolute,
        remove_mean=args.remove_mean,
        unit_norm=args.unit_norm,
    )
    report = run_experiment(cfg, images, names, args.report)
    for row in report["sweep"]:
        print(f"K={row['K']} accuracy={row['accuracy']:.4f}")
    return 0


def cmd_bench(args) -> int:
    rows = bench_mod.benchmark(args.m, args.reps, args.seed)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.DictWriter(out, fieldnames=list(rows[0]), lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
    finally:
        if args.out:
            out.close()
    print(f"speedup={bench_mod.speedup(rows):.1f}x", file=sys.stderr)
    return 0


def cmd_synth(args) -> int:
    img = synth_texture(args.period, args.period_y, args.pattern, args.size, args.noise, args.seed)
    save_pgm(args.out, img, args.maxval)
    return 0


def _add_norm_flags(p):
    p.add_argument("--remove-mean", action="store_true", help="subtract each patch's mean")
    p.add_argument("--unit-norm", action="store_true", help="scale each patch to unit norm")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="binweyl", description="Binary Weyl transform toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transform", help="Weyl spectrum of one signal")
    p.add_argument("--input", required=True, help="numeric CSV or square PGM patch")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--naive", action="store_true", help="per-coefficient quadratic forms")
    p.add_argument("--out", required=True, help=".csv, or raw float64 for any other suffix")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("describe", help="pooled descriptors of sampled patches")
    p.add_argument("--image", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size", type=int, default=16)
    p.add_argument("--include-zeros", action="store_true", help="average structural zeros too")
    p.add_argument("--out", required=True)
    _add_norm_flags(p)
    p.set_defaults(func=cmd_describe)

    p = sub.add_parser("inspect-partition", help="export the pooling partition as JSON")
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_inspect_partition)

    p = sub.add_parser("cluster", help="descriptors + k-means + accuracy + PCA")
    p.add_argument("--images", nargs="+", required=True)
    p.add_argument("--n", type=int, default=500, help="patches per texture")
    p.add_argument("--k", type=int, default=None, help="clusters (default: number of images)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", required=True)
    p.add_argument("--dihedral", action="store_true", help="sample from all 8 dihedral variants")
    p.add_argument("--include-zeros", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    _add_norm_flags(p)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("classify", help="coefficient selection + nearest neighbour")
    p.add_argument("--images", nargs="+", required=True)
    p.add_argument("--train-per-class", type=int, default=20)
    p.add_argument("--k-coeffs", type=int, default=1)
    p.add_argument("--n", type=int, default=500, help="patches per texture")
    p.add_argument("--sweep", type=_int_list, default=None, help="K values, e.g. 1,2,3,4,8,16")
    p.add_argument("--signal", choices=["patch", "subpatch"], default="patch")
    p.add_argument("--absolute", action="store_true", help="use |omega| features")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--report", required=True)
    _add_norm_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("bench", help="fast vs naive transform timing (CSV)")
    p.add_argument("--m", type=int, default=8)
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("synth", help="synthetic periodic texture as PGM")
    p.add_argument("--period", type=int, required=True)
    p.add_argument("--period-y", type=int, default=None)
    p.add_argument("--pattern", choices=["weave", "sine"], default="weave")
    p.add_argument("--size", type=int, default=256)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--maxval", type=int, default=255)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except WeylError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (FileNotFoundError, IsADirectoryError, PermissionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
