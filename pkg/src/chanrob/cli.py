"""Command-line surface: depolarizing sweeps, hierarchy classification,
experiment simulation, and single-measure evaluation.

Outputs are written atomically (tempfile + rename) so downstream plotting
never sees torn files; the exit code is 0 only when every requested
computation reached optimal/exact status.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import channels as ch
from . import correlations as co
from . import tomosim as ts
from .measures import (
    MeasureError,
    channel_negativity,
    classify_depolarizing,
    digest_arrays,
    non_macrorealism_robustness,
    non_sb_robustness,
    quantum_memory_robustness,
    steering_robustness,
    temporal_negativity,
)

SWEEP_COLUMNS = ("v", "R_QM", "R_TS", "R_nMR", "f", "N_channel")
MEASURE_NAMES = ("qm", "ts", "mr", "f", "negativity")
SVG_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b")


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".chanrob-")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _parse_grid(spec: str) -> np.ndarray:
    try:
        start, stop, points = spec.split(":")
        start, stop, points = float(start), float(stop), int(points)
    except ValueError as exc:
        raise SystemExit(f"error: --grid must be start:stop:points, got {spec!r}") from exc
    if not (0.0 <= start <= stop <= 1.0) or points < 2:
        raise SystemExit("error: grid needs 0 <= start <= stop <= 1 and points >= 2")
    return np.linspace(start, stop, points)


def _measurement_family(spec: str, seed: int) -> list:
    """paulis3, or random:k for the Pauli triple plus k random dichotomic
    projective triples."""
    base = [ch.pauli_measurements()]
    if spec == "paulis3":
        return base
    if spec.startswith("random:"):
        try:
            k = int(spec.split(":", 1)[1])
        except ValueError as exc:
            raise SystemExit(f"error: bad family spec {spec!r}") from exc
        rng = np.random.default_rng(seed)
        for _ in range(k):
            povms = []
            for _ in range(3):
                direction = rng.normal(size=3)
                direction /= np.linalg.norm(direction)
                obs = direction[0] * np.array([[0, 1], [1, 0]], dtype=complex)
                obs += direction[1] * np.array([[0, -1j], [1j, 0]], dtype=complex)
                obs += direction[2] * np.array([[1, 0], [0, -1]], dtype=complex)
                w, vecs = np.linalg.eigh(obs)
                plus = np.outer(vecs[:, 1], vecs[:, 1].conj())
                povms.append(ch.POVM((plus, np.eye(2) - plus), labels=(+1, -1)))
            base.append(ch.MeasurementCollection(tuple(povms)))
        return base
    raise SystemExit(f"error: unknown family {spec!r} (use paulis3 or random:k)")


def _evaluate_point(v: float, measures: list[str], family: list) -> dict:
    """All requested measures at one v; returns per-measure value/gap/status."""
    channel = ch.depolarizing(v)
    pdo = ch.pdo_of_channel(channel)
    out = {}
    if "qm" in measures:
        res = quantum_memory_robustness(channel)
        out["R_QM"] = {"value": res.value, "gap": res.gap, "status": res.status}
    if "ts" in measures:
        best = None
        for coll in family:
            cand = steering_robustness(co.temporal_assemblage(pdo, coll))
            if best is None or cand.value > best.value:
                best = cand
        status = best.status if len(family) == 1 else "lower-bound"
        out["R_TS"] = {"value": best.value, "gap": best.gap, "status": status}
    if "mr" in measures:
        t0, t1 = ch.chsh_temporal_settings()
        res = non_macrorealism_robustness(co.correlation_from_pdo(pdo, t0, t1))
        out["R_nMR"] = {"value": res.value, "gap": res.gap, "status": res.status}
    if "f" in measures:
        out["f"] = {"value": temporal_negativity(pdo), "gap": 0.0, "status": "exact"}
    if "negativity" in measures:
        res = channel_negativity(channel)
        out["N_channel"] = {"value": res.value, "gap": res.gap, "status": res.status}
    return out


def _sweep_svg(grid: np.ndarray, rows: list[dict]) -> str:
    """Minimal self-contained line chart: one polyline per measure, legend as
    text elements, viewBox 0 0 640 480."""
    width, height = 640, 480
    x0, y0, x1, y1 = 60, 420, 600, 40
    columns = [c for c in SWEEP_COLUMNS[1:] if any(c in row for row in rows)]
    vmax = max(
        (row[c]["value"] for row in rows for c in columns if c in row),
        default=1.0,
    )
    vmax = max(vmax, 1e-9)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>',
        f'<text x="{(x0 + x1) / 2:.0f}" y="{y0 + 35}" font-size="14">v</text>',
        f'<text x="{x0 - 45}" y="{y0 + 5}" font-size="12">0</text>',
        f'<text x="{x0 - 45}" y="{y1 + 5}" font-size="12">{vmax:.3g}</text>',
    ]
    for idx, column in enumerate(columns):
        points = []
        for v, row in zip(grid, rows):
            if column not in row:
                continue
            px = x0 + (x1 - x0) * (v - grid[0]) / max(grid[-1] - grid[0], 1e-12)
            py = y0 - (y0 - y1) * row[column]["value"] / vmax
            points.append(f"{px:.2f},{py:.2f}")
        color = SVG_COLORS[idx % len(SVG_COLORS)]
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{" ".join(points)}"/>')
        parts.append(f'<text x="{x1 - 130}" y="{y1 + 20 + 18 * idx}" font-size="13" fill="{color}">{column}</text>')
    parts.append("</svg>")
    return "\n".join(parts)


def cmd_sweep(args) -> int:
    grid = _parse_grid(args.grid)
    measures = [m.strip() for m in args.measures.split(",") if m.strip()]
    for m in measures:
        if m not in MEASURE_NAMES:
            raise SystemExit(f"error: unknown measure {m!r} (choose from {', '.join(MEASURE_NAMES)})")
    family = _measurement_family(args.family, args.seed)

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        futures = [pool.submit(_evaluate_point, float(v), measures, family) for v in grid]
        try:
            rows = [f.result() for f in futures]
        except MeasureError as exc:
            print(f"error: solver failure during sweep: {exc}", file=sys.stderr)
            return 2

    header_cols = [c for c in SWEEP_COLUMNS if c == "v" or any(c in row for row in rows)]
    lines = [",".join(header_cols)]
    for v, row in zip(grid, rows):
        cells = [f"{v:.17g}"]
        for c in header_cols[1:]:
            cells.append(f"{row[c]['value']:.17g}" if c in row else "")
        lines.append(",".join(cells))
    csv_text = "\n".join(lines) + "\n"

    sidecar = {
        "grid": [float(v) for v in grid],
        "seed": args.seed,
        "family": args.family,
        "rows": rows,
    }
    if args.format == "csv":
        _atomic_write(args.out, csv_text)
    elif args.format == "json":
        _atomic_write(args.out, json.dumps(sidecar, indent=2) + "\n")
    elif args.format == "svg":
        _atomic_write(args.out, _sweep_svg(grid, rows) + "\n")
    if args.format != "json":
        _atomic_write(args.out + ".json", json.dumps(sidecar, indent=2) + "\n")

    bad = [
        (v, c)
        for v, row in zip(grid, rows)
        for c, cell in row.items()
        if cell["status"] not in ("exact", "lower-bound")
    ]
    return 0 if not bad else 2


def cmd_classify(args) -> int:
    verdict = classify_depolarizing(args.v, computational=args.mode == "computational")
    doc = {"v": args.v, "mode": args.mode, "verdicts": verdict.verdicts, "evidence": verdict.evidence}
    for prop in ("EB", "SB", "NLB", "CHSH-NLB"):
        print(f"{prop:9s} {verdict[prop]:11s} {verdict.evidence[prop]}")
    if args.out:
        _atomic_write(args.out, json.dumps(doc, indent=2) + "\n")
    else:
        print(json.dumps(doc))
    return 0


def cmd_simulate(args) -> int:
    cfg = ts.ExperimentConfig(
        v=args.v,
        counts_per_combo=args.counts,
        seed=args.seed,
        trials=args.trials,
        instrument_noise=args.instrument_noise,
    )
    try:
        if args.no_noise:
            counts = cfg.counts_per_combo * ts.ideal_probabilities(cfg.v, cfg.instrument_noise)
            rec = ts.reconstruct(counts)
            rec.error_bars = {k: 0.0 for k in ts.MEASURE_KEYS}
            report = rec.report_json(cfg)
        else:
            report = ts.monte_carlo_errors(cfg).report_json(cfg)
    except (ts.MLEError, MeasureError) as exc:
        print(f"error: simulation failed: {exc}", file=sys.stderr)
        return 2
    if args.out:
        _atomic_write(args.out, report + "\n")
    else:
        print(report)
    if args.emit_counts:
        _atomic_write(args.emit_counts, ts.counts_to_csv(ts.sample_counts(cfg, 0)))
    return 0


def cmd_measure(args) -> int:
    if args.channel_file:
        try:
            with open(args.channel_file) as handle:
                text = handle.read()
        except OSError as exc:
            print(f"error: cannot read channel spec: {exc}", file=sys.stderr)
            return 2
    else:
        text = args.channel
    try:
        channel = ch.channel_from_json(text)
    except ch.ChannelError as exc:
        print(f"error: bad channel spec: {exc}", file=sys.stderr)
        return 2

    try:
        if args.name == "qm":
            res = quantum_memory_robustness(channel)
        elif args.name == "ts":
            pdo = ch.pdo_of_channel(channel)
            res = steering_robustness(co.temporal_assemblage(pdo, ch.pauli_measurements()))
        elif args.name == "mr":
            t0, t1 = ch.chsh_temporal_settings()
            pdo = ch.pdo_of_channel(channel)
            res = non_macrorealism_robustness(co.correlation_from_pdo(pdo, t0, t1))
        elif args.name == "f":
            value = temporal_negativity(ch.pdo_of_channel(channel))
            print(json.dumps({"measure": "f", "value": value, "status": "exact", "gap": 0.0}))
            return 0
        elif args.name == "negativity":
            res = channel_negativity(channel)
        elif args.name == "nsb":
            res = non_sb_robustness(channel, _measurement_family(args.family, args.seed))
        else:
            print(f"error: unknown measure {args.name!r}", file=sys.stderr)
            return 2
    except MeasureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    digest = digest_arrays(channel.choi_matrix)
    doc = res.to_json(args.name, digest)
    if args.out:
        _atomic_write(args.out, doc + "\n")
    else:
        print(doc)
    return 0 if res.status in ("exact", "lower-bound") else 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chanrob",
        description="Quantumness of qubit channels from temporal correlations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="depolarizing sweep over a v grid")
    sweep.add_argument("--grid", default="0:1:21", help="start:stop:points (default 0:1:21)")
    sweep.add_argument("--measures", default="qm,ts,mr,f,negativity")
    sweep.add_argument("--family", default="paulis3", help="paulis3 or random:k")
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--jobs", type=int, default=4)
    sweep.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    sweep.add_argument("--out", required=True)
    sweep.set_defaults(func=cmd_sweep)

    classify = sub.add_parser("classify", help="breaking-property verdicts for depolarizing(v)")
    classify.add_argument("--v", type=float, required=True)
    classify.add_argument("--mode", choices=("thresholds", "computational"), default="thresholds")
    classify.add_argument("--out")
    classify.set_defaults(func=cmd_classify)

    simulate = sub.add_parser("simulate", help="photon-counting tomography simulation")
    simulate.add_argument("--v", type=float, required=True)
    simulate.add_argument("--counts", type=float, default=1e5, help="expected counts per combination")
    simulate.add_argument("--seed", type=int, default=0)
    simulate.add_argument("--trials", type=int, default=100)
    simulate.add_argument("--instrument-noise", type=float, default=1.0)
    simulate.add_argument("--no-noise", action="store_true", help="use exact expected counts")
    simulate.add_argument("--out")
    simulate.add_argument("--emit-counts", help="also write the trial-0 counts CSV here")
    simulate.set_defaults(func=cmd_simulate)

    measure = sub.add_parser("measure", help="evaluate one measure on a channel spec")
    measure.add_argument("name", choices=("qm", "ts", "mr", "f", "negativity", "nsb"))
    group = measure.add_mutually_exclusive_group(required=True)
    group.add_argument("--channel", help="inline channel-spec JSON")
    group.add_argument("--channel-file", help="path to channel-spec JSON")
    measure.add_argument("--family", default="paulis3")
    measure.add_argument("--seed", type=int, default=0)
    measure.add_argument("--out")
    measure.set_defaults(func=cmd_measure)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
