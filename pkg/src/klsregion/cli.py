"""Command-line interface: boundaries, corner points, comparisons, figures.

Commands write CSV or JSON data files, never plots. Every output file is
paired with a run manifest (``<name>.manifest.json`` or ``manifest.json``
for directory exports) recording the command, its parameters, the tool
version and the seed; re-running the recorded command reproduces the
output byte for byte. CSV values use 12 significant digits, '.' decimals
and LF line endings.

Exit codes: 0 success, 2 invalid input, 3 resource guard exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .binary_region import (
    DEFAULT_GRID,
    RateTriple,
    RegionBoundary,
    compare_regions,
    corner_point,
    hsm_chosen_boundary,
    hsm_generated_boundary,
    multi_encoder_corner,
    vsm_boundary,
)
from .generic_region import SearchConfig, scalarized_sweep
from .models import ModelFormatError, SizeGuardError, load_model

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_GUARD = 3

_BOUNDARY_FNS = {
    "hsm-generated": hsm_generated_boundary,
    "hsm-chosen": hsm_chosen_boundary,
    "vsm": vsm_boundary,
}


@dataclass(frozen=True)
class RunManifest:
    """Reproducibility record written alongside every output file."""

    command: str
    parameters: dict
    tool_version: str
    seed: int

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "parameters": self.parameters,
            "tool_version": self.tool_version,
            "seed": self.seed,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _fmt(v: float) -> str:
    if v != v or v in (float("inf"), float("-inf")):
        raise ValueError(f"refusing to emit non-finite value {v!r}")
    return format(float(v), ".12g")


def _write_csv(path: Path, header: list[str], rows: list[list[float]]) -> None:
    params = [r[0] for r in rows]
    if any(b <= a for a, b in zip(params, params[1:])):
        raise ValueError("param column must be strictly increasing")
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_manifest(path: Path, command: str, parameters: dict, seed: int = 0) -> None:
    manifest = RunManifest(
        command=command, parameters=parameters, tool_version=__version__, seed=seed
    )
    with open(path, "w", newline="\n") as fh:
        fh.write(manifest.to_json())


def _thread_cap() -> int | None:
    """Parse KLS_THREADS; None means no cap (all cores).

    All current computations run single-threaded, so any positive cap is
    honored trivially; the value is still validated and recorded.
    """
    raw = os.environ.get("KLS_THREADS")
    if raw is None:
        return None
    try:
        cap = int(raw)
    except ValueError:
        raise ValueError(f"KLS_THREADS={raw!r} is not an integer") from None
    if cap < 1:
        raise ValueError(f"KLS_THREADS={cap} must be >= 1")
    return cap


def _boundary_rows(b: RegionBoundary) -> list[list[float]]:
    return [[a, t.r_s, t.r_l, t.r_m] for a, t in b.points]


def _triple_dict(t: RateTriple) -> dict:
    return {"r_s": t.r_s, "r_l": t.r_l, "r_m": t.r_m}


def _emit_json(payload: dict, output: str | None, command: str, params: dict, seed: int = 0) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if output is None:
        sys.stdout.write(text)
    else:
        path = Path(output)
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
        _write_manifest(path.with_suffix(path.suffix + ".manifest.json"), command, params, seed)


def _binary_params(args, require: tuple[str, ...] = ("p_e", "p_d", "m_d")) -> dict:
    missing = [n for n in require if getattr(args, n) is None]
    if missing:
        flag = missing[0].replace("_", "-")
        raise ValueError(f"--{flag} is required for inline binary models")
    return {n: getattr(args, n) for n in require}


def _cmd_region(args) -> int:
    output = Path(args.output)
    if args.model is not None:
        kind = {"hsm-generated": "generated", "hsm-chosen": "chosen"}.get(args.kind)
        if kind is None:
            raise ValueError("--kind vsm is only defined for inline binary models")
        model = load_model(args.model)
        sweep = scalarized_sweep(model, kind, SearchConfig(seed=args.seed))
        rows = [
            [float(i), triple.r_s, triple.r_l, triple.r_m]
            for i, (_, _, triple) in enumerate(sweep)
        ]
        _write_csv(output, ["param", "r_s", "r_l", "r_m"], rows)
        params = {"model": str(args.model), "kind": args.kind, "output": str(output)}
    else:
        p = _binary_params(args)
        boundary = _BOUNDARY_FNS[args.kind](p["p_e"], p["p_d"], p["m_d"], args.grid)
        _write_csv(output, ["param", "r_s", "r_l", "r_m"], _boundary_rows(boundary))
        params = {**p, "kind": args.kind, "grid": args.grid, "output": str(output)}
    _write_manifest(
        output.with_suffix(output.suffix + ".manifest.json"), "region", params, args.seed
    )
    return EXIT_OK


def _corner_for(kind: str, p_e: float, p_d: float, m_d: int, m_e: int) -> RateTriple:
    if kind == "vsm":
        if m_e != 1:
            raise ValueError("the visible baseline is defined for one encoder measurement")
        return corner_point(vsm_boundary(p_e, p_d, m_d))
    return multi_encoder_corner(
        p_e, m_e, p_d, m_d, kind={"hsm-generated": "generated", "hsm-chosen": "chosen"}[kind]
    )


def _cmd_compare(args) -> int:
    if args.hsm_vsm:
        p = _binary_params(args)
        if args.m_e != 1:
            raise ValueError("--hsm-vsm compares single-encoder-measurement corners")
        a_label, b_label = "hsm", "vsm"
        a_params = {**p, "m_e": 1, "kind": args.kind}
        b_params = {**p, "m_e": 1, "kind": "vsm"}
        a = _corner_for(args.kind, p["p_e"], p["p_d"], p["m_d"], 1)
        b = _corner_for("vsm", p["p_e"], p["p_d"], p["m_d"], 1)
    else:
        required2 = ("p_e2", "p_d2", "m_d2")
        if any(getattr(args, n) is None for n in required2):
            raise ValueError(
                "compare needs either --hsm-vsm or a full second parameter set "
                "(--p-e2, --p-d2, --m-d2)"
            )
        p = _binary_params(args)
        a_label, b_label = "set-1", "set-2"
        a_params = {**p, "m_e": args.m_e, "kind": args.kind}
        b_params = {
            "p_e": args.p_e2,
            "p_d": args.p_d2,
            "m_d": args.m_d2,
            "m_e": args.m_e2,
            "kind": args.kind,
        }
        a = _corner_for(args.kind, p["p_e"], p["p_d"], p["m_d"], args.m_e)
        b = _corner_for(args.kind, args.p_e2, args.p_d2, args.m_d2, args.m_e2)
    report = compare_regions(a, b)
    payload = {
        "a": {"label": a_label, "parameters": a_params, "corner": _triple_dict(a)},
        "b": {"label": b_label, "parameters": b_params, "corner": _triple_dict(b)},
        "delta_pct": report.deltas(),
        "undefined": list(report.undefined),
    }
    _emit_json(payload, args.output, "compare", {**payload["a"]["parameters"], "b": payload["b"]["parameters"]})
    return EXIT_OK


def _cmd_corner(args) -> int:
    p = _binary_params(args)
    triple = _corner_for(args.kind, p["p_e"], p["p_d"], p["m_d"], args.m_e)
    params = {**p, "m_e": args.m_e, "kind": args.kind}
    payload = {"parameters": params, "corner": _triple_dict(triple)}
    _emit_json(payload, args.output, "corner", params)
    return EXIT_OK


# Default parameter families for the figure exports: encoder crossovers,
# decoder measurement counts, and encoder measurement counts.
_FIG_P_E = (0.03, 0.10)
_FIG_M_D = (1, 3)
_FIG_M_E = (1, 2, 3)
_FIG_P_D = 0.10


def _cmd_export_figures(args) -> int:
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    # Boundary sweeps: storage-leakage (fig3) and key-leakage (fig4)
    # projections are column selections of the same triples.
    for fig in ("fig3", "fig4"):
        for model_kind, fn in (("hsm", hsm_generated_boundary), ("vsm", vsm_boundary)):
            for p_e in _FIG_P_E:
                for m_d in _FIG_M_D:
                    b = fn(p_e, _FIG_P_D, m_d, args.grid)
                    name = f"{fig}_{model_kind}_pe{_fmt(p_e)}_md{m_d}.csv"
                    _write_csv(outdir / name, ["param", "r_s", "r_l", "r_m"], _boundary_rows(b))
                    written.append(name)
    # Corner points for multiple encoder measurements (fig5, fig6).
    for fig in ("fig5", "fig6"):
        for p_e in _FIG_P_E:
            for m_d in _FIG_M_D:
                rows = []
                for m_e in _FIG_M_E:
                    t = multi_encoder_corner(p_e, m_e, _FIG_P_D, m_d)
                    rows.append([float(m_e), t.r_s, t.r_l, t.r_m])
                name = f"{fig}_me_pe{_fmt(p_e)}_md{m_d}.csv"
                _write_csv(outdir / name, ["param", "r_s", "r_l", "r_m"], rows)
                written.append(name)
    params = {
        "outdir": str(outdir),
        "grid": args.grid,
        "p_d": _FIG_P_D,
        "p_e": list(_FIG_P_E),
        "m_d": list(_FIG_M_D),
        "m_e": list(_FIG_M_E),
        "files": written,
    }
    _write_manifest(outdir / "manifest.json", "export-figures", params, args.seed)
    return EXIT_OK


def _add_binary_flags(p: argparse.ArgumentParser, with_me: bool = False) -> None:
    p.add_argument("--p-e", dest="p_e", type=float, default=None, help="encoder BSC crossover")
    p.add_argument("--p-d", dest="p_d", type=float, default=None, help="decoder BSC crossover")
    p.add_argument("--m-d", dest="m_d", type=int, default=None, help="decoder measurement count")
    if with_me:
        p.add_argument("--m-e", dest="m_e", type=int, default=1, help="encoder measurement count")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="klsregion",
        description="Key-leakage-storage capacity regions for noisy identifiers",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_region = sub.add_parser("region", help="write a boundary sweep as CSV")
    p_region.add_argument(
        "--kind", required=True, choices=sorted(_BOUNDARY_FNS), help="region variant"
    )
    _add_binary_flags(p_region)
    p_region.add_argument("--model", default=None, help="JSON model file (general alphabets)")
    p_region.add_argument("--grid", type=int, default=DEFAULT_GRID, help="sweep grid size")
    p_region.add_argument("--seed", type=int, default=0, help="search seed for --model runs")
    p_region.add_argument("-o", "--output", default="region.csv", help="output CSV path")
    p_region.set_defaults(fn=_cmd_region)

    p_cmp = sub.add_parser("compare", help="compare two corner points (JSON report)")
    p_cmp.add_argument("--hsm-vsm", action="store_true", help="hidden vs visible baseline")
    _add_binary_flags(p_cmp, with_me=True)
    p_cmp.add_argument("--p-e2", dest="p_e2", type=float, default=None)
    p_cmp.add_argument("--p-d2", dest="p_d2", type=float, default=None)
    p_cmp.add_argument("--m-d2", dest="m_d2", type=int, default=None)
    p_cmp.add_argument("--m-e2", dest="m_e2", type=int, default=1)
    p_cmp.add_argument(
        "--kind", default="hsm-generated", choices=["hsm-generated", "hsm-chosen"]
    )
    p_cmp.add_argument("-o", "--output", default=None, help="JSON path (default stdout)")
    p_cmp.set_defaults(fn=_cmd_compare)

    p_corner = sub.add_parser("corner", help="maximum-key-rate corner point (JSON)")
    _add_binary_flags(p_corner, with_me=True)
    p_corner.add_argument(
        "--kind", default="hsm-generated", choices=["hsm-generated", "hsm-chosen", "vsm"]
    )
    p_corner.add_argument("-o", "--output", default=None, help="JSON path (default stdout)")
    p_corner.set_defaults(fn=_cmd_corner)

    p_fig = sub.add_parser("export-figures", help="write the standard figure datasets")
    p_fig.add_argument("--outdir", default="figures", help="output directory")
    p_fig.add_argument("--grid", type=int, default=DEFAULT_GRID)
    p_fig.add_argument("--seed", type=int, default=0)
    p_fig.set_defaults(fn=_cmd_export_figures)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _thread_cap()
        return args.fn(args)
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (ModelFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc.strerror or exc}: {getattr(exc, 'filename', '')}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
