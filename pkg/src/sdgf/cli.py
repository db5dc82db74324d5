"""Command-line front end.

Subcommands: ``zauner``, ``frame spark``, ``cs-run``, ``denoise-run``, ``signal``.
Sweeps are configured with a flat ``key = value`` file (``#`` starts a
comment); every run writes ``manifest.txt`` in the same format, so a run can
be repeated with ``--config <out>/manifest.txt``.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .errors import ParseError, SchemaError, SDGFError
from .experiments import ExperimentSpec, emit_results, format_grid, run_sweep
from .frames import build_frame_matrix, find_dependent_subset, spark_exhaustive, witness_csv
from .gabor import CLASSICAL_KINDS, make_lattice, make_window
from .signals import load_wav_segment, make_signal, signal_to_csv
from .solvers import SolverConfig
from .zauner import EXPONENT_CONVENTION, star_window, symmetry_orbits

log = logging.getLogger("sdgf")


def _choice(*options):
    def conv(text: str) -> str:
        if text not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return text

    return conv


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(t.strip() for t in text.split(",") if t.strip())


def _num_list(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in _str_list(text))


def _optional_str(text: str) -> str | None:
    return text or None


# key -> (converter, default); None default means required
SCHEMA: dict[str, tuple] = {
    "mode": (_choice("cs", "denoise"), None),
    "signal": (_choice("two_chirp", "bumps", "cusp", "wav", "sparse_complex"), None),
    "L": (int, None),
    "a": (int, None),
    "b": (int, None),
    "windows": (_str_list, ("star",) + CLASSICAL_KINDS),
    "grid": (_num_list, ()),
    "trials": (int, 20),
    "base_seed": (int, 0),
    "sigma": (float, 0.001),
    "theta": (float, 0.0),
    "eigenvalue_index": (int, 0),
    "audio": (_optional_str, None),
    "offset": (int, 0),
    "sparsity": (int, 0),
    "max_iters": (int, 5000),
    "rel_tol": (float, 1e-6),
    "step_ratio": (float, 1.0),
    "over_relaxation": (float, 1.0),
    "solver_seed": (int, 0),
}
REQUIRED = ("mode", "signal", "L", "a", "b")
OPTIONAL_NONE = ("audio",)


@dataclass(frozen=True)
class RunConfig:
    values: dict

    def __getitem__(self, key):
        return self.values[key]

    def to_spec(self, workers: int | None = None) -> ExperimentSpec:
        v = self.values
        grid = v["grid"]
        if v["mode"] == "cs":
            grid = tuple(int(round(k)) for k in grid)
        solver = SolverConfig(
            max_iters=v["max_iters"],
            rel_tol=v["rel_tol"],
            step_ratio=v["step_ratio"],
            over_relaxation=v["over_relaxation"],
            seed=v["solver_seed"],
        )
        return ExperimentSpec(
            mode=v["mode"],
            signal=v["signal"],
            L=v["L"],
            a=v["a"],
            b=v["b"],
            windows=tuple(v["windows"]),
            grid=grid,
            trials=v["trials"],
            base_seed=v["base_seed"],
            solver=solver,
            sigma=v["sigma"],
            theta=v["theta"],
            eigenvalue_index=v["eigenvalue_index"],
            audio=v["audio"],
            offset=v["offset"],
            sparsity=v["sparsity"],
            workers=workers,
        )


def parse_config(text: str, overrides: list[str] | None = None) -> RunConfig:
    """Parse and validate a flat ``key = value`` document."""
    raw: dict[str, tuple[str, int]] = {}
    lines = text.splitlines()
    for lineno, line in enumerate(lines, 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ParseError(f"line {lineno}: expected 'key = value', got {line.strip()!r}")
        key, value = (s.strip() for s in body.split("=", 1))
        if not key:
            raise ParseError(f"line {lineno}: empty key")
        if key in raw:
            raise ParseError(f"line {lineno}: duplicate key {key!r} (first on line {raw[key][1]})")
        raw[key] = (value, lineno)
    for item in overrides or []:
        if "=" not in item:
            raise ParseError(f"override {item!r}: expected key=value")
        key, value = (s.strip() for s in item.split("=", 1))
        raw[key] = (value, 0)

    values = {}
    for key, (value, lineno) in raw.items():
        if key not in SCHEMA:
            raise SchemaError(f"unknown key {key!r}" + (f" on line {lineno}" if lineno else ""))
        conv = SCHEMA[key][0]
        try:
            values[key] = conv(value)
        except ValueError as exc:
            raise SchemaError(f"invalid value for {key!r}: {value!r} ({exc})") from None
    for key in REQUIRED:
        if key not in values:
            raise SchemaError(f"missing required key {key!r}")
    for key, (_, default) in SCHEMA.items():
        values.setdefault(key, default)
    if values["signal"] == "wav" and not values["audio"]:
        raise SchemaError("signal = wav requires key 'audio'")
    if values["eigenvalue_index"] not in (0, 1, 2):
        raise SchemaError("eigenvalue_index must be 0, 1 or 2")
    return RunConfig(values)


def _fmt_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, tuple):
        return ",".join(format_grid(v) if not isinstance(v, str) else v for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def manifest_text(cfg: RunConfig, spec: ExperimentSpec) -> str:
    values = dict(cfg.values)
    values["grid"] = spec.grid
    lines = [
        f"# sdgf {__version__}",
        f"# exponent convention: {EXPONENT_CONVENTION}",
    ]
    for key in SCHEMA:
        lines.append(f"{key} = {_fmt_value(values[key])}")
    return "\n".join(lines) + "\n"


def _cmd_zauner(args) -> int:
    sw = star_window(args.L, args.theta, args.index, args.seed)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    lines = ["l,re,im"] + [f"{l},{v.real!r},{v.imag!r}" for l, v in enumerate(sw.values)]
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    side = out.with_name(out.name + ".txt")
    side.write_text(
        "\n".join(
            [
                f"L = {args.L}",
                f"theta = {args.theta!r}",
                f"eigenvalue_index = {args.index}",
                f"eigenvalue = {sw.eigenvalue.real!r}{sw.eigenvalue.imag:+.17g}j",
                f"residual = {sw.residual!r}",
                f"phi = {sw.phi!r}",
                f"method = {sw.method}",
                f"exponent_convention = {EXPONENT_CONVENTION}",
            ]
        )
        + "\n",
        encoding="utf-8",
    )
    print(f"star window L={args.L}: residual {sw.residual:.3e}, written to {out}")
    return 0


def _cmd_frame_spark(args) -> int:
    lat = make_lattice(args.L, args.a, args.b)
    if args.window == "star":
        g = star_window(args.L, args.theta, args.index).as_window()
    else:
        g = make_window(args.window, args.L)
    f = build_frame_matrix(g, lat)
    if args.exhaustive:
        report = spark_exhaustive(f, args.tol, args.max_subsets)
    else:
        groups = symmetry_orbits(lat) if args.orbits else None
        report = find_dependent_subset(f, args.size or args.L, args.trials, args.tol, args.seed, groups=groups)
    text = report.describe()
    print(text)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "spark.txt").write_text(text + "\n", encoding="utf-8")
        if report.witness is not None:
            (out / "witness.csv").write_text(witness_csv(report.witness, lat), encoding="utf-8")
    return 0


def _cmd_sweep(args, mode: str) -> int:
    text = Path(args.config).read_text(encoding="utf-8") if args.config else ""
    cfg = parse_config(text, args.set)
    if cfg["mode"] != mode:
        raise SchemaError(f"config mode is {cfg['mode']!r} but subcommand runs {mode!r}")
    spec = cfg.to_spec(workers=args.workers)
    for key in SCHEMA:
        log.info("config %s = %s", key, _fmt_value(spec.grid if key == "grid" else cfg[key]))
    result = run_sweep(spec)
    out = Path(args.out)
    emit_results(result, out, mode)
    (out / "manifest.txt").write_text(manifest_text(cfg, spec), encoding="utf-8")
    failed = sum(1 for r in result.rows if r.error)
    print(f"{mode}: {len(result.rows)} rows written to {out} ({failed} failed)")
    return 0


def _cmd_signal(args) -> int:
    if args.kind == "wav":
        rec = load_wav_segment(args.audio, args.offset, args.L)
    else:
        rec = make_signal(args.kind, args.L)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(signal_to_csv(rec.samples), encoding="utf-8")
    print(f"{rec.label}: {rec.L} samples written to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sdgf", description="Spark-deficient Gabor frames and star-DGT experiments")
    p.add_argument("--version", action="version", version=f"sdgf {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    z = sub.add_parser("zauner", help="compute a star window (Zauner eigenvector)")
    z.add_argument("--L", type=int, required=True)
    z.add_argument("--theta", type=float, default=0.0)
    z.add_argument("--index", type=int, choices=(0, 1, 2), default=0)
    z.add_argument("--seed", type=int, default=0)
    z.add_argument("--out", required=True, help="CSV path; a .txt sidecar is written next to it")
    z.set_defaults(func=_cmd_zauner)

    fr = sub.add_parser("frame", help="frame diagnostics")
    fsub = fr.add_subparsers(dest="frame_command", required=True)
    sp = fsub.add_parser("spark", help="exact or randomized spark search")
    sp.add_argument("--window", choices=("star",) + CLASSICAL_KINDS, required=True)
    sp.add_argument("--L", type=int, required=True)
    sp.add_argument("--a", type=int, required=True)
    sp.add_argument("--b", type=int, required=True)
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--randomized", action="store_true", help="default")
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--size", type=int, default=0, help="subset size (default L)")
    sp.add_argument("--orbits", action="store_true", help="sample unions of Zauner symmetry orbits")
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--max-subsets", type=int, default=10**6)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--theta", type=float, default=0.0)
    sp.add_argument("--index", type=int, choices=(0, 1, 2), default=0)
    sp.add_argument("--out", help="directory for spark.txt and witness.csv")
    sp.set_defaults(func=_cmd_frame_spark)

    for name, m in (("cs-run", "cs"), ("denoise-run", "denoise")):
        r = sub.add_parser(name, help=f"run a {m} sweep")
        r.add_argument("--config", help="flat key = value config file")
        r.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key")
        r.add_argument("--out", required=True)
        r.add_argument("--workers", type=int, default=None, help="worker processes (default SDGF_THREADS or CPU count)")
        r.set_defaults(func=lambda args, m=m: _cmd_sweep(args, m))

    s = sub.add_parser("signal", help="dump a test signal as CSV")
    s.add_argument("--kind", choices=("two_chirp", "bumps", "cusp", "wav"), required=True)
    s.add_argument("--L", type=int, required=True)
    s.add_argument("--audio")
    s.add_argument("--offset", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_signal)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (SDGFError, ValueError, OSError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"error: {msg}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
