"""Command-line interface: ``parity-distill {basis,run,sweep,path,verify}``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from . import equivalence as eq
from .detector import DetectorSpec
from .fock import enumerate_basis, occupation_label
from .optics import CANONICAL_NAMES, canonical_state, canonical_states
from .protocol import Mode, ProtocolConfig, Variant, run_exact, run_trajectories, sweep_errors

log = logging.getLogger("parity_distill")


class CommandError(RuntimeError):
    """Runtime failure reported with exit code 1."""


def _timestamp() -> str:
    # SOURCE_DATE_EPOCH pins the timestamp so repeated runs are byte-identical.
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return when.isoformat(timespec="seconds")


def manifest(argv: list[str], config: dict, seed: int | None) -> dict:
    return {
        "command": " ".join(["parity-distill", *argv]),
        "config": config,
        "version": __version__,
        "seed": seed,
        "timestamp": _timestamp(),
    }


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    # 15 significant digits hide last-bit round-off; JSON keeps full precision.
    return f"{float(x):.15g}" if isinstance(x, (float, np.floating)) else str(x)


def _table(headers: list[str], rows: list[list]) -> str:
    cells = [[str(h) for h in headers]] + [[_fmt(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells)


def _manifest_lines(m: dict) -> str:
    return "\n".join(f"# {k}: {json.dumps(v, sort_keys=True)}" for k, v in m.items())


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
        return
    try:
        with open(output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    except OSError as exc:
        raise CommandError(f"cannot write {output}: {exc}") from exc


def _json(m: dict, payload: dict) -> str:
    return json.dumps({"manifest": m, "result": payload}, indent=2, sort_keys=True)


# -- subcommands -------------------------------------------------------------------

def cmd_basis(args, argv) -> int:
    m = manifest(argv, {}, args.seed)
    fock = [{"index": i, "occupation": list(o), "label": occupation_label(o)} for i, o in enumerate(enumerate_basis())]
    canon = [
        {"name": s.name, "set": eq.classify_set(s.vector).value, "amplitude_rank": eq.amplitude_rank(s.vector)}
        for s in canonical_states()
    ]
    if args.format == "json":
        _emit(_json(m, {"fock_basis": fock, "canonical_states": canon}), args.output)
    else:
        text = [_manifest_lines(m), "", _table(["index", "occupation", "label"],
                [[f["index"], "".join(map(str, f["occupation"])), f["label"]] for f in fock]), "",
                _table(["state", "set", "rank"], [[c["name"], c["set"], c["amplitude_rank"]] for c in canon])]
        _emit("\n".join(text), args.output)
    return 0


def cmd_run(args, argv) -> int:
    config = ProtocolConfig(
        variant=args.variant,
        gamma=args.gamma,
        max_iterations=args.iterations,
        mode=args.mode,
        trajectories=args.trajectories,
        seed=args.seed,
        detector=DetectorSpec(args.monitor, args.eps, args.eps_prime),
        workers=args.workers,
    )
    if config.mode is Mode.EXACT:
        result = run_exact(config)
    else:
        result, _ = run_trajectories(config)
    m = manifest(argv, config.to_dict(), config.seed)
    payload = result.to_dict(include_state=args.format == "json")
    if args.format == "json":
        _emit(_json(m, payload), args.output)
        return 0
    rows = [[r.iteration, r.success_prob_this_round, r.cumulative_success] for r in result.per_iteration]
    text = [
        _manifest_lines(m),
        "",
        _table(["iteration", "success_prob_this_round", "cumulative_success"], rows),
        "",
        f"singlet_fidelity: {_fmt(result.singlet_fidelity)}",
        f"concurrence: {_fmt(result.concurrence)}",
    ]
    text += [f"note: {n}" for n in result.notes]
    _emit("\n".join(text), args.output)
    return 0


def cmd_sweep(args, argv) -> int:
    grid = np.linspace(0.0, 1.0, args.resolution)
    rows = sweep_errors(grid, grid, args.monitor)
    m = manifest(argv, {"resolution": args.resolution, "monitor": args.monitor}, args.seed)
    if args.format == "json":
        payload = [{"eps": r.eps, "eps_prime": r.eps_prime, "p_lr": r.p_lr,
                    "concurrence": None if math.isnan(r.concurrence) else r.concurrence} for r in rows]
        _emit(_json(m, {"rows": payload}), args.output)
        return 0
    if args.format == "table":
        text = _manifest_lines(m) + "\n\n" + _table(
            ["eps", "eps_prime", "p_lr", "concurrence"], [[r.eps, r.eps_prime, r.p_lr, r.concurrence] for r in rows])
        _emit(text, args.output)
        return 0
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["eps", "eps_prime", "p_lr", "concurrence"])
    for r in rows:
        writer.writerow([_fmt(r.eps), _fmt(r.eps_prime), _fmt(r.p_lr), _fmt(r.concurrence)])
    _emit(buf.getvalue(), args.output)
    # The CSV body stays a plain table; its manifest goes to a sidecar file (or stderr).
    if args.output is None:
        sys.stderr.write("# manifest: " + json.dumps(m, sort_keys=True) + "\n")
    else:
        _emit(json.dumps(m, indent=2, sort_keys=True), args.output + ".manifest.json")
    return 0


def cmd_path(args, argv) -> int:
    m = manifest(argv, {"source": args.source, "target": args.target, "max_depth": args.max_depth,
                        "allow_detector": args.allow_detector}, args.seed)
    cert = eq.find_path(args.source, args.target, args.max_depth, args.allow_detector)
    src_rank = eq.amplitude_rank(canonical_state(args.source).vector)
    tgt_rank = eq.amplitude_rank(canonical_state(args.target).vector)
    if cert is None:
        if src_rank != tgt_rank:
            reason = (f"amplitude-matrix rank {src_rank} != {tgt_rank}; passive optics preserve the rank, "
                      "so no passive path exists (use --allow-detector)")
        else:
            reason = f"no passive path within depth {args.max_depth}"
        payload = {"found": False, "source": args.source, "target": args.target, "reason": reason}
        lines = [f"NotFound: {args.source} -> {args.target}", f"  {reason}"]
    else:
        payload = {"found": True, **cert.to_dict()}
        lines = cert.lines()
    if args.format == "json":
        _emit(_json(m, payload), args.output)
    else:
        _emit(_manifest_lines(m) + "\n\n" + "\n".join(lines), args.output)
    return 0


def cmd_verify(args, argv) -> int:
    from .verification import run_all

    m = manifest(argv, {}, args.seed)
    results = run_all()
    if args.format == "json":
        payload = [{"number": r.number, "name": r.name, "passed": r.passed, "detail": r.detail} for r in results]
        _emit(_json(m, {"checks": payload, "all_passed": all(r.passed for r in results)}), args.output)
    else:
        _emit(_manifest_lines(m) + "\n\n" + "\n".join(r.line() for r in results), args.output)
    return 0 if all(r.passed for r in results) else 1


# -- parser ------------------------------------------------------------------

def _probability(text: str) -> float:
    value = float(text)
    if not 0.0 <= value <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--output", help="write to this file instead of standard output")
    common.add_argument("--format", choices=["json", "table", "csv"], help="output format")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="parity-distill",
        description="Simulate parity-check distillation of maximally entangled two-photon states.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("basis", parents=[common], help="list the Fock basis and the canonical states")
    p.set_defaults(func=cmd_basis, default_format="table")

    p = sub.add_parser("run", parents=[common], help="run the distillation protocol")
    p.add_argument("--variant", choices=[v.value for v in Variant], default="depolarizing")
    p.add_argument("--iterations", type=_positive, default=1)
    p.add_argument("--mode", choices=[v.value for v in Mode], default="exact")
    p.add_argument("--trajectories", type=_positive, default=10_000)
    p.add_argument("--eps", type=_probability, default=0.0, help="odd reported as even")
    p.add_argument("--eps-prime", type=_probability, default=0.0, help="even reported as odd")
    p.add_argument("--gamma", type=_probability, default=1.0, help="amplitude damping strength")
    p.add_argument("--monitor", choices=["L", "R"], default="L")
    p.add_argument("--workers", type=_positive, default=1, help="processes for trajectory sampling")
    p.set_defaults(func=cmd_run, default_format="table")

    p = sub.add_parser("sweep", parents=[common], help="faulty-detector sweep over (eps, eps')")
    p.add_argument("--resolution", type=int, default=21, help="grid points per axis (>= 2)")
    p.add_argument("--monitor", choices=["L", "R"], default="L")
    p.set_defaults(func=cmd_sweep, default_format="csv")

    p = sub.add_parser("path", parents=[common], help="find a PO (or PO + detector) path between states")
    p.add_argument("source", choices=CANONICAL_NAMES)
    p.add_argument("target", choices=CANONICAL_NAMES)
    p.add_argument("--max-depth", type=_positive, default=eq.DEFAULT_MAX_DEPTH)
    p.add_argument("--allow-detector", action="store_true")
    p.set_defaults(func=cmd_path, default_format="table")

    p = sub.add_parser("verify", parents=[common], help="run the acceptance checks")
    p.set_defaults(func=cmd_verify, default_format="table")
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    if args.format == "csv" and args.command != "sweep":
        parser.error("--format csv is only available for sweep")
    if args.command == "sweep" and args.resolution < 2:
        parser.error("--resolution must be at least 2")
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args, argv)
    except CommandError as exc:
        log.error("%s", exc)
        return 1
    except (ValueError, RuntimeError) as exc:
        log.error("%s", exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
