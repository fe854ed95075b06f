"""Command-line front end: subcommand dispatch, file I/O, run manifests.

Every invocation prints a single JSON object to stdout with two keys:
``result`` (subcommand-specific payload) and ``manifest`` (subcommand,
parameters, seed, tool version, wall time).  Diagnostics go to stderr.
Exit codes: 0 success, 1 invalid input (with the violated invariant named
on stderr), 2 usage error.

State files are JSON documents (see :mod:`sympcoh.gaussian_core`) or bare
CSV matrices; ``-`` reads a document from stdin and accepts either a bare
document or a previous invocation's envelope, so subcommands pipe:
``sympcoh msc --E 6 --m 1 | sympcoh coherence -``.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import asdict
from importlib import metadata

import numpy as np

from . import applications, coherence, discord_map, ensembles, gaussian_core
from . import symplectic_ops as ops

DEFAULT_SEED = 0x5EED


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:  # pragma: no cover - editable corner
        return "0.0.0"


def _read_state(path: str, m: int | None = None) -> gaussian_core.GaussianState:
    """Read a state from a file path or stdin (``-``), unwrapping envelopes."""
    if path == "-":
        doc = json.loads(sys.stdin.read())
        if isinstance(doc, dict) and "result" in doc and isinstance(doc["result"], dict):
            if "format" in doc["result"]:
                doc = doc["result"]
        state = gaussian_core.state_from_dict(doc)
        if m is not None and state.m != int(m):
            raise gaussian_core.DimensionError(
                f"expected m={m}, stdin document has m={state.m}"
            )
        return state
    return gaussian_core.load_state(path, m)


def _read_valid_state(path: str, m: int | None = None) -> gaussian_core.GaussianState:
    state = _read_state(path, m)
    gaussian_core.require_valid(state.cov)
    return state


def _load_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# Gate and channel specs
# ---------------------------------------------------------------------------


def build_gate(spec: dict, m: int) -> ops.SympGate:
    """Build a gate from a JSON spec ``{"kind": ..., "params": {...}}``.

    Kinds: ``squeezer`` (mode, r), ``phase_shifter`` (mode, theta),
    ``block_orthogonal`` (o), ``passive`` (x, y), ``displacement`` (d),
    ``beamsplitter`` (eta; two modes), ``matrix`` (S, optional disp).
    """
    kind = spec.get("kind")
    params = spec.get("params", {})
    if kind == "squeezer":
        return ops.squeezer(m, int(params["mode"]), float(params["r"]))
    if kind == "phase_shifter":
        return ops.phase_shifter(m, int(params["mode"]), float(params["theta"]))
    if kind == "block_orthogonal":
        return ops.block_orthogonal(np.asarray(params["o"], dtype=float))
    if kind == "passive":
        return ops.passive_from_unitary(
            np.asarray(params["x"], dtype=float), np.asarray(params["y"], dtype=float)
        )
    if kind == "displacement":
        return ops.displacement(m, params["d"])
    if kind == "beamsplitter":
        return ops.block_orthogonal(ops.beamsplitter_orthogonal(float(params["eta"])))
    if kind == "matrix":
        return ops.SympGate(m, np.asarray(params["S"], dtype=float), params.get("disp"))
    raise ValueError(f"unknown gate kind {kind!r}")


def build_channel(spec: dict):
    """Build a channel from ``{"kind": "loss"|"identity"|"stinespring", ...}``."""
    kind = spec.get("kind")
    if kind == "loss":
        return ops.LossChannel(float(spec["eta"]))
    if kind == "identity":
        return ops.IdentityChannel()
    if kind == "stinespring":
        env_spec = spec["env"]
        if isinstance(env_spec, str):
            env = _read_state(env_spec).cov
        else:
            env = gaussian_core.state_from_dict(env_spec).cov
        return ops.StinespringChannel(
            o=np.asarray(spec["o"], dtype=float),
            env=env,
            d=spec.get("d"),
        )
    raise ValueError(f"unknown channel kind {kind!r}")


# ---------------------------------------------------------------------------
# Subcommand handlers: each returns (result, exit_code)
# ---------------------------------------------------------------------------


def _cmd_validate(args) -> tuple[dict, int]:
    state = _read_state(args.cm, args.m)
    report = gaussian_core.validate(state.cov)
    result = {
        "valid": not report,
        "violations": [{"name": v.name, "magnitude": v.magnitude} for v in report],
    }
    for v in report:
        print(f"violated invariant: {v.name} (magnitude {v.magnitude:.3e})", file=sys.stderr)
    return result, 0 if not report else 1


def _cmd_coherence(args) -> tuple[dict, int]:
    state = _read_valid_state(args.cm, args.m)
    report = coherence.coherence_report(state.cov)
    return {
        "c": report.coherence,
        "hs_distance_sq_to_free": report.hs_distance_sq_to_free,
        "is_free": coherence.is_free(state.cov),
        "closest_free": report.closest_free.matrix.tolist(),
        "m": state.m,
        "trace": state.cov.trace,
    }, 0


def _cmd_maxsc(args) -> tuple[dict, int]:
    return {"E": args.E, "m": args.m, "c_max": coherence.max_symplectic_coherence(args.E, args.m)}, 0


def _cmd_msc(args) -> tuple[dict, int]:
    state = coherence.msc_canonical(args.E, args.m)
    doc = gaussian_core.state_to_dict(state)
    if args.out:
        gaussian_core.save_state(state, args.out)
        print(f"wrote {args.out}", file=sys.stderr)
    return doc, 0


def _cmd_apply(args) -> tuple[dict, int]:
    state = _read_valid_state(args.cm, args.m)
    gate = build_gate(_load_json(args.gate), state.m)
    out = ops.apply(gate, state)
    return gaussian_core.state_to_dict(out), 0


def _cmd_loss(args) -> tuple[dict, int]:
    state = _read_valid_state(args.cm, args.m)
    out = ops.apply_loss_state(state, args.eta)
    return gaussian_core.state_to_dict(out), 0


def _cmd_discord(args) -> tuple[dict, int]:
    state = _read_valid_state(args.cm, args.m)
    rel = discord_map.coherence_discord_relation_check(state.cov)
    image = discord_map.to_density(state.cov)
    return {
        "c": rel.coherence,
        "D_G": rel.discord,
        "relation_residual": rel.residual,
        "classical_quantum": discord_map.is_classical_quantum(image),
    }, 0


def _cmd_ensemble(args) -> tuple[dict, int]:
    config = ensembles.EnsembleConfig(
        m=args.m, E=args.E, n_samples=args.samples, seed=args.seed, kind=args.kind
    )
    if args.csv:
        stats, nu_sq, coh = ensembles.ensemble_nu_sq(config, return_samples=True)
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["index", "nu_sq", "coherence"])
            for i, (n_val, c_val) in enumerate(zip(nu_sq, coh)):
                writer.writerow([i, repr(float(n_val)), repr(float(c_val))])
        print(f"wrote {args.csv}", file=sys.stderr)
    else:
        stats = ensembles.ensemble_nu_sq(config)
    return asdict(stats), 0


def _cmd_discriminate(args) -> tuple[dict, int]:
    cfg = _load_json(args.config)
    if "probe_file" in cfg:
        probe = _read_state(cfg["probe_file"])
    else:
        probe = gaussian_core.state_from_dict(cfg["probe"])
    gaussian_core.require_valid(probe.cov)
    channels = tuple(build_channel(spec) for spec in cfg["channels"])
    config = applications.DiscriminationConfig(
        probe=probe,
        channels=channels,
        delta=float(cfg["delta"]),
        n_samples=int(cfg["n_samples"]),
        trials=int(cfg["trials"]),
        seed=int(cfg.get("seed", DEFAULT_SEED)),
    )
    report = applications.run_discrimination(config)
    return asdict(report), 0


def _cmd_qfi(args) -> tuple[dict, int]:
    state = _read_valid_state(args.cm, args.m)
    bound = applications.qfi_displacement(state.cov)
    return {"qfi": bound.value, "exact": bound.exact}, 0


def _cmd_tvd(args) -> tuple[dict, int]:
    cfg = _load_json(args.config)
    result: dict = {}
    if "var1" in cfg or "var2" in cfg:
        result["tvd_exact"] = applications.tvd_exact_zero_mean_normals(
            float(cfg["var1"]), float(cfg["var2"])
        )
    if "sxp1" in cfg or "sxp2" in cfg:
        cm_spec = cfg["cm"]
        if isinstance(cm_spec, str):
            state = _read_valid_state(cm_spec)
        else:
            state = gaussian_core.state_from_dict(cm_spec)
        inflated = bool(cfg.get("inflated", False))
        result["bound"] = applications.tvd_bound_ppmm(
            state.cov,
            float(cfg["sxp1"]),
            float(cfg["sxp2"]),
            float(cfg["theta"]),
            inflated=inflated,
        )
        result["inflated"] = inflated
    if not result:
        raise ValueError(
            "tvd config must contain var1/var2 (exact) and/or cm/sxp1/sxp2/theta (bound)"
        )
    return result, 0


def _cmd_maxsearch(args) -> tuple[dict, int]:
    outcome = coherence.numeric_max_search(args.E, args.m, args.trials, args.seed)
    c_max = coherence.max_symplectic_coherence(args.E, args.m)
    return {
        "sup_c": outcome.sup_c,
        "c_max": c_max,
        "within_bound": outcome.sup_c <= c_max + 1e-6,
        "argmax": outcome.argmax,
    }, 0


# ---------------------------------------------------------------------------
# Parser and entry point
# ---------------------------------------------------------------------------


def _add_cm_arg(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("cm", help="state file (JSON document or CSV matrix), or - for stdin")
    sub.add_argument("--m", type=int, default=None, help="expected mode count (cross-checked)")


def _add_threads(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--threads",
        type=int,
        default=1,
        help="worker bound for Monte-Carlo loops; per-index RNG streams make "
        "the output independent of this value",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sympcoh",
        description="Position-momentum correlations of Gaussian states: "
        "measure, extremal states, discord image, metrology and "
        "channel-discrimination bounds.",
    )
    parser.add_argument("--version", action="version", version=_version())
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("validate", help="check covariance-matrix invariants")
    _add_cm_arg(p)
    p.set_defaults(func=_cmd_validate)

    p = subs.add_parser("coherence", help="coherence and distance-to-free report")
    _add_cm_arg(p)
    p.set_defaults(func=_cmd_coherence)

    p = subs.add_parser("maxsc", help="closed-form maximal coherence at fixed trace")
    p.add_argument("--E", type=float, required=True, help="covariance trace budget")
    p.add_argument("--m", type=int, required=True, help="mode count")
    p.set_defaults(func=_cmd_maxsc)

    p = subs.add_parser("msc", help="canonical maximal-coherence state")
    p.add_argument("--E", type=float, required=True, help="covariance trace budget")
    p.add_argument("--m", type=int, required=True, help="mode count")
    p.add_argument("-o", "--out", default=None, help="write the state file here")
    p.set_defaults(func=_cmd_msc)

    p = subs.add_parser("apply", help="apply a symplectic gate from a JSON spec")
    _add_cm_arg(p)
    p.add_argument("--gate", required=True, help="gate spec JSON file")
    p.set_defaults(func=_cmd_apply)

    p = subs.add_parser("loss", help="send the state through a pure-loss channel")
    _add_cm_arg(p)
    p.add_argument("--eta", type=float, required=True, help="transmissivity in [0, 1]")
    p.set_defaults(func=_cmd_loss)

    p = subs.add_parser("discord", help="virtual-state geometric discord report")
    _add_cm_arg(p)
    p.set_defaults(func=_cmd_discord)

    p = subs.add_parser("ensemble", help="fixed-trace pure-state ensemble statistics")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--E", type=float, required=True)
    p.add_argument("--kind", choices=ensembles.KINDS, required=True)
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--csv", default=None, help="write per-sample (nu_sq, coherence) rows")
    _add_threads(p)
    p.set_defaults(func=_cmd_ensemble)

    p = subs.add_parser("discriminate", help="simulate the two-channel protocol")
    p.add_argument("--config", required=True, help="config JSON file")
    _add_threads(p)
    p.set_defaults(func=_cmd_discriminate)

    p = subs.add_parser("qfi", help="displacement-sensing Fisher information (m=1)")
    _add_cm_arg(p)
    p.set_defaults(func=_cmd_qfi)

    p = subs.add_parser("tvd", help="total-variation distance helpers")
    p.add_argument("--config", required=True, help="config JSON file")
    p.set_defaults(func=_cmd_tvd)

    p = subs.add_parser("maxsearch", help="randomized search for the coherence maximum")
    p.add_argument("--E", type=float, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    _add_threads(p)
    p.set_defaults(func=_cmd_maxsearch)

    return parser


def _manifest(args: argparse.Namespace, wall_time: float) -> dict:
    params = {
        k: v
        for k, v in vars(args).items()
        if k not in ("func", "subcommand", "threads") and not callable(v)
    }
    return {
        "subcommand": args.subcommand,
        "parameters": params,
        "seed": getattr(args, "seed", None),
        "version": _version(),
        "wall_time_s": round(wall_time, 6),
    }


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "threads", 1) < 1:
        print("--threads must be >= 1", file=sys.stderr)
        return 2
    start = time.perf_counter()
    try:
        result, code = args.func(args)
    except gaussian_core.ValidationError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"malformed JSON: {exc}", file=sys.stderr)
        return 1
    except (
        gaussian_core.DimensionError,
        gaussian_core.NumericError,
        ops.GateError,
        ValueError,
        KeyError,
        OSError,
    ) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    envelope = {"result": result, "manifest": _manifest(args, time.perf_counter() - start)}
    print(json.dumps(envelope, sort_keys=True))
    return code


if __name__ == "__main__":
    sys.exit(main())
