"""Command line entry point: ``cspace <command> [options]``.

Exit codes: 0 success, 1 validation failure, 2 input error, 3 no witness found.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import channels, correlation, cptp, io, mixing, oracle, resource, theorem
from .linalg import VERIFY_TOL

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_INVALID, EXIT_INPUT, EXIT_NO_WITNESS = 0, 1, 2, 3
ORACLE_TOL = 1e-8


class InputError(ValueError):
    pass


@dataclass
class ScenarioConfig:
    resource: Optional[str] = None
    error: Optional[str] = None
    error_file: Optional[str] = None
    theta: Optional[float] = None
    phi: Optional[float] = None
    r: Optional[int] = None
    p: Optional[int] = None
    q: Optional[int] = None
    grid: Optional[str] = None
    seed: Optional[int] = None
    tol: Optional[float] = None
    out: Optional[str] = None
    n: Optional[int] = None
    scenario: Optional[str] = None
    outcome: Optional[int] = None
    mode: Optional[str] = None
    trials: Optional[int] = None

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        data = io.read_json(path)
        if not isinstance(data, dict):
            raise InputError("scenario file must hold a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise InputError(f"unknown scenario fields: {unknown}")
        return cls(**data)

    def merged(self, other: "ScenarioConfig") -> "ScenarioConfig":
        """Fields set in ``other`` win."""
        values = {f.name: getattr(other, f.name) for f in fields(self) if getattr(other, f.name) is not None}
        return dataclasses.replace(self, **values)

    def with_defaults(self, **defaults) -> "ScenarioConfig":
        values = {k: v for k, v in defaults.items() if getattr(self, k) is None}
        return dataclasses.replace(self, **values)


def parse_angle(text) -> float:
    """Float or a simple multiple of pi such as ``pi/2`` or ``3*pi/2``."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).replace(" ", "").lower()
    if "pi" not in s:
        try:
            return float(s)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid angle {text!r}") from None
    num, _, den = s.partition("/")
    coeff = num.replace("*pi", "").replace("pi", "") or "1"
    if coeff == "-":
        coeff = "-1"
    try:
        value = float(coeff) * np.pi
        return value / float(den) if den else value
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid angle {text!r}") from None


def default_tol() -> float:
    env = os.environ.get("CSPACE_TOL")
    if env is None:
        return VERIFY_TOL
    try:
        tol = float(env)
    except ValueError:
        raise InputError(f"CSPACE_TOL is not a number: {env!r}") from None
    if tol < 0:
        raise InputError("CSPACE_TOL must be non-negative")
    return tol


def load_resource_spec(spec: str, cfg: ScenarioConfig) -> resource.ResourceMPS:
    if spec == "aklt":
        return resource.aklt()
    if spec == "cluster":
        return resource.cluster_1d()
    if spec.startswith("file:"):
        return io.load_resource(spec[5:])
    if spec.startswith("random:"):
        try:
            d, D = (int(x) for x in spec[7:].split(","))
        except ValueError:
            raise InputError("random resource syntax is random:d,D") from None
        return resource.random_resource(d, D, cfg.theta, cfg.phi, cfg.seed or 0)
    raise InputError(f"unknown resource {spec!r}")


def load_error_spec(cfg: ScenarioConfig, d: int) -> channels.KrausChannel:
    spec = cfg.error
    if spec == "file":
        if not cfg.error_file:
            raise InputError("error 'file' needs error_file")
        spec = "file:" + cfg.error_file
    if spec == "f1":
        return channels.f1_error(cfg.theta, cfg.phi, d)
    if spec == "identity":
        return channels.identity_channel(d)
    if spec == "swap12":
        return channels.swap_error(1, 2, d)
    if spec == "phase":
        return channels.phase_error(d, 1)
    if spec == "random":
        return channels.random_cptp(d, 2, cfg.seed or 0)
    if spec.startswith("file:"):
        ch = io.load_channel(spec[5:])
        if ch.dim != d:
            raise InputError(f"channel dimension {ch.dim} does not match resource d={d}")
        return ch
    raise InputError(f"unknown error {spec!r}")


def parse_grid(text: str) -> tuple[tuple[float, ...], tuple[float, ...]]:
    try:
        a, b = text.lower().split("x")
        return theorem.make_grid(int(a), int(b))
    except ValueError:
        raise InputError(f"invalid grid {text!r}; expected e.g. 8x16") from None


def _matrix(m) -> list:
    return io.encode_complex(np.asarray(m))


def cmd_validate(cfg: ScenarioConfig):
    cfg = cfg.with_defaults(resource="aklt", theta=np.pi / 2, phi=np.pi / 2)
    mps = load_resource_spec(cfg.resource, cfg)
    rep = resource.validate(mps, cfg.theta, cfg.phi, cfg.tol)
    if rep.valid:
        summary = f"resource valid at theta={cfg.theta:.6g}, phi={cfg.phi:.6g}: C = {rep.normalization_C:.12g}"
    else:
        summary = f"resource assumption violated by branch(es): {', '.join(rep.failing)}"
    return (EXIT_OK if rep.valid else EXIT_INVALID), rep.to_dict(), summary


def cmd_witness(cfg: ScenarioConfig):
    cfg = cfg.with_defaults(resource="aklt", grid="8x16")
    mps = load_resource_spec(cfg.resource, cfg)
    thetas, phis = parse_grid(cfg.grid)
    w = theorem.find_nontp_witness(mps, thetas, phis)
    if w is None:
        return EXIT_NO_WITNESS, {"witness": None, "d": mps.d, "grid": cfg.grid}, "no non-TP witness found"
    summary = (
        f"non-TP witness: {w.proof_step} {w.params} at theta={w.basis.theta:.6g}, "
        f"phi={w.basis.phi:.6g}, outcome {w.outcome}, violation {w.violation:.6g}"
    )
    return EXIT_OK, {"witness": w.to_dict(), "d": mps.d, "grid": cfg.grid}, summary


def cmd_aklt_mixing(cfg: ScenarioConfig):
    cfg = cfg.with_defaults(error="f1", theta=np.pi / 2, phi=np.pi / 2, r=3, p=1, q=0)
    if cfg.resource not in (None, "aklt"):
        raise InputError("aklt-mixing only supports the aklt resource")
    ch = load_error_spec(cfg, 3)
    sm = mixing.sector_map(ch, cfg.theta, cfg.phi, cfg.r, cfg.p, cfg.q)
    coeff, dev = mixing.counterexample_decomposition(sm, cfg.tol)
    cls = mixing.classify_sector(sm, cfg.tol)
    glob = mixing.global_gram(ch, cfg.theta, cfg.phi, cfg.r)
    proj = "|1><1|" if cfg.r % 2 else "|0><0|"
    report = {
        "sector": {"p": cfg.p, "q": cfg.q},
        "r": cfg.r,
        "theta": cfg.theta,
        "phi": cfg.phi,
        "n_sequences": sm.n_success,
        "failure_term": sm.has_failure_term,
        "gram": _matrix(sm.gram),
        "success_gram": _matrix(sm.success_gram),
        "off_identity": {"coefficient": 2 / 3, "projector": proj},
        "identity_coefficient": coeff,
        "decomposition_deviation": dev,
        "classification": cls.to_dict(),
        "global_tp_deviation": float(np.max(np.abs(glob - np.eye(2)))),
    }
    ident = "n/a" if coeff is None else f"{coeff:.6g}"
    summary = f"sector ({cfg.p},{cfg.q}), r={cfg.r}: gram = {ident} I + (2/3) {proj}; verdict {cls.verdict.value}"
    return EXIT_OK, report, summary


def cmd_classify(cfg: ScenarioConfig):
    cfg = cfg.with_defaults(scenario="mixed", resource="aklt", error="f1", theta=np.pi / 2, phi=np.pi / 2)
    mps = load_resource_spec(cfg.resource, cfg)
    ch = load_error_spec(cfg, mps.d)
    basis = correlation.MeasurementBasis.from_angles(cfg.theta, cfg.phi, mps.d)
    im = correlation.induced_kraus(mps, ch, basis)
    if cfg.scenario == "mixed":
        result = cptp.classify(correlation.mixed_map(im), tol=cfg.tol)
        extra = {"tp_certificate": correlation.tp_certificate(im)}
    elif cfg.scenario == "outcome":
        mode = cfg.mode or "operator"
        cm = correlation.per_outcome_map(im, cfg.outcome or 0, mode)
        target = cm.operator_map() if mode == "operator" else cm
        result = cptp.classify(target, dim=mps.D, tol=cfg.tol)
        extra = {"outcome": cfg.outcome or 0, "mode": mode, "gram": _matrix(cm.gram)}
    else:
        raise InputError(f"unknown scenario {cfg.scenario!r}; use 'mixed' or 'outcome'")
    report = dict(result.to_dict(), scenario=cfg.scenario, **extra)
    return EXIT_OK, report, f"{cfg.scenario} map on {cfg.resource} with error {cfg.error}: {result.verdict.value}"


def cmd_oracle_check(cfg: ScenarioConfig):
    cfg = cfg.with_defaults(n=4, seed=0, trials=5)
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for i in range(cfg.trials):
        sub = int(rng.integers(2**31))
        if cfg.resource is not None:
            c2 = cfg.with_defaults(theta=np.pi / 2, phi=np.pi / 2)
            mps = load_resource_spec(cfg.resource, c2)
        else:
            d = 2 + i % 2
            mps = resource.random_resource(d, 2, float(rng.uniform(0.2, 2.9)), float(rng.uniform(0, 2 * np.pi)), sub)
        ch = channels.random_cptp(mps.d, 1 + i % 3, sub)
        basis = correlation.MeasurementBasis.random(mps.d, sub)
        rec = oracle.reconstruct_induced_map(mps, ch, basis, cfg.n)
        dist = oracle.choi_distance(rec.superop, correlation.mixed_map(correlation.induced_kraus(mps, ch, basis)))
        rows.append({"d": mps.d, "seed": sub, "choi_distance": dist, "condition_number": rec.condition_number})
    worst = max(r["choi_distance"] for r in rows)
    ok = worst <= ORACLE_TOL
    report = {"n": cfg.n, "seed": cfg.seed, "trials": rows, "max_choi_distance": worst, "tolerance": ORACLE_TOL}
    return (EXIT_OK if ok else EXIT_INVALID), report, f"max Choi distance {worst:.3e} ({'ok' if ok else 'FAILED'})"


COMMANDS = {
    "validate": cmd_validate,
    "witness": cmd_witness,
    "aklt-mixing": cmd_aklt_mixing,
    "classify": cmd_classify,
    "oracle-check": cmd_oracle_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--resource", help="aklt, cluster, file:PATH or random:d,D")
    common.add_argument("--theta", type=parse_angle)
    common.add_argument("--phi", type=parse_angle)
    common.add_argument("--tol", type=float, help="verification tolerance (default: $CSPACE_TOL or 1e-9)")
    common.add_argument("--seed", type=int)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--scenario-file", dest="scenario_file", help="JSON file with default parameters")

    parser = argparse.ArgumentParser(prog="cspace", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check the unitary-branch assumption")
    w = sub.add_parser("witness", parents=[common], help="search for a non-TP single-qudit error")
    w.add_argument("--grid", help="NTHETAxNPHI, default 8x16")
    m = sub.add_parser("aklt-mixing", parents=[common], help="byproduct-sector map of the AKLT protocol")
    m.add_argument("--error", help="f1, identity, swap12, phase, random, file:PATH")
    m.add_argument("--r", type=int)
    m.add_argument("--p", type=int, choices=(0, 1))
    m.add_argument("--q", type=int, choices=(0, 1))
    c = sub.add_parser("classify", parents=[common], help="classify a correlation-space map")
    c.add_argument("--scenario", choices=("mixed", "outcome"))
    c.add_argument("--error")
    c.add_argument("--outcome", type=int)
    c.add_argument("--mode", choices=("operator", "state"))
    o = sub.add_parser("oracle-check", parents=[common], help="dense-simulation cross-check")
    o.add_argument("--n", type=int)
    o.add_argument("--trials", type=int)
    return parser


def _config_from_args(args: argparse.Namespace) -> ScenarioConfig:
    names = {f.name for f in fields(ScenarioConfig)}
    cli = ScenarioConfig(**{k: v for k, v in vars(args).items() if k in names})
    base = ScenarioConfig.from_file(args.scenario_file) if args.scenario_file else ScenarioConfig()
    cfg = base.merged(cli)
    for name in ("theta", "phi"):
        if isinstance(getattr(cfg, name), str):
            cfg = dataclasses.replace(cfg, **{name: parse_angle(getattr(cfg, name))})
    if cfg.tol is None:
        cfg = dataclasses.replace(cfg, tol=default_tol())
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        code, payload, summary = COMMANDS[args.command](cfg)
    except (InputError, io.FormatError, argparse.ArgumentTypeError, OSError, ValueError, TypeError) as exc:
        print(f"cspace {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = {"schema_version": SCHEMA_VERSION, "command": args.command, "exit_code": code}
    report.update(io.jsonable(payload))
    text = json.dumps(report, indent=2, sort_keys=True)
    if cfg.out:
        Path(cfg.out).write_text(text + "\n")
        print(summary)
    else:
        print(text)
        print(summary, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
