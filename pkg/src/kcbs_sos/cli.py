"""Command-line entry point: ``kcbs-sos <subcommand> ...``.

Every subcommand writes one JSON document to stdout. Exit status is 0 on
success or a passing verdict, 1 on a failing verdict, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import classical, coefficients, operators, realization, selftest, sequential
from . import numerics as nx
from . import seesaw as seesaw_mod
from .errors import KcbsError

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if s.lstrip("-").isdigit():
        s += ".0"
    return s


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, type(None), str)):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in seq):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


@dataclass
class RunConfig:
    subcommand: str
    n: int | None = None
    dim: int | None = None
    seed: int = 0
    shots: int | None = None
    tolerance: float = selftest.DEFAULT_TOL
    input_path: str | None = None
    output_path: str | None = None
    penalized: bool = False
    random_trials: int | None = None
    restarts: int = 20
    max_iters: int = 500
    extra: int = 2
    allow_large: bool = False
    csv_path: str | None = None

    def validate(self) -> "RunConfig":
        if self.n is None:
            raise UsageError("--n is required")
        if self.dim is not None and self.dim < 1:
            raise UsageError("--dim must be positive")
        if self.shots is not None and self.shots < 1:
            raise UsageError("--shots must be >= 1")
        if not self.tolerance > 0:
            raise UsageError("--tol must be positive")
        if self.random_trials is not None and self.input_path is not None:
            raise UsageError("--random and --realization are mutually exclusive")
        if self.random_trials is not None and self.random_trials < 1:
            raise UsageError("--random must be >= 1")
        if self.subcommand in ("simulate", "selftest") and self.input_path is None:
            raise UsageError(f"{self.subcommand} needs --realization")
        if self.subcommand == "seesaw" and (self.dim or 3) < 3:
            raise UsageError("seesaw needs --dim >= 3")
        if self.extra < 0 or self.restarts < 1 or self.max_iters < 1:
            raise UsageError("--extra, --restarts and --max-iters must be non-negative/positive")
        return self


def _load_realization(path: str) -> realization.Realization:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc
    return realization.Realization.from_json(doc).validate()


def _write(path: str, doc) -> None:
    Path(path).write_text(dumps(doc) + "\n")


def _coeffs(cfg: RunConfig):
    return coefficients.derive(cfg.n, allow_large=cfg.allow_large)


def cmd_coeffs(cfg):
    c = _coeffs(cfg)
    doc = c.to_dict()
    kc, kq = coefficients.kcbs_reference(cfg.n)
    doc["kcbs_reference"] = {"classical": kc, "quantum": kq}
    return doc, EXIT_OK


def cmd_canonical(cfg):
    doc = realization.canonical(cfg.n).to_json()
    if cfg.output_path:
        _write(cfg.output_path, doc)
        return {"n": cfg.n, "written": cfg.output_path}, EXIT_OK
    return doc, EXIT_OK


def cmd_verify_sos(cfg):
    c = _coeffs(cfg)
    build = operators.sos_certificate_Btilde if cfg.penalized else operators.sos_certificate_Bn
    if cfg.random_trials is not None:
        dim = cfg.dim or 3
        rng = np.random.default_rng(cfg.seed)
        residual, violation = 0.0, 0.0
        for _ in range(cfg.random_trials):
            F = [nx.random_effect(dim, rng) for _ in range(c.n)]
            psi = nx.random_state(dim, rng)
            cert = build(c, F)
            residual = max(residual, cert.residual)
            violation = max(violation, float(cert.term_norms(psi).max()))
        mode = {"random": cfg.random_trials, "dim": dim, "seed": cfg.seed}
    else:
        r = _load_realization(cfg.input_path) if cfg.input_path else realization.canonical(cfg.n)
        dim = r.dim
        cert = build(c, r.effects)
        residual = cert.residual
        violation = float(cert.term_norms(r.psi).max())
        mode = {"realization": cfg.input_path or "canonical", "dim": dim}
    bound = 1e-9 * dim
    doc = {
        "n": c.n,
        "penalized": cfg.penalized,
        **mode,
        "eta": c.eta_q,
        "residual": residual,
        "residual_bound": bound,
        "max_term_violation": violation,
    }
    return doc, EXIT_OK if residual <= bound else EXIT_FAIL


def cmd_classical_bound(cfg):
    c = _coeffs(cfg)
    brute, assignment = classical.brute_force(classical.modified_expression(c))
    formula = coefficients.eta_classical(c)
    doc = {
        "n": c.n,
        "brute": brute,
        "formula": formula,
        "assignment": list(assignment),
        "k_star": sum(1 for a in assignment if a == -1),
    }
    if cfg.output_path:
        _write(cfg.output_path, realization.deterministic(assignment).to_json())
        doc["written"] = cfg.output_path
    return doc, EXIT_OK if abs(brute - formula) <= 1e-10 else EXIT_FAIL


def cmd_simulate(cfg):
    c = _coeffs(cfg)
    r = _load_realization(cfg.input_path)
    if cfg.shots is None:
        stats = sequential.exact_statistics(r)
    else:
        stats = sequential.sample_statistics(r, cfg.shots, cfg.seed)
    value = sequential.evaluate_expression(stats, c, cfg.penalized)
    op_value = sequential.operator_value(r, c, cfg.penalized)
    if cfg.csv_path:
        Path(cfg.csv_path).write_text(stats.correlators_csv())
    doc = {
        "n": c.n,
        "penalized": cfg.penalized,
        "value": value,
        "operator_value": op_value,
        "gap": value - op_value,
        "eta_q": c.eta_q,
        "eta_c": c.eta_c,
        "statistics": stats.to_json(),
    }
    return doc, EXIT_OK


def cmd_selftest(cfg):
    c = _coeffs(cfg)
    r = _load_realization(cfg.input_path)
    report = selftest.self_test(r, c, cfg.tolerance)
    doc = report.to_json()
    if cfg.output_path:
        _write(cfg.output_path, doc)
    return doc, EXIT_OK if report.passed else EXIT_FAIL


def cmd_seesaw(cfg):
    c = _coeffs(cfg)
    trace = seesaw_mod.seesaw(cfg.n, cfg.dim or 3, cfg.restarts, cfg.max_iters, cfg.seed, coeffs=c)
    doc = trace.to_json()
    doc["eta_q"] = c.eta_q
    doc["gap_to_eta"] = c.eta_q - trace.best_value
    if cfg.output_path:
        _write(cfg.output_path, trace.best_realization.to_json())
        doc["written"] = cfg.output_path
    return doc, EXIT_OK


def cmd_certify(cfg):
    c = _coeffs(cfg)
    r = realization.embed(realization.canonical(cfg.n), cfg.extra, "random", cfg.seed)
    report = selftest.self_test(r, c, cfg.tolerance)
    doc = {
        "n": c.n,
        "extra": cfg.extra,
        "seed": cfg.seed,
        "dim": r.dim,
        "verdict": report.verdict,
        "failure": report.failure,
        "max_deviation": report.max_deviation if report.deviations else None,
        "max_relation_residual": max(report.relation_residuals.values()),
        "invariance_residual": report.invariance_residual,
        "operator_value": sequential.operator_value(r, c, penalized=True),
        "eta_q": c.eta_q,
    }
    return doc, EXIT_OK if report.passed else EXIT_FAIL


COMMANDS = {
    "coeffs": cmd_coeffs,
    "canonical": cmd_canonical,
    "verify-sos": cmd_verify_sos,
    "classical-bound": cmd_classical_bound,
    "simulate": cmd_simulate,
    "selftest": cmd_selftest,
    "seesaw": cmd_seesaw,
    "certify": cmd_certify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kcbs-sos", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--n", type=int, required=True, help="number of measurement settings")
        p.add_argument("--allow-large", action="store_true", help="permit n = 2**m + 1 with m > 5")
        return p

    add("coeffs", "print all derived scalars for n")
    p = add("canonical", "canonical qutrit realization")
    p.add_argument("--out")
    p = add("verify-sos", "check the sum-of-squares identity")
    p.add_argument("--dim", type=int)
    p.add_argument("--random", type=int, dest="random_trials", metavar="T")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--realization")
    p.add_argument("--penalized", action="store_true")
    p = add("classical-bound", "brute-force classical value")
    p.add_argument("--out", help="also write the optimal deterministic realization here")
    p = add("simulate", "sequential-measurement statistics and expression value")
    p.add_argument("--realization", required=True)
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--penalized", action="store_true")
    p.add_argument("--csv", dest="csv_path")
    p = add("selftest", "run the self-testing pipeline on a realization")
    p.add_argument("--realization", required=True)
    p.add_argument("--tol", type=float, default=selftest.DEFAULT_TOL)
    p.add_argument("--report")
    p = add("seesaw", "alternating optimisation lower bound")
    p.add_argument("--dim", type=int, default=3)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p = add("certify", "canonical -> embed -> self-test round trip")
    p.add_argument("--extra", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=selftest.DEFAULT_TOL)
    return parser


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    get = lambda name, default=None: getattr(ns, name, default)  # noqa: E731
    return RunConfig(
        subcommand=ns.subcommand,
        n=ns.n,
        dim=get("dim"),
        seed=get("seed", 0),
        shots=get("shots"),
        tolerance=get("tol", selftest.DEFAULT_TOL),
        input_path=get("realization"),
        output_path=get("out") or get("report"),
        penalized=get("penalized", False),
        random_trials=get("random_trials"),
        restarts=get("restarts", 20),
        max_iters=get("max_iters", 500),
        extra=get("extra", 2),
        allow_large=ns.allow_large,
        csv_path=get("csv_path"),
    )


def dispatch(cfg: RunConfig) -> tuple[dict, int]:
    return COMMANDS[cfg.subcommand](cfg.validate())


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        doc, status = dispatch(config_from_args(ns))
    except (UsageError, KcbsError) as exc:
        print(f"kcbs-sos {ns.subcommand}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(dumps(doc) + "\n")
    return status


if __name__ == "__main__":
    sys.exit(main())
