"""Command-line driver: ``run``, ``sweep`` and ``selftest``.

Exit codes: 0 success, 1 self-test failure, 2 bad configuration,
3 truncation budget exceeded, 4 report invariant violated.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

import jsonschema
import numpy as np

from . import selftest
from .errors import IonModesError, TruncationError
from .evolution import EvolutionConfig
from .hilbert import Dims
from .measurement import sample_outcomes
from .protocols import (
    ProtocolReport,
    ReportInvariantError,
    run_p1_su2_cat,
    run_p2_entangled_number,
    run_p3_entangled_coherent,
    run_p4_fredkin,
)
from .states import DEFAULT_LEAK_TOL

SCHEMA_VERSION = 1

EXIT_OK, EXIT_SELFTEST, EXIT_CONFIG, EXIT_TRUNCATION, EXIT_INVARIANT = 0, 1, 2, 3, 4

PROTOCOLS = ("P1", "P2", "P3", "P4")
_P3_ALIASES = {"P3a": "quarter", "P3b": "half"}

_prob = {"type": "number", "minimum": 0, "maximum": 1}
_fid = {"type": ["number", "null"], "minimum": 0, "maximum": 1}
REPORT_SCHEMA = {
    "type": "object",
    "required": ["schema", "schema_version", "config", "report"],
    "properties": {
        "schema": {"const": "ionmodes.report"},
        "schema_version": {"const": SCHEMA_VERSION},
        "config": {"type": "object"},
        "samples": {"type": "object"},
        "report": {
            "type": "object",
            "required": ["protocol_id", "inputs", "branches", "leakage_log", "convention_note", "checks"],
            "properties": {
                "protocol_id": {"enum": ["P1", "P2", "P3a", "P3b", "P4"]},
                "leakage_log": {"type": "array", "items": {"type": "number", "minimum": 0}},
                "convention_note": {"type": "string"},
                "branches": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["outcome", "probability", "fidelities", "entropy_bits", "distribution", "phases"],
                        "properties": {
                            "outcome": {"enum": ["down", "up"]},
                            "probability": _prob,
                            "fidelities": {"type": "object", "additionalProperties": _fid},
                            "entropy_bits": {"type": ["number", "null"], "minimum": 0},
                            "distribution": {
                                "type": "array",
                                "items": {
                                    "type": "array",
                                    "prefixItems": [{"type": "integer"}, {"type": "integer"}, _prob],
                                    "minItems": 3,
                                    "maxItems": 3,
                                },
                            },
                        },
                    },
                },
                "truth_table": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["input", "output", "phase", "phase_modulus", "fidelity"],
                        "properties": {"fidelity": _prob},
                    },
                },
            },
        },
    },
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    protocol: str = "P2"
    n_max: int | None = None
    n: int = 1
    theta: float = math.pi / 4
    alpha_re: float = 1.0
    alpha_im: float = 0.0
    beta_re: float = 1.0
    beta_im: float = 0.0
    variant: str = "half"
    mode: str = "enumerate"
    seed: int = 0
    shots: int = 1000
    leak_tol: float = DEFAULT_LEAK_TOL
    method: str = "closed_form"
    output_path: str | None = None
    table_path: str | None = None

    def resolved(self) -> "RunConfig":
        """Validate fields and fill the protocol-dependent ``n_max`` default."""
        protocol, variant = self.protocol, self.variant
        if protocol in _P3_ALIASES:
            protocol, variant = "P3", _P3_ALIASES[protocol]
        if protocol not in PROTOCOLS:
            raise ConfigError(f"unknown protocol {self.protocol!r}; expected one of {PROTOCOLS}")
        if variant not in ("quarter", "half"):
            raise ConfigError(f"variant must be 'quarter' or 'half', got {variant!r}")
        if self.mode not in ("enumerate", "sample"):
            raise ConfigError(f"mode must be 'enumerate' or 'sample', got {self.mode!r}")
        if self.mode == "sample" and protocol == "P4":
            raise ConfigError("P4 has no readout to sample")
        if self.method not in ("closed_form", "expm_oracle"):
            raise ConfigError(f"unknown method {self.method!r}")
        if not self.leak_tol > 0:
            raise ConfigError("leak_tol must be positive")
        if self.shots < 1:
            raise ConfigError("shots must be >= 1")
        n_max = self.n_max
        if n_max is None:
            n_max = 30 if protocol == "P3" else 8
        return replace(self, protocol=protocol, variant=variant, n_max=n_max)

    @property
    def alpha(self) -> complex:
        return complex(self.alpha_re, self.alpha_im)

    @property
    def beta(self) -> complex:
        return complex(self.beta_re, self.beta_im)


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _coerce(key: str, raw: str):
    kind = _FIELD_TYPES[key]
    try:
        if kind.startswith("int"):
            return int(raw)
        if kind.startswith("float"):
            return float(eval_angle(raw))
    except ValueError as exc:
        raise ConfigError(f"bad value for {key}: {raw!r}") from exc
    return raw


def eval_angle(raw: str) -> float:
    """Parse a float, also accepting ``pi``, ``pi/4``, ``3*pi/8`` and the like."""
    text = raw.strip().replace(" ", "")
    try:
        return float(text)
    except ValueError:
        pass
    num, _, den = text.partition("/")
    coeff = num.replace("pi", "").rstrip("*") if "pi" in num else None
    if coeff is None:
        raise ValueError(raw)
    value = (float(coeff) if coeff not in ("", "+", "-") else float(coeff + "1")) * math.pi
    return value / float(den) if den else value


def parse_config_text(text: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment; unknown keys are errors."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {line!r}")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FIELD_TYPES:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        values[key] = _coerce(key, raw)
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        try:
            values.update(parse_config_text(Path(args.config).read_text()))
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
    for name in _FIELD_TYPES:
        flag = getattr(args, name, None)
        if flag is not None:
            values[name] = flag
    return RunConfig(**values).resolved()


def execute(cfg: RunConfig, **overrides) -> ProtocolReport:
    dims = Dims(cfg.n_max)
    ecfg = EvolutionConfig(cfg.method, cfg.leak_tol)
    theta = overrides.get("theta")
    if cfg.protocol == "P1":
        return run_p1_su2_cat(cfg.n, cfg.theta if theta is None else theta, dims, ecfg)
    if cfg.protocol == "P2":
        if theta is None:
            return run_p2_entangled_number(cfg.n, dims, ecfg)
        return run_p2_entangled_number(cfg.n, dims, ecfg, theta, theta)
    if cfg.protocol == "P3":
        alpha = overrides.get("alpha", cfg.alpha)
        return run_p3_entangled_coherent(alpha, cfg.beta, cfg.variant, dims, ecfg, theta=theta)
    return run_p4_fredkin(dims, ecfg)


def report_document(cfg: RunConfig, report: ProtocolReport) -> dict:
    doc = {
        "schema": "ionmodes.report",
        "schema_version": SCHEMA_VERSION,
        "config": {k: v for k, v in asdict(cfg).items() if k not in ("output_path", "table_path")},
        "report": report.to_dict(),
    }
    if cfg.mode == "sample":
        outcomes = sample_outcomes(report.final_state, "z", cfg.shots, cfg.seed)
        doc["samples"] = {
            "basis": "z",
            "shots": cfg.shots,
            "seed": cfg.seed,
            "counts": {label: outcomes.count(label) for label in ("down", "up")},
            "sequence": "".join("d" if o == "down" else "u" for o in outcomes),
        }
    return doc


def validate_document(doc: dict) -> None:
    try:
        jsonschema.validate(doc, REPORT_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ReportInvariantError(f"report fails schema: {exc.message}") from exc


def dumps_document(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def distribution_table(report: ProtocolReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["outcome", "m", "n", "probability", "amp_re", "amp_im"])
    for b in report.branches:
        if b.state is None:
            continue
        t = b.state.tensor()
        for m, n in np.ndindex(t.shape):
            a = complex(t[m, n])
            w.writerow([b.outcome, m, n, repr(abs(a) ** 2), repr(a.real), repr(a.imag)])
    return buf.getvalue()


def _emit(text: str, path: str | None):
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_run(cfg: RunConfig) -> int:
    report = execute(cfg)
    report.check_invariants()
    doc = report_document(cfg, report)
    validate_document(doc)
    _emit(dumps_document(doc), cfg.output_path)
    if cfg.table_path:
        Path(cfg.table_path).write_text(distribution_table(report))
    return EXIT_OK


_PRIMARY_FIDELITY = {"P1": "su2_cat_zeta_tan_theta", "P2": "number_cat", "P3": "coherent_cat"}
SWEEP_COLUMNS = ["param", "p_down", "p_up", "fidelity_down", "fidelity_up", "entropy_down", "entropy_up"]


def _cell(x):
    return "" if x is None else repr(float(x))


def sweep_rows(cfg: RunConfig, axis: str, points: int, lo: float, hi: float, jobs: int = 1) -> list[list[str]]:
    if points < 2:
        raise ConfigError("a sweep needs at least 2 points")
    if cfg.protocol == "P4":
        raise ConfigError("P4 has no sweep parameter")
    if axis == "alpha" and cfg.protocol != "P3":
        raise ConfigError("the alpha axis applies to P3 only")
    if axis not in ("theta", "alpha"):
        raise ConfigError(f"unknown sweep axis {axis!r}")
    grid = np.linspace(lo, hi, points)
    phase = cmath.exp(1j * cmath.phase(cfg.alpha)) if cfg.alpha != 0 else 1.0

    def one(x):
        kw = {"theta": float(x)} if axis == "theta" else {"alpha": complex(float(x) * phase)}
        report = execute(cfg, **kw)
        report.check_invariants()
        key = _PRIMARY_FIDELITY[cfg.protocol]
        down, up = report.branch("down"), report.branch("up")
        return [
            repr(float(x)),
            _cell(report.probability("down")),
            _cell(report.probability("up")),
            _cell(down and down.fidelities.get(key)),
            _cell(up and up.fidelities.get(key)),
            _cell(down and down.entropy),
            _cell(up and up.entropy),
        ]

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, grid))
    return [one(x) for x in grid]


def cmd_sweep(cfg: RunConfig, axis: str, points: int, lo=None, hi=None, jobs: int = 1) -> int:
    if lo is None:
        lo = 0.0
    if hi is None:
        hi = math.pi if axis == "theta" else 1.5
    rows = sweep_rows(cfg, axis, points, lo, hi, jobs)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    w.writerows(rows)
    _emit(buf.getvalue(), cfg.output_path)
    return EXIT_OK


def cmd_selftest(n_max_values=selftest.SELFTEST_N_MAX, out=None) -> int:
    out = out or sys.stdout
    start = time.perf_counter()
    results = selftest.run_checks(n_max_values)
    out.write(f"{'check':<20} {'n_max':>5} {'max deviation':>14} {'tolerance':>10}  result\n")
    for r in results:
        out.write(f"{r.suite:<20} {r.n_max:>5} {r.deviation:>14.3e} {r.tolerance:>10.1e}  {'PASS' if r.passed else 'FAIL'}\n")
    out.write(f"elapsed {time.perf_counter() - start:.2f} s\n")
    failed = [r for r in results if not r.passed]
    if failed:
        first = failed[0]
        out.write(f"FAILED: {first.suite} at n_max={first.n_max}\n")
        return EXIT_SELFTEST
    out.write("all checks passed\n")
    return EXIT_OK


def _add_run_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--protocol", choices=[*PROTOCOLS, *_P3_ALIASES])
    p.add_argument("--n-max", dest="n_max", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--theta", type=eval_angle)
    p.add_argument("--alpha-re", dest="alpha_re", type=float)
    p.add_argument("--alpha-im", dest="alpha_im", type=float)
    p.add_argument("--beta-re", dest="beta_re", type=float)
    p.add_argument("--beta-im", dest="beta_im", type=float)
    p.add_argument("--variant", choices=["quarter", "half"])
    p.add_argument("--mode", choices=["enumerate", "sample"])
    p.add_argument("--seed", type=int)
    p.add_argument("--shots", type=int)
    p.add_argument("--leak-tol", dest="leak_tol", type=float)
    p.add_argument("--method", choices=["closed_form", "expm_oracle"])
    p.add_argument("--output", dest="output_path")
    p.add_argument("--table", dest="table_path", help="also write P(m,n) with amplitudes as CSV")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ionmodes", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    _add_run_flags(sub.add_parser("run", help="run one protocol and write a JSON report"))
    sw = sub.add_parser("sweep", help="tabulate a protocol over theta or |alpha|")
    _add_run_flags(sw)
    sw.add_argument("--axis", choices=["theta", "alpha"], default="theta")
    sw.add_argument("--points", type=int, default=9)
    sw.add_argument("--min", dest="lo", type=eval_angle)
    sw.add_argument("--max", dest="hi", type=eval_angle)
    sw.add_argument("--jobs", type=int, default=1)
    st = sub.add_parser("selftest", help="run the numerical self-checks")
    st.add_argument("--n-max", dest="n_max_values", type=int, nargs="+", default=list(selftest.SELFTEST_N_MAX))
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.command == "selftest":
            return cmd_selftest(tuple(args.n_max_values))
        cfg = build_config(args)
        if args.command == "run":
            return cmd_run(cfg)
        return cmd_sweep(cfg, args.axis, args.points, args.lo, args.hi, args.jobs)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TruncationError as exc:
        print(f"truncation error: {exc}", file=sys.stderr)
        return EXIT_TRUNCATION
    except ReportInvariantError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (IonModesError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
