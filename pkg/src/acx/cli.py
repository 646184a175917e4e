"""Manifest parsing, command dispatch and report serialization.

The manifest is JSON with every number carried as an exact string: rationals
as "p/q" and Gaussian rationals as "p/q+r/s*i".  Reports render all values
exactly (never decimal-approximated) and machine-readable output is
byte-deterministic apart from the top-level timing field.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources

from . import __version__
from .audits import (
    AuditItem,
    NotDdcClosed as NotDdcClosedError,
    audit_4mfld_lemmas,
    audit_ddbar_images,
    audit_ddc_descent,
    audit_dualities,
    audit_generalized_ddbar,
    audit_identities,
    audit_maximal_nijenhuis,
    audit_taming,
)
from .cohomology import CohomologyEngine, compute_diamond
from .forms import CoefficientModel, Form, InconsistentModel
from .lie import (
    AlmostComplexStructure,
    DegenerateJ,
    LieAlgebraSpec,
    build_frame,
    nijenhuis_rank,
    validate_model,
)
from .linalg import NotContained
from .metric import HermitianMetric, HermitianStructure, Not4Manifold, NotPositive
from .operators import FormComplex
from .scalars import Scalar, format_scalar, parse_rational, parse_scalar

KNOWN_TASKS = ("validate", "diamond", "verify", "taming", "report")


class ParseError(Exception):
    """Structured manifest parse failure with field provenance."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class ValidationError(Exception):
    """A manifest violates a named structural invariant."""

    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


@dataclass
class ManifoldSpec:
    name: str
    real_dim: int
    algebra: LieAlgebraSpec
    structure: AlmostComplexStructure
    metric: HermitianMetric
    coefficients: CoefficientModel
    tasks: tuple[str, ...]

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "real_dim": self.real_dim,
            "brackets": [
                [i, j, k, str(v)] for (i, j, k, v) in self.algebra.brackets
            ],
            "J": [[str(x) for x in row] for row in self.structure.matrix],
            "metric": [[format_scalar(x) for x in row] for row in self.metric.entries],
            "coefficients": self._coefficients_dict(),
            "tasks": list(self.tasks),
        }

    def _coefficients_dict(self) -> dict:
        c = self.coefficients
        if c.kind == "invariant":
            return {"type": "invariant"}
        return {
            "type": "torus_fourier",
            "rank": c.rank,
            "actions": [[format_scalar(x) for x in row] for row in c.actions],
            "truncation": c.truncation,
        }


def parse_manifest(path: str) -> ManifoldSpec:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ParseError(path, "file not found") from None
    except json.JSONDecodeError as exc:
        raise ParseError(path, f"invalid JSON: {exc}") from None
    return manifest_from_dict(raw)


def manifest_from_dict(raw: dict) -> ManifoldSpec:
    if not isinstance(raw, dict):
        raise ParseError("$", "manifest must be a JSON object")
    name = raw.get("name")
    if not isinstance(name, str) or not name:
        raise ParseError("name", "a nonempty string is required")
    real_dim = raw.get("real_dim")
    if not isinstance(real_dim, int) or real_dim <= 0:
        raise ParseError("real_dim", "a positive integer is required")
    if real_dim % 2 != 0:
        raise ValidationError("AlmostComplexStructure", "real_dim must be even over Q(i)")
    n = real_dim // 2

    entries = []
    brackets = raw.get("brackets", [])
    if not isinstance(brackets, list):
        raise ParseError("brackets", "a list of [i, j, k, value] rows is required")
    for idx, row in enumerate(brackets):
        if not (isinstance(row, list) and len(row) == 4):
            raise ParseError(f"brackets[{idx}]", "expected [i, j, k, value]")
        i, j, k, value = row
        if not all(isinstance(x, int) for x in (i, j, k)):
            raise ParseError(f"brackets[{idx}]", "indices must be integers")
        try:
            v = parse_rational(str(value))
        except ValueError as exc:
            raise ParseError(f"brackets[{idx}]", str(exc)) from None
        entries.append((i, j, k, v))
    try:
        algebra = LieAlgebraSpec.from_entries(real_dim, entries)
    except ValueError as exc:
        raise ValidationError("LieAlgebraSpec", str(exc)) from None

    j_rows = raw.get("J")
    if not (isinstance(j_rows, list) and len(j_rows) == real_dim):
        raise ParseError("J", f"a {real_dim}x{real_dim} matrix is required")
    matrix = []
    for r, row in enumerate(j_rows):
        if not (isinstance(row, list) and len(row) == real_dim):
            raise ParseError(f"J[{r}]", f"expected {real_dim} entries")
        try:
            matrix.append(tuple(parse_rational(str(x)) for x in row))
        except ValueError as exc:
            raise ParseError(f"J[{r}]", str(exc)) from None
    structure = AlmostComplexStructure(tuple(matrix))
    if not structure.squares_to_minus_one():
        raise ValidationError("AlmostComplexStructure", "J^2 != -1")

    metric_rows = raw.get("metric")
    if metric_rows is None:
        metric = HermitianMetric.identity(n)
    else:
        if not (isinstance(metric_rows, list) and len(metric_rows) == n):
            raise ParseError("metric", f"a {n}x{n} matrix is required")
        rows = []
        for r, row in enumerate(metric_rows):
            if not (isinstance(row, list) and len(row) == n):
                raise ParseError(f"metric[{r}]", f"expected {n} entries")
            try:
                rows.append(tuple(parse_scalar(str(x)) for x in row))
            except ValueError as exc:
                raise ParseError(f"metric[{r}]", str(exc)) from None
        metric = HermitianMetric(tuple(rows))
        try:
            metric.validate()
        except NotPositive as exc:
            raise ValidationError("HermitianMetric", str(exc)) from None

    coeff_raw = raw.get("coefficients", {"type": "invariant"})
    if not isinstance(coeff_raw, dict) or "type" not in coeff_raw:
        raise ParseError("coefficients", "an object with a 'type' field is required")
    kind = coeff_raw["type"]
    if kind == "invariant":
        coefficients = CoefficientModel.invariant()
    elif kind == "torus_fourier":
        rank = coeff_raw.get("rank")
        if not isinstance(rank, int) or rank <= 0:
            raise ParseError("coefficients.rank", "a positive integer is required")
        actions_raw = coeff_raw.get("actions")
        if not (isinstance(actions_raw, list) and len(actions_raw) == real_dim):
            raise ParseError("coefficients.actions", f"one length-{rank} row per frame vector is required")
        actions = []
        for r, row in enumerate(actions_raw):
            if not (isinstance(row, list) and len(row) == rank):
                raise ParseError(f"coefficients.actions[{r}]", f"expected {rank} entries")
            try:
                actions.append(tuple(parse_scalar(str(x)) for x in row))
            except ValueError as exc:
                raise ParseError(f"coefficients.actions[{r}]", str(exc)) from None
        truncation = coeff_raw.get("truncation", 0)
        if not isinstance(truncation, int) or truncation < 0:
            raise ParseError("coefficients.truncation", "a nonnegative integer is required")
        coefficients = CoefficientModel("torus_fourier", rank, tuple(actions), truncation)
    else:
        raise ParseError("coefficients.type", f"unknown coefficient model {kind!r}")

    tasks_raw = raw.get("tasks", [])
    if not isinstance(tasks_raw, list) or not all(isinstance(t, str) for t in tasks_raw):
        raise ParseError("tasks", "a list of command names is required")
    for t in tasks_raw:
        if t not in KNOWN_TASKS:
            raise ParseError("tasks", f"unknown task {t!r}")

    spec = ManifoldSpec(
        name=name,
        real_dim=real_dim,
        algebra=algebra,
        structure=structure,
        metric=metric,
        coefficients=coefficients,
        tasks=tuple(tasks_raw),
    )
    # surface the remaining structural invariants now, not at computation time
    report = validate_model(algebra, structure)
    if not report.passed:
        failing = [c.name for c in report.checks if not c.passed]
        raise ValidationError("LieAlgebraSpec", f"failing invariants: {', '.join(failing)}")
    return spec


def bundled_manifest_path(name: str) -> str:
    ref = resources.files("acx").joinpath("manifests").joinpath(f"{name}.json")
    return str(ref)


class Session:
    """One parsed manifest plus cached engines per truncation."""

    def __init__(self, spec: ManifoldSpec):
        self.spec = spec
        self.frame = build_frame(spec.algebra, spec.structure)
        self._complexes: dict[object, FormComplex] = {}
        self._engines: dict[object, CohomologyEngine] = {}

    def truncation_label(self, truncation: int | None) -> str:
        if self.spec.coefficients.kind == "invariant":
            return "invariant"
        if truncation is None:
            truncation = self.spec.coefficients.truncation
        return f"N={truncation}"

    def complex(self, truncation: int | None = None) -> FormComplex:
        key = self.truncation_label(truncation)
        if key not in self._complexes:
            model = self.spec.coefficients
            if model.kind != "invariant":
                model = model.with_truncation(
                    model.truncation if truncation is None else truncation
                )
            self._complexes[key] = FormComplex(self.frame, model)
        return self._complexes[key]

    def engine(self, truncation: int | None = None) -> CohomologyEngine:
        key = self.truncation_label(truncation)
        if key not in self._engines:
            cx = self.complex(truncation)
            hermitian = HermitianStructure(cx, self.spec.metric)
            self._engines[key] = CohomologyEngine(cx, hermitian)
        return self._engines[key]

    def default_truncations(self) -> list[int | None]:
        if self.spec.coefficients.kind == "invariant":
            return [None]
        return [self.spec.coefficients.truncation]


# ---------------------------------------------------------------------------
# form rendering


def render_form(cx: FormComplex, form: Form) -> dict:
    out = {}
    for e, c in form.items():
        holo = "".join(str(i) for i in e.holo)
        anti = "".join(str(j) for j in e.anti)
        label = f"w{list(e.weight)}|t{holo}|tb{anti}"
        out[label] = format_scalar(c)
    return out


def psi_from_selector(session: Session, truncation, selector: str) -> Form:
    engine = session.engine(truncation)
    cx = engine.complex
    omega = engine.hermitian.omega
    if selector == "fundamental":
        return omega
    if selector == "perturbed":
        candidates = engine.real_subspace(1, 1)
        dim11 = cx.dim(1, 1)
        for vec in candidates.basis:
            coords = [Scalar(vec[2 * j].re, vec[2 * j + 1].re) for j in range(dim11)]
            candidate = cx.from_vector(coords, 1, 1)
            if candidate.is_zero():
                continue
            ddbar = cx.apply("partial", cx.apply("dbar", candidate))
            if not ddbar.is_zero():
                continue
            if cx.apply("d", candidate).is_zero():
                continue
            return omega + candidate.scale(Scalar(Fraction(1, 10), Fraction(0)))
        return omega
    if selector.startswith("basis:"):
        idx = int(selector.split(":", 1)[1])
        candidates = engine.real_subspace(1, 1)
        dim11 = cx.dim(1, 1)
        pure = []
        for vec in candidates.basis:
            coords = [Scalar(vec[2 * j].re, vec[2 * j + 1].re) for j in range(dim11)]
            candidate = cx.from_vector(coords, 1, 1)
            if cx.apply("partial", cx.apply("dbar", candidate)).is_zero():
                pure.append(candidate)
        if idx >= len(pure):
            raise ValidationError("TamingSelector", f"basis index {idx} out of range ({len(pure)} available)")
        return pure[idx]
    raise ValidationError("TamingSelector", f"unknown selector {selector!r}")


# ---------------------------------------------------------------------------
# commands


def run(command: str, session: Session, flags: dict) -> tuple[dict, int]:
    """Execute one command; returns (report payload, exit code)."""
    t0 = time.monotonic()
    payload: dict = {
        "version": __version__,
        "command": command,
        "manifest": session.spec.as_dict(),
        "scope": "model-level (finite subcomplex of invariant forms"
        " optionally tensored with truncated Fourier modes)",
    }
    exit_code = 0
    try:
        if command == "validate":
            payload["validation"] = _run_validate(session)
        elif command == "diamond":
            payload["diamonds"] = _run_diamond(session, flags)
        elif command == "verify":
            payload["validation"] = _run_validate(session)
            payload["audits"] = _run_verify(session, flags)
        elif command == "taming":
            payload["certificates"] = _run_taming(session, flags)
        elif command == "report":
            payload["validation"] = _run_validate(session)
            payload["diamonds"] = _run_diamond(session, flags)
            payload["audits"] = _run_verify(session, flags)
            if session.spec.real_dim == 4:
                payload["certificates"] = _run_taming(session, {**flags, "psi": flags.get("psi", "fundamental")})
            else:
                payload["certificates"] = []
        else:
            raise ValidationError("Command", f"unknown command {command!r}")
    except (NotContained, InconsistentModel, DegenerateJ, NotPositive, Not4Manifold, ValidationError) as exc:
        payload["fatal"] = {"type": type(exc).__name__, "detail": str(exc)}
        exit_code = 2
    except NotDdcClosedError as exc:
        payload["fatal"] = {"type": "NotDdcClosed", "detail": str(exc)}
        exit_code = 2
    payload["timing"] = {"seconds": round(time.monotonic() - t0, 6)}
    return payload, exit_code


def _run_validate(session: Session) -> dict:
    report = validate_model(session.spec.algebra, session.spec.structure).as_dict()
    cx = session.complex(session.default_truncations()[0])
    suite = cx.identity_suite()
    report["identity_suite"] = [
        {"identity": e["identity"], "passed": e["passed"], "failures": [list(b) for b in e["failures"]]}
        for e in suite
    ]
    report["nijenhuis_rank"] = nijenhuis_rank(session.frame)
    report["passed"] = report["passed"] and all(e["passed"] for e in suite)
    return report


def _parse_truncations(session: Session, flags: dict) -> list[int | None]:
    if flags.get("truncations"):
        if session.spec.coefficients.kind == "invariant":
            raise ValidationError("CoefficientModel", "truncations require a torus_fourier manifest")
        return [int(x) for x in str(flags["truncations"]).split(",")]
    return session.default_truncations()


def _run_diamond(session: Session, flags: dict) -> dict:
    truncations = _parse_truncations(session, flags)
    engines = [(session.truncation_label(t), session.engine(t)) for t in truncations]
    diamond = compute_diamond(engines)
    out = diamond.as_dict()
    if flags.get("bidegree"):
        p, q = (int(x) for x in flags["bidegree"].split(","))
        out["tables"] = {
            theory: {cell: vals for cell, vals in table.items() if cell == f"{p},{q}"}
            for theory, table in out["tables"].items()
        }
    return out


def _run_verify(session: Session, flags: dict) -> list[dict]:
    items: list[AuditItem] = []
    for t in _parse_truncations(session, flags):
        engine = session.engine(t)
        label = session.truncation_label(t)
        scoped: list[AuditItem] = []
        scoped.extend(audit_identities(engine))
        scoped.extend(audit_dualities(engine))
        scoped.extend(audit_maximal_nijenhuis(engine))
        if engine.n == 2:
            scoped.extend(audit_4mfld_lemmas(engine))
            scoped.extend(audit_ddbar_images(engine))
            scoped.extend(audit_generalized_ddbar(engine))
            scoped.extend(audit_ddc_descent(engine))
            item, _ = audit_taming(engine, engine.hermitian.omega, "fundamental")
            scoped.append(item)
        for item in scoped:
            item.witness["truncation"] = label
        items.extend(scoped)
    return [item.as_dict() for item in items]


def _run_taming(session: Session, flags: dict) -> list[dict]:
    from .audits import DegenerateAtSample, NoSolution, solve_taming

    selector = flags.get("psi") or "fundamental"
    truncation = _parse_truncations(session, flags)[0]
    engine = session.engine(truncation)
    cx = engine.complex
    psi = psi_from_selector(session, truncation, selector)
    base = {"selector": selector, "truncation": session.truncation_label(truncation)}
    try:
        cert = solve_taming(engine, psi)
    except NoSolution as exc:
        # a legitimate model-level outcome: report the obstruction functional
        return [{**base, "status": "no-solution", "obstruction": exc.obstruction}]
    except DegenerateAtSample as exc:
        return [{**base, "status": "degenerate", "sample_point": [str(x) for x in exc.point]}]
    rendered = cert.as_dict(lambda f: render_form(cx, f))
    rendered.update(base)
    rendered["status"] = "certified"
    return [rendered]


# ---------------------------------------------------------------------------
# output


def render_table(payload: dict) -> str:
    lines = [f"acx {payload['version']} :: {payload['command']} :: {payload['manifest']['name']}"]
    lines.append(f"scope: {payload['scope']}")
    if "fatal" in payload:
        lines.append(f"FATAL {payload['fatal']['type']}: {payload['fatal']['detail']}")
    if "validation" in payload:
        v = payload["validation"]
        lines.append(f"validation: {'PASS' if v['passed'] else 'FAIL'}")
        for c in v["checks"]:
            lines.append(f"  [{'ok' if c['passed'] else 'XX'}] {c['name']}")
        for e in v.get("identity_suite", []):
            lines.append(f"  [{'ok' if e['passed'] else 'XX'}] identity {e['identity']}")
        lines.append(f"  nijenhuis rank: {v.get('nijenhuis_rank')}")
    if "diamonds" in payload:
        d = payload["diamonds"]
        lines.append("truncations: " + ", ".join(d["labels"]))
        lines.append("betti: " + "; ".join(f"b{r}={v}" for r, v in d["betti"].items()))
        for theory, table in d["tables"].items():
            lines.append(f"{theory} dimensions (p,q: per truncation):")
            for cell, vals in table.items():
                mark = ""
                if any(w["theory"] == theory and w["cell"] == cell for w in d["unbounded_witnesses"]):
                    mark = "  [growing: unbounded-witness]"
                lines.append(f"  ({cell}): " + ", ".join(str(v) for v in vals) + mark)
        for name, vals in d["scalars"].items():
            lines.append(f"{name}: " + ", ".join(str(v) for v in vals))
    if "audits" in payload:
        lines.append("audits:")
        for a in payload["audits"]:
            lines.append(f"  [{a['status']:>14}] {a['claim']} ({a['witness'].get('truncation', '')})")
    if "certificates" in payload:
        for c in payload["certificates"]:
            if c.get("status") == "certified":
                lines.append(
                    f"taming[{c['selector']}]: closed={c['closed']} well_defined={c['well_defined']}"
                    f" nondegeneracy={c['nondegeneracy'].get('kind')}"
                )
            else:
                lines.append(f"taming[{c['selector']}]: {c.get('status')}")
    return "\n".join(lines) + "\n"


def render_json(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="acx",
        description="exact Dolbeault-type cohomology engine for invariant almost complex models",
    )
    parser.add_argument("command", choices=list(KNOWN_TASKS))
    parser.add_argument("manifest", help="path to a manifest JSON file")
    parser.add_argument("--truncations", help="comma-separated Fourier truncations, e.g. 0,1,2,3")
    parser.add_argument("--bidegree", help="restrict diamond output to one cell, e.g. 1,1")
    parser.add_argument("--format", choices=["json", "table"], default="table")
    parser.add_argument("--psi", default="fundamental", help="taming input: fundamental | perturbed | basis:K")
    args = parser.parse_args(argv)

    try:
        spec = parse_manifest(args.manifest)
        session = Session(spec)
    except (ParseError, ValidationError, DegenerateJ, NotPositive, InconsistentModel) as exc:
        diagnostic = {"fatal": {"type": type(exc).__name__, "detail": str(exc)}}
        if args.format == "json":
            sys.stdout.write(render_json(diagnostic))
        else:
            sys.stdout.write(f"FATAL {type(exc).__name__}: {exc}\n")
        return 2

    flags = {"truncations": args.truncations, "bidegree": args.bidegree, "psi": args.psi}
    payload, code = run(args.command, session, flags)
    if args.format == "json":
        sys.stdout.write(render_json(payload))
    else:
        sys.stdout.write(render_table(payload))
    return code


if __name__ == "__main__":
    sys.exit(main())
