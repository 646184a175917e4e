"""Invariant frame calculus.

From a real Lie algebra (rational structure constants) and a rational almost
complex structure J, build the complexified (1,0)-frame and its dual coframe,
derive the action of the exterior differential on coframe generators via
d(alpha)(X, Y) = -alpha([X, Y]), split it into the four bidegree components,
and read off the Nijenhuis coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import linalg
from .forms import BasisElement, Form
from .linalg import ExactMatrix
from .scalars import I, ONE, ZERO, Scalar, from_fraction

OPERATOR_NAMES = ("mu", "partial", "dbar", "mubar")

# bidegree shifts of the components of d
SHIFTS = {"mu": (2, -1), "partial": (1, 0), "dbar": (0, 1), "mubar": (-1, 2)}


class DegenerateJ(Exception):
    """The supplied endomorphism does not square to minus the identity."""


@dataclass(frozen=True)
class LieAlgebraSpec:
    """Real Lie algebra with rational structure constants.

    brackets holds c^k_{ij} for i < j only; [e_i, e_j] = sum_k c^k_{ij} e_k
    and antisymmetry supplies the rest.
    """

    dim: int
    brackets: tuple[tuple[int, int, int, Fraction], ...]

    @classmethod
    def from_entries(cls, dim: int, entries: Sequence[tuple[int, int, int, Fraction]]) -> "LieAlgebraSpec":
        table: dict[tuple[int, int, int], Fraction] = {}
        for (i, j, k, value) in entries:
            if not (1 <= i <= dim and 1 <= j <= dim and 1 <= k <= dim):
                raise ValueError(f"bracket index out of range in ({i},{j},{k})")
            if i == j:
                if value != 0:
                    raise ValueError(f"[e_{i}, e_{i}] must vanish")
                continue
            if i > j:
                i, j, value = j, i, -value
            key = (i, j, k)
            if key in table and table[key] != value:
                raise ValueError(f"conflicting values for c^{k}_({i},{j})")
            table[key] = value
        cleaned = tuple(sorted((i, j, k, v) for (i, j, k), v in table.items() if v != 0))
        return cls(dim, cleaned)

    def bracket_table(self) -> dict[tuple[int, int], dict[int, Fraction]]:
        out: dict[tuple[int, int], dict[int, Fraction]] = {}
        for (i, j, k, v) in self.brackets:
            out.setdefault((i, j), {})[k] = v
        return out

    def bracket_complex(self, x: Sequence[Scalar], y: Sequence[Scalar]) -> tuple[Scalar, ...]:
        """Bilinear extension of the bracket to complexified vectors."""
        out = [ZERO] * self.dim
        for (i, j, k, v) in self.brackets:
            c = from_fraction(v)
            a = x[i - 1] * y[j - 1] - x[j - 1] * y[i - 1]
            if a:
                out[k - 1] = out[k - 1] + c * a
        return tuple(out)

    def coframe_is_closed(self, index: int) -> bool:
        """Whether d e^index = 0, i.e. e_index never appears as a bracket target."""
        return all(k != index for (_, _, k, _) in self.brackets)

    def is_abelian(self) -> bool:
        return not self.brackets


@dataclass(frozen=True)
class AlmostComplexStructure:
    """A rational endomorphism J of the real algebra with J^2 = -1."""

    matrix: tuple[tuple[Fraction, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.matrix)

    def squares_to_minus_one(self) -> bool:
        n = self.dim
        for i in range(n):
            for j in range(n):
                s = sum((self.matrix[i][k] * self.matrix[k][j] for k in range(n)), Fraction(0))
                if s != (Fraction(-1) if i == j else Fraction(0)):
                    return False
        return True

    def apply(self, vec: Sequence[Scalar]) -> tuple[Scalar, ...]:
        n = self.dim
        out = [ZERO] * n
        for i in range(n):
            acc = ZERO
            for j in range(n):
                if self.matrix[i][j] and vec[j]:
                    acc = acc + from_fraction(self.matrix[i][j]) * vec[j]
            out[i] = acc
        return tuple(out)


@dataclass(frozen=True)
class ComplexFrame:
    """(1,0)-frame vectors, their conjugates and the dual coframe rows.

    z_vectors[r] are the real-frame coordinates of Z_{r+1}; theta[r] are the
    covector coordinates of theta^{r+1}, so theta^j(Z_k) is exactly delta.
    """

    algebra: LieAlgebraSpec
    structure: AlmostComplexStructure
    z_vectors: tuple[tuple[Scalar, ...], ...]
    theta: tuple[tuple[Scalar, ...], ...]

    @property
    def n(self) -> int:
        return len(self.z_vectors)

    def z_bar(self, r: int) -> tuple[Scalar, ...]:
        return tuple(v.conj() for v in self.z_vectors[r])

    def theta_bar(self, r: int) -> tuple[Scalar, ...]:
        return tuple(v.conj() for v in self.theta[r])

    def complex_frame_vector(self, a: int) -> tuple[Scalar, ...]:
        """W_a for a in [0, 2n): Z_1..Z_n then conjugates."""
        n = self.n
        return self.z_vectors[a] if a < n else self.z_bar(a - n)

    def covector(self, kind: str, s: int) -> tuple[Scalar, ...]:
        return self.theta[s - 1] if kind == "h" else self.theta_bar(s - 1)


def build_frame(spec: LieAlgebraSpec, structure: AlmostComplexStructure) -> ComplexFrame:
    """Project the real frame onto the +i eigenspace of J and dualize.

    The (1,0)-frame is the pivot-column subset of (1 - iJ)/2 applied to the
    real frame, so the output is deterministic; the coframe solves the exact
    duality system against (Z, Zbar).
    """
    dim = spec.dim
    if dim % 2 != 0:
        raise DegenerateJ(f"real dimension {dim} is odd")
    if structure.dim != dim:
        raise DegenerateJ("J size does not match the algebra dimension")
    if not structure.squares_to_minus_one():
        raise DegenerateJ("J^2 != -1")
    n = dim // 2
    half = Scalar(Fraction(1, 2), Fraction(0))
    # columns of (1 - iJ)/2 in the real frame
    columns = []
    for c in range(dim):
        col = [ZERO] * dim
        col[c] = half
        for r in range(dim):
            if structure.matrix[r][c]:
                col[r] = col[r] - half * I * from_fraction(structure.matrix[r][c])
        columns.append(tuple(col))
    if linalg.rank(ExactMatrix.from_rows(columns, dim)) != n:
        raise DegenerateJ("projector rank is not half the dimension")
    # keep the leftmost projector columns that stay linearly independent
    chosen: list[int] = []
    probe: list[tuple[Scalar, ...]] = []
    for c in range(dim):
        trial = probe + [columns[c]]
        if linalg.rank(ExactMatrix.from_rows(trial, dim)) == len(trial):
            probe = trial
            chosen.append(c)
            if len(chosen) == n:
                break
    z_vectors = tuple(columns[c] for c in chosen)
    # duality: invert the matrix whose columns are Z_1..Z_n, conj(Z_1)..conj(Z_n)
    entries = {}
    for j in range(n):
        for r, v in enumerate(z_vectors[j]):
            if v:
                entries[(r, j)] = v
            w = v.conj()
            if w:
                entries[(r, n + j)] = w
    frame_matrix = ExactMatrix(dim, dim, entries)
    theta_rows = []
    for j in range(n):
        unit = [ZERO] * dim
        # theta^j is row j of the inverse: solve M^T x = delta_j
        unit[j] = ONE
        row = linalg.solve(frame_matrix.transpose(), unit)
        if row is None:
            raise DegenerateJ("frame vectors are not independent")
        theta_rows.append(tuple(row))
    return ComplexFrame(spec, structure, z_vectors, tuple(theta_rows))


def _pair_monomial(n: int, a: int, b: int) -> BasisElement:
    """Canonical monomial phi^a ^ phi^b for a < b over the combined coframe."""
    holo = tuple(x + 1 for x in (a, b) if x < n)
    anti = tuple(x - n + 1 for x in (a, b) if x >= n)
    return BasisElement((), holo, anti)


def exterior_d_on_generators(frame: ComplexFrame) -> dict[tuple[str, int], Form]:
    """d(theta^s) and d(tbar^s) as invariant 2-forms in the complex coframe."""
    n = frame.n
    dim = 2 * n
    vectors = [frame.complex_frame_vector(a) for a in range(dim)]
    out: dict[tuple[str, int], Form] = {}
    for kind in ("h", "a"):
        for s in range(1, n + 1):
            cov = frame.covector(kind, s)
            coeffs: dict[BasisElement, Scalar] = {}
            for a in range(dim):
                for b in range(a + 1, dim):
                    bracket = frame.algebra.bracket_complex(vectors[a], vectors[b])
                    val = ZERO
                    for coord, x in zip(cov, bracket):
                        if coord and x:
                            val = val + coord * x
                    if val:
                        coeffs[_pair_monomial(n, a, b)] = -val
            out[(kind, s)] = Form(coeffs)
    return out


def split_d(differentials: dict[tuple[str, int], Form]) -> dict[str, dict[tuple[str, int], Form]]:
    """Bidegree components of each generator differential.

    A (1,0)-generator distributes over (2,0) -> partial, (1,1) -> dbar,
    (0,2) -> mubar; a (0,1)-generator over (2,0) -> mu, (1,1) -> partial,
    (0,2) -> dbar.  The remaining components vanish for degree reasons.
    """
    holo_map = {(2, 0): "partial", (1, 1): "dbar", (0, 2): "mubar"}
    anti_map = {(2, 0): "mu", (1, 1): "partial", (0, 2): "dbar"}
    out: dict[str, dict[tuple[str, int], Form]] = {name: {} for name in OPERATOR_NAMES}
    for gen, form in differentials.items():
        table = holo_map if gen[0] == "h" else anti_map
        for bidegree, op in table.items():
            part = form.bidegree_part(*bidegree)
            if part:
                out[op][gen] = part
    return out


@dataclass(frozen=True)
class NijenhuisData:
    """Coefficients N^t_{jk}, antisymmetric in (j, k), 1-based indices."""

    n: int
    coefficients: tuple[tuple[tuple[int, int, int], Scalar], ...]

    def coefficient(self, t: int, j: int, k: int) -> Scalar:
        for (tt, jj, kk), v in self.coefficients:
            if (tt, jj, kk) == (t, j, k):
                return v
            if (tt, jj, kk) == (t, k, j):
                return -v
        return ZERO

    def is_zero(self) -> bool:
        return not self.coefficients


def nijenhuis(frame: ComplexFrame) -> NijenhuisData:
    """Read N^t_{jk} off the (0,2)-components of the generator differentials.

    Convention: mubar theta^t = (1/2) sum over ordered pairs (j, k) of
    N^t_{jk} tbar^j ^ tbar^k, so the canonical-monomial coefficient at j < k
    is exactly N^t_{jk}.
    """
    diffs = split_d(exterior_d_on_generators(frame))
    coeffs = []
    for t in range(1, frame.n + 1):
        form = diffs["mubar"].get(("h", t), Form())
        for elt, c in form.items():
            j, k = elt.anti
            coeffs.append(((t, j, k), c))
    return NijenhuisData(frame.n, tuple(sorted(coeffs)))


def nijenhuis_rank(frame: ComplexFrame) -> int:
    """Rank of mubar as a map from (1,0)-forms to (0,2)-forms."""
    diffs = split_d(exterior_d_on_generators(frame))
    n = frame.n
    targets = [(j, k) for j in range(1, n + 1) for k in range(j + 1, n + 1)]
    index = {t: i for i, t in enumerate(targets)}
    entries = {}
    for s in range(1, n + 1):
        form = diffs["mubar"].get(("h", s), Form())
        for elt, c in form.items():
            entries[(index[elt.anti], s - 1)] = c
    return linalg.rank(ExactMatrix(len(targets), n, entries))


@dataclass(frozen=True)
class ValidationCheck:
    name: str
    passed: bool
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[ValidationCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks
            ],
        }


def validate_model(spec: LieAlgebraSpec, structure: AlmostComplexStructure) -> ValidationReport:
    """Report antisymmetry, Jacobi (as d*d = 0 on generators) and J^2 = -1."""
    checks = []
    # antisymmetry holds by construction of the bracket table; re-verify anyway
    table = spec.bracket_table()
    anti_ok = all(i < j for (i, j) in table)
    checks.append(ValidationCheck("bracket-antisymmetry", anti_ok, "stored pairs are ordered"))

    j_ok = structure.dim == spec.dim and structure.squares_to_minus_one()
    checks.append(ValidationCheck("J-squares-to-minus-identity", j_ok, "exact matrix square"))

    if j_ok and spec.dim % 2 == 0:
        frame = build_frame(spec, structure)
        diffs = exterior_d_on_generators(frame)
        gen_action = dict(diffs)
        from .forms import extend_derivation

        failures = []
        for gen, dgen in diffs.items():
            dd = extend_derivation(gen_action, None, dgen)
            if not dd.is_zero():
                failures.append(gen)
        checks.append(
            ValidationCheck(
                "jacobi-via-d-squared",
                not failures,
                "d(d theta) = 0 on every generator" if not failures else f"fails on {failures}",
            )
        )
    else:
        checks.append(ValidationCheck("jacobi-via-d-squared", False, "frame construction unavailable"))
    return ValidationReport(tuple(checks))
