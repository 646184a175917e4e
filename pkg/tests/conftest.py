import random
from fractions import Fraction

import pytest

from acx.cli import Session, bundled_manifest_path, manifest_from_dict, parse_manifest


@pytest.fixture(scope="session")
def kt4_session():
    return Session(parse_manifest(bundled_manifest_path("kt4")))


@pytest.fixture(scope="session")
def torus_session():
    return Session(parse_manifest(bundled_manifest_path("torus4")))


@pytest.fixture(scope="session")
def nil6_session():
    return Session(parse_manifest(bundled_manifest_path("nil6")))


@pytest.fixture(scope="session")
def kodaira_session():
    # the same nilmanifold as kt4 but with the integrable complex structure:
    # mu and mubar vanish and the refined degree-one numbers differ (1 vs 2)
    raw = {
        "name": "kodaira4",
        "real_dim": 4,
        "brackets": [[1, 2, 3, "1"]],
        "J": [
            ["0", "-1", "0", "0"],
            ["1", "0", "0", "0"],
            ["0", "0", "0", "-1"],
            ["0", "0", "1", "0"],
        ],
        "metric": [["1", "0"], ["0", "1"]],
        "coefficients": {"type": "invariant"},
        "tasks": [],
    }
    return Session(manifest_from_dict(raw))


def _mat_mul(a, b):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def _mat_inv(m):
    n = len(m)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    r = 0
    for c in range(n):
        sel = next((i for i in range(r, n) if aug[i][c]), None)
        if sel is None:
            return None
        aug[r], aug[sel] = aug[sel], aug[r]
        piv = aug[r][c]
        aug[r] = [x / piv for x in aug[r]]
        for i in range(n):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        r += 1
    return [row[n:] for row in aug]


def random_4d_manifest(rng: random.Random) -> dict:
    """A random valid 4-dimensional manifest: a two-step nilpotent bracket and
    a rational J, both transported through a random rational change of basis."""
    a = Fraction(rng.randint(-2, 2))
    b = Fraction(rng.randint(-2, 2))
    base_brackets = {(1, 2): {3: a, 4: b}}
    j0 = [
        [Fraction(0), Fraction(-1), Fraction(0), Fraction(0)],
        [Fraction(1), Fraction(0), Fraction(0), Fraction(0)],
        [Fraction(0), Fraction(0), Fraction(0), Fraction(-1)],
        [Fraction(0), Fraction(0), Fraction(1), Fraction(0)],
    ]
    while True:
        p = [[Fraction(rng.randint(-2, 2)) for _ in range(4)] for _ in range(4)]
        q = _mat_inv(p)
        if q is not None:
            break
    # structure constants in the transported frame f_a = sum_j P[j][a] e_j
    entries = []
    for fa in range(1, 5):
        for fb in range(fa + 1, 5):
            target = [Fraction(0)] * 4
            for (i, j), comps in base_brackets.items():
                coeff = p[i - 1][fa - 1] * p[j - 1][fb - 1] - p[j - 1][fa - 1] * p[i - 1][fb - 1]
                if coeff:
                    for k, v in comps.items():
                        target[k - 1] += coeff * v
            for l in range(4):
                val = sum(q[l][k] * target[k] for k in range(4))
                if val:
                    entries.append([fa, fb, l + 1, str(val)])
    j_new = _mat_mul(_mat_mul(q, j0), p)
    return {
        "name": f"random-{rng.randint(0, 10**9)}",
        "real_dim": 4,
        "brackets": entries,
        "J": [[str(x) for x in row] for row in j_new],
        "coefficients": {"type": "invariant"},
        "tasks": [],
    }


def random_4d_session(rng: random.Random) -> Session:
    return Session(manifest_from_dict(random_4d_manifest(rng)))
