"""Numeric checks at finite dimension for the contractivity statements.

The codomain model is the commutative algebra of complex k-vectors with
pointwise product, entrywise conjugation as the involution, and the sup
norm.  Linear maps between such algebras are complex matrices, and the
induced sup-to-sup operator norm has the closed form max row l1-sum, so
norm assertions are exact up to floating arithmetic.

Three checks live here: a sweep over every involution-preserving
cube-power-preserving functional combination asserting contractivity, a
norm check for maps passing the stronger hypothesis filter set (power
preservation, involution preservation, and h(a* a) = h(a)* h(a)), and the
componentwise reduction equivalence that mirrors evaluating a map through
the coordinate characters of the codomain.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

FILTER_TOL = 1e-9
ALGEBRA_TOL = 1e-12
DEFAULT_SAMPLES = 256


@dataclass(frozen=True)
class DiagAlgebra:
    """Complex k-vectors, pointwise product, sup norm, entrywise conjugation."""

    k: int

    def norm(self, a: np.ndarray) -> float:
        return float(np.max(np.abs(a))) if self.k else 0.0

    def star(self, a: np.ndarray) -> np.ndarray:
        return np.conjugate(a)

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return a * b

    def samples(self, count: int, seed: int = 0) -> np.ndarray:
        """(count, k) array with entries uniform over the square [-1,1]^2."""
        rng = np.random.default_rng(seed)
        return rng.uniform(-1.0, 1.0, (count, self.k)) + 1j * rng.uniform(
            -1.0, 1.0, (count, self.k)
        )

    def cstar_identity_defect(self, a: np.ndarray) -> float:
        """| norm(a* a) - norm(a)^2 |, exactly zero in exact arithmetic."""
        return abs(self.norm(self.star(a) * a) - self.norm(a) ** 2)


@dataclass(frozen=True)
class LinearMapC:
    """Linear map between DiagAlgebras as a (codomain, domain) complex matrix."""

    matrix: np.ndarray
    tol: float = FILTER_TOL

    @property
    def domain_dim(self) -> int:
        return self.matrix.shape[1]

    @property
    def codomain_dim(self) -> int:
        return self.matrix.shape[0]

    def apply(self, a: np.ndarray) -> np.ndarray:
        return a @ self.matrix.T


def op_norm_sup(h: LinearMapC) -> float:
    """Induced norm for sup-norm domains and codomains: max row l1-sum."""
    if h.matrix.size == 0:
        return 0.0
    return float(np.max(np.sum(np.abs(h.matrix), axis=1)))


def classify_njordan_functionals(m: int, n: int) -> list[LinearMapC]:
    """All linear f: C^m -> C with f(a^n) = f(a)^n as polynomial identities.

    Comparing coefficients of both sides as polynomials in the m entries
    forces at most one nonzero matrix entry c, placed on one coordinate,
    with c^n = c; so c = 0 or c^(n-1) = 1.  The list is built in a fixed
    order: the zero functional, then for each coordinate the (n-1)-th
    roots of unity omega = exp(2*pi*i*j/(n-1)) for j = 0..n-2.
    """
    if n not in (2, 3, 4):
        raise ValueError("supported powers are 2, 3, 4")
    if m > 6:
        raise ValueError("domain dimension capped at 6")
    out = [LinearMapC(np.zeros((1, m), dtype=complex))]
    for i in range(m):
        for j in range(n - 1):
            omega = cmath.exp(2j * cmath.pi * j / (n - 1))
            row = np.zeros((1, m), dtype=complex)
            row[0, i] = omega
            out.append(LinearMapC(row))
    return out


def is_involution_preserving(h: LinearMapC, tol: float = FILTER_TOL) -> bool:
    """h(conj(a)) = conj(h(a)) for all a, equivalent to a real matrix."""
    return float(np.max(np.abs(h.matrix.imag), initial=0.0)) <= tol


def is_power_jordan(
    h: LinearMapC, n: int, samples: np.ndarray, tol: float = FILTER_TOL
) -> tuple[bool, int | None]:
    """Does h(a^n) = h(a)^n hold on every sample; returns first bad index."""
    lhs = h.apply(samples ** n)
    rhs = h.apply(samples) ** n
    defect = np.max(np.abs(lhs - rhs), axis=1) if lhs.shape[1] else np.zeros(len(samples))
    bad = np.flatnonzero(defect > tol)
    if bad.size:
        return False, int(bad[0])
    return True, None


def preserves_star_product(
    h: LinearMapC, samples: np.ndarray, tol: float = FILTER_TOL
) -> tuple[bool, int | None]:
    """Does h(a* a) = h(a)* h(a) hold on every sample."""
    lhs = h.apply(np.conjugate(samples) * samples)
    img = h.apply(samples)
    rhs = np.conjugate(img) * img
    defect = np.max(np.abs(lhs - rhs), axis=1) if lhs.shape[1] else np.zeros(len(samples))
    bad = np.flatnonzero(defect > tol)
    if bad.size:
        return False, int(bad[0])
    return True, None


def check_corollary_2_6(
    m: int,
    k: int,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    tol: float = FILTER_TOL,
) -> dict:
    """Contractivity sweep over componentwise cube-power-preserving maps.

    Every h: C^m -> C^k whose k components are drawn from the
    involution-preserving part of classify_njordan_functionals(m, 3) is
    checked to be cube-power-preserving on samples and to satisfy
    op_norm_sup(h) <= 1, which is exact because every matrix entry lies in
    {0, 1, -1}.  A deliberately scaled fake component (2 * first
    projection) is pushed through the same filter as a self-test and must
    be rejected before any norm reasoning.
    """
    if m > 3 or k > 3:
        raise ValueError("sweep capped at m <= 3, k <= 3")
    functionals = [
        f for f in classify_njordan_functionals(m, 3) if is_involution_preserving(f, tol)
    ]
    dom = DiagAlgebra(m)
    batch = dom.samples(samples, seed)
    maps_checked = 0
    max_norm = 0.0
    all_jordan = True
    all_contractive = True
    index = [0] * k
    total = len(functionals) ** k
    for flat in range(total):
        rem = flat
        for pos in range(k):
            index[pos] = rem % len(functionals)
            rem //= len(functionals)
        matrix = np.vstack([functionals[i].matrix for i in index])
        h = LinearMapC(matrix)
        ok, _ = is_power_jordan(h, 3, batch, tol)
        norm = op_norm_sup(h)
        maps_checked += 1
        max_norm = max(max_norm, norm)
        all_jordan = all_jordan and ok
        all_contractive = all_contractive and norm <= 1.0
    fake = np.zeros((1, m), dtype=complex)
    fake[0, 0] = 2.0
    fake_rejected = not is_power_jordan(LinearMapC(fake), 3, batch, tol)[0]
    return {
        "m": m,
        "k": k,
        "functionals_per_component": len(functionals),
        "maps_checked": maps_checked,
        "all_power_preserving": all_jordan,
        "all_contractive": all_contractive,
        "max_norm": max_norm,
        "injected_fake_rejected": fake_rejected,
        "samples": samples,
        "seed": seed,
        "ok": all_jordan and all_contractive and fake_rejected,
    }


def step2_reduction_check(
    h: LinearMapC,
    n: int,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    tol: float = FILTER_TOL,
) -> bool:
    """Whole-map power preservation is equivalent to componentwise.

    The coordinate functionals of C^k separate points and multiply
    pointwise, so h(a^n) = h(a)^n holds on the samples exactly when every
    coordinate component satisfies its own scalar version on the same
    samples.  Both directions are checked on one shared sample batch.
    """
    dom = DiagAlgebra(h.domain_dim)
    batch = dom.samples(samples, seed)
    whole, _ = is_power_jordan(h, n, batch, tol)
    component_results = []
    for row in range(h.codomain_dim):
        comp = LinearMapC(h.matrix[row : row + 1, :])
        ok, _ = is_power_jordan(comp, n, batch, tol)
        component_results.append(ok)
    componentwise = all(component_results)
    return whole == componentwise


def check_theorem_2_7(
    h: LinearMapC,
    power: int,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
    tol: float = FILTER_TOL,
) -> dict:
    """Norm check for maps passing the full hypothesis filter set.

    Filters, in order: h(a^power) = h(a)^power on samples, involution
    preservation, and h(a* a) = h(a)* h(a) on samples.  A map failing any
    filter is reported as rejected with the failing hypothesis and witness
    sample index, and no norm claim is made.  A map passing all three must
    satisfy op_norm_sup(h) <= 1 + tol; the report also traces the
    inequality norm(h(a))^(4*power+2) <= opnorm(h)^4 * norm(a)^(4*power+2)
    on every sample and returns the smallest and largest observed slack.
    """
    dom = DiagAlgebra(h.domain_dim)
    cod = DiagAlgebra(h.codomain_dim)
    batch = dom.samples(samples, seed)

    ok, witness = is_power_jordan(h, power, batch, tol)
    if not ok:
        return {
            "rejected_by": "power_preservation",
            "witness_sample": witness,
            "power": power,
            "samples": samples,
            "seed": seed,
            "ok": False,
        }
    if not is_involution_preserving(h, tol):
        return {
            "rejected_by": "involution_preservation",
            "witness_sample": None,
            "power": power,
            "samples": samples,
            "seed": seed,
            "ok": False,
        }
    ok, witness = preserves_star_product(h, batch, tol)
    if not ok:
        return {
            "rejected_by": "star_product",
            "witness_sample": witness,
            "power": power,
            "samples": samples,
            "seed": seed,
            "ok": False,
        }

    norm = op_norm_sup(h)
    exponent = 4 * power + 2
    min_slack = float("inf")
    max_slack = float("-inf")
    images = h.apply(batch)
    for a, img in zip(batch, images):
        lhs = cod.norm(img) ** exponent
        rhs = norm ** 4 * dom.norm(a) ** exponent
        slack = rhs - lhs
        min_slack = min(min_slack, slack)
        max_slack = max(max_slack, slack)
    return {
        "rejected_by": None,
        "power": power,
        "norm": norm,
        "contractive": norm <= 1.0 + tol,
        "min_slack": min_slack,
        "max_slack": max_slack,
        "slack_nonnegative": min_slack >= -tol,
        "samples": samples,
        "seed": seed,
        "ok": norm <= 1.0 + tol,
    }


def coordinate_star_map(k: int, perm: tuple[int, ...] | None = None) -> LinearMapC:
    """The map permuting coordinates of C^k, a norm-one *-isomorphism."""
    if perm is None:
        perm = tuple(range(k))
    if sorted(perm) != list(range(k)):
        raise ValueError("perm must be a permutation of 0..k-1")
    matrix = np.zeros((k, k), dtype=complex)
    for i, j in enumerate(perm):
        matrix[i, j] = 1.0
    return LinearMapC(matrix)


def random_linear_maps(m: int, k: int, count: int, seed: int = 0) -> list[LinearMapC]:
    """Reproducible batch of dense complex maps for the reduction check."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        mat = rng.uniform(-1.0, 1.0, (k, m)) + 1j * rng.uniform(-1.0, 1.0, (k, m))
        out.append(LinearMapC(mat))
    return out
