"""Identities satisfied by an additive map that preserves n-th powers.

An HIdentity pairs a left side and a right side.  The left side is a
FreePoly over domain variables and is read through additivity: the term
c*w stands for c*h(w), so the whole side is a finite combination of h
values.  The right side is a commutative FreePoly whose variable ids stand
for the image symbols H(v) = h(v).  The statement "lhs = rhs" is then a
universally quantified equation about any additive map h.

Three operations produce new identities from old ones:

  seed        the defining equation h(a^n) = H(a)^n,
  substitute  replace variables by integer-linear forms on both sides,
  combine     take an exact rational linear combination.

Substitution images must be integer-linear with no constant term because
additivity justifies exactly those replacements.  Every prime that appears
in the denominator of a combination coefficient is recorded in the
``denominators`` badge, so a finished identity carries the set of primes
that must be invertible in a codomain for its derivation to be valid
there.  The badge is provenance metadata and does not take part in
equality: two HIdentity values are equal when both sides agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Mapping, Sequence

import numpy as np

from .freealg import (
    COMMUTATIVE,
    FreePoly,
    abelianize,
    is_integer_linear,
    parse_expr,
    substitute_linear,
    to_string,
    var_id,
    var_name,
)
from .errors import GuardError

if TYPE_CHECKING:
    from .models import AdditiveMap, FiniteRing

SEED_VAR = var_id("a")


def prime_factors(n: int) -> frozenset[int]:
    """Set of prime factors of |n|; empty for 0 and 1."""
    n = abs(n)
    out = set()
    p = 2
    while p * p <= n:
        while n % p == 0:
            out.add(p)
            n //= p
        p += 1
    if n > 1:
        out.add(n)
    return frozenset(out)


@dataclass(frozen=True, eq=False)
class HIdentity:
    """One derived equation about an additive n-th-power-preserving map."""

    lhs: FreePoly
    rhs: FreePoly
    denominators: frozenset[int] = frozenset()

    def __post_init__(self):
        if self.rhs.mode != COMMUTATIVE:
            raise ValueError("rhs must be commutative")
        for word, _ in self.lhs.terms:
            if len(word) == 0:
                raise ValueError("lhs words must be nonempty")
        for word, _ in self.rhs.terms:
            if len(word) == 0:
                raise ValueError("rhs monomials must be nonempty")

    @property
    def mode(self) -> str:
        return self.lhs.mode

    def __eq__(self, other) -> bool:
        if not isinstance(other, HIdentity):
            return NotImplemented
        return self.lhs == other.lhs and self.rhs == other.rhs

    def __hash__(self) -> int:
        return hash((self.lhs, self.rhs))

    def __str__(self) -> str:
        return identity_to_string(self)


def seed(n: int, mode: str) -> HIdentity:
    """The defining identity h(a^n) = H(a)^n."""
    if n < 2:
        raise ValueError("power must be at least 2")
    lhs = FreePoly.from_terms([((SEED_VAR,) * n, 1)], mode)
    rhs = FreePoly.from_terms([((SEED_VAR,) * n, 1)], COMMUTATIVE)
    return HIdentity(lhs, rhs)


def substitute(ident: HIdentity, subst: Mapping[int, FreePoly]) -> HIdentity:
    """Apply a variable-to-linear-form substitution to both sides."""
    for img in subst.values():
        if not is_integer_linear(img):
            raise ValueError(f"substitution image is not integer-linear: {img}")
    lhs_map = {v: img if img.mode == ident.lhs.mode else FreePoly.from_terms(img.terms, ident.lhs.mode)
               for v, img in subst.items()}
    rhs_map = {v: abelianize(img) for v, img in subst.items()}
    return HIdentity(
        substitute_linear(ident.lhs, lhs_map),
        substitute_linear(ident.rhs, rhs_map),
        ident.denominators,
    )


def combine(terms: Sequence[tuple[Fraction | int, HIdentity]]) -> HIdentity:
    """Exact linear combination; records denominator primes of the weights."""
    if not terms:
        raise ValueError("combine needs at least one term")
    mode = terms[0][1].mode
    lhs = FreePoly.zero(mode)
    rhs = FreePoly.zero(COMMUTATIVE)
    primes: set[int] = set()
    for coeff, ident in terms:
        if ident.mode != mode:
            raise ValueError("cannot combine identities of different modes")
        c = Fraction(coeff)
        lhs = lhs + ident.lhs.scale(c)
        rhs = rhs + ident.rhs.scale(c)
        primes |= ident.denominators | prime_factors(c.denominator)
    return HIdentity(lhs, rhs, frozenset(primes))


def is_homogeneous(ident: HIdentity, n: int) -> bool:
    """True when every lhs word and rhs monomial has total degree n."""
    return ident.lhs.word_lengths() <= {n} and ident.rhs.word_lengths() <= {n}


def identity_to_string(ident: HIdentity) -> str:
    """Canonical textual form, h(<expr>) = <expr in H symbols>."""
    return f"h({to_string(ident.lhs)}) = {to_string(ident.rhs, h_heads=True)}"


def parse_identity(text: str, mode: str) -> HIdentity:
    """Inverse of identity_to_string for the given lhs mode.

    The denominator badge of a parsed identity is the set of primes in the
    coefficient denominators actually present, the minimal sound badge for
    a standalone statement.
    """
    if text.count("=") != 1:
        raise ValueError("identity must contain exactly one '='")
    lhs_text, rhs_text = text.split("=")
    s = lhs_text.strip()
    if not (s.startswith("h") and s[1:].lstrip().startswith("(") and s.endswith(")")):
        raise ValueError("left side must have the form h(<expr>)")
    inner = s[1:].lstrip()[1:-1]
    lhs = parse_expr(inner, mode)
    rhs = parse_expr(rhs_text, COMMUTATIVE, h_heads=True)
    primes: set[int] = set()
    for poly in (lhs, rhs):
        for _, c in poly.terms:
            primes |= prime_factors(c.denominator)
    return HIdentity(lhs, rhs, frozenset(primes))


@dataclass(frozen=True)
class EvalReport:
    """Outcome of checking one identity against a concrete model."""

    ok: bool
    checked: int
    space: int
    exhaustive: bool
    witness: dict[str, list[int]] | None = None


def _scaled(vectors: np.ndarray, coeff: Fraction, modulus: int) -> np.ndarray:
    c = (coeff.numerator * pow(coeff.denominator, -1, modulus)) % modulus
    return (vectors * c) % modulus


def evaluate(
    ident: HIdentity,
    ring_a: "FiniteRing",
    ring_b: "FiniteRing",
    h: "AdditiveMap",
    max_assignments: int = 1_000_000,
    sample_seed: int | None = None,
) -> EvalReport:
    """Check an identity for one additive map between finite rings.

    Assignments of ring_a elements to the identity's variables are
    enumerated exhaustively when the assignment space fits under
    ``max_assignments``.  A larger space requires ``sample_seed``; then
    exactly ``max_assignments`` assignments are drawn reproducibly.
    Requires a commutative codomain in which every recorded denominator
    prime is invertible.
    """
    if not ring_b.commutative:
        raise ValueError("codomain must be commutative")
    if ident.mode == COMMUTATIVE and not ring_a.commutative:
        raise ValueError("commutative-mode identity needs a commutative domain")
    if h.domain is not ring_a or h.codomain is not ring_b:
        raise ValueError("map endpoints do not match the given rings")
    m = ring_b.modulus
    if ring_a.modulus != m:
        raise ValueError("domain and codomain must share a modulus")
    for p in sorted(ident.denominators):
        if p % m == 0 or np.gcd(p, m) != 1:
            raise ValueError(f"denominator prime {p} is not invertible modulo {m}")

    variables = sorted(set(ident.lhs.variables()) | set(ident.rhs.variables()))
    k = len(variables)
    size = ring_a.size
    space = size ** k if k else 1
    if space <= max_assignments:
        grids = np.meshgrid(*(np.arange(size) for _ in range(k)), indexing="ij")
        idx = np.stack([g.reshape(-1) for g in grids], axis=1) if k else np.zeros((1, 0), dtype=np.int64)
        assign = {v: ring_a.element_vectors()[idx[:, j]] for j, v in enumerate(variables)}
        exhaustive = True
    else:
        if sample_seed is None:
            raise GuardError(
                f"assignment space {space} exceeds cap {max_assignments}; pass sample_seed to sample"
            )
        rng = np.random.default_rng(sample_seed)
        assign = {v: rng.integers(0, m, size=(max_assignments, ring_a.dim)) for v in variables}
        exhaustive = False
    count = next(iter(assign.values())).shape[0] if k else 1

    himg = {v: h.apply_batch(vecs) for v, vecs in assign.items()}
    lhs_val = np.zeros((count, ring_b.dim), dtype=np.int64)
    for word, coeff in ident.lhs.terms:
        wv = assign[word[0]]
        for vid in word[1:]:
            wv = ring_a.mul_batch(wv, assign[vid])
        lhs_val = (lhs_val + _scaled(h.apply_batch(wv), coeff, m)) % m
    rhs_val = np.zeros((count, ring_b.dim), dtype=np.int64)
    for word, coeff in ident.rhs.terms:
        wv = himg[word[0]]
        for vid in word[1:]:
            wv = ring_b.mul_batch(wv, himg[vid])
        rhs_val = (rhs_val + _scaled(wv, coeff, m)) % m

    mismatch = (lhs_val != rhs_val).any(axis=1)
    if not mismatch.any():
        return EvalReport(True, count, space, exhaustive)
    first = int(np.flatnonzero(mismatch)[0])
    witness = {var_name(v): assign[v][first].tolist() for v in variables}
    return EvalReport(False, count, space, exhaustive, witness)
