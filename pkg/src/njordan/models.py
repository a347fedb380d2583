"""Finite rings given by structure constants, and searches over additive maps.

A ring lives on the additive group (Z_m)^d.  Multiplication is the bilinear
extension of a table c[i, j] giving the product of basis vectors e_i * e_j
as a vector of d coefficients.  Associativity is checked on all basis
triples at construction time, so an accepted FiniteRing really is a ring.

Additive maps between two rings over the same modulus are exactly the
(d_B x d_A) matrices over Z_m.  They are enumerated in row-major order
(index 0 is the zero map, the entry at row 0, column 0 is the most
significant digit), which keeps every search reproducible.

These rings serve as finite surrogates: small stand-ins over Z_m for the
real or complex algebras that motivate the example constructions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .errors import GuardError

ENUM_CAP = 10 ** 7
TUPLE_CAP = 10 ** 7
ELEMENT_CAP = 2 ** 22
CONSTRUCTOR_MODULI = (2, 3, 5, 7)
MAX_MATRIX_SIZE = 4


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    p = 2
    while p * p <= n:
        if n % p == 0:
            return False
        p += 1
    return True


def _rref_mod_p(rows: np.ndarray, p: int) -> np.ndarray:
    """Row-reduced basis of the row space over GF(p)."""
    mat = [list(int(x) % p for x in r) for r in rows]
    basis: list[list[int]] = []
    pivots: list[int] = []
    for row in mat:
        for b, piv in zip(basis, pivots):
            f = row[piv]
            if f:
                row = [(x - f * y) % p for x, y in zip(row, b)]
        nz = next((i for i, x in enumerate(row) if x), None)
        if nz is None:
            continue
        inv = pow(row[nz], -1, p)
        row = [(x * inv) % p for x in row]
        basis.append(row)
        pivots.append(nz)
    if not basis:
        return np.zeros((0, rows.shape[1] if rows.ndim == 2 else 0), dtype=np.int64)
    return np.array(basis, dtype=np.int64)


class FiniteRing:
    """Ring on (Z_m)^d defined by a structure constant table."""

    def __init__(self, name: str, modulus: int, struct: np.ndarray):
        struct = np.asarray(struct, dtype=np.int64) % modulus
        if modulus < 2:
            raise ValueError("modulus must be at least 2")
        if struct.ndim != 3 or struct.shape[0] != struct.shape[1] or struct.shape[1] != struct.shape[2]:
            raise ValueError("structure table must have shape (d, d, d)")
        self.name = name
        self.modulus = modulus
        self.struct = struct
        self.dim = struct.shape[0]
        self.size = modulus ** self.dim
        self._check_associativity()
        self.commutative = bool((struct == struct.transpose(1, 0, 2)).all())
        self.unit = self._find_unit()
        self._elements: np.ndarray | None = None
        self._powers: dict[int, np.ndarray] = {}

    def _check_associativity(self) -> None:
        c = self.struct
        left = np.einsum("ijl,lkm->ijkm", c, c) % self.modulus
        right = np.einsum("jkl,ilm->ijkm", c, c) % self.modulus
        if not (left == right).all():
            bad = np.argwhere((left != right).any(axis=3))[0]
            raise ValueError(f"structure table is not associative at basis triple {tuple(int(x) for x in bad)}")

    def _find_unit(self) -> np.ndarray | None:
        if not _is_prime(self.modulus):
            return None
        d, p = self.dim, self.modulus
        # stack the linear conditions u*e_j = e_j and e_i*u = e_i
        rows = []
        rhs = []
        for j in range(d):
            for k in range(d):
                rows.append(self.struct[:, j, k])
                rhs.append(1 if j == k else 0)
        for i in range(d):
            for k in range(d):
                rows.append(self.struct[i, :, k])
                rhs.append(1 if i == k else 0)
        aug = np.concatenate([np.array(rows, dtype=np.int64), np.array(rhs, dtype=np.int64)[:, None]], axis=1)
        red = _rref_mod_p(aug, p)
        sol = np.zeros(d, dtype=np.int64)
        for row in red:
            nz = next((i for i, x in enumerate(row) if x), None)
            if nz is None:
                continue
            if nz == d:
                return None  # inconsistent: no unit
            sol[nz] = row[d] % p
        # verify (handles underdetermined reductions conservatively)
        e = np.eye(d, dtype=np.int64)
        if (self.mul_batch(np.tile(sol, (d, 1)), e) == e).all() and \
           (self.mul_batch(e, np.tile(sol, (d, 1))) == e).all():
            return sol
        return None

    def mul_batch(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Componentwise ring product of two (N, d) batches."""
        return np.einsum("bi,bj,ijk->bk", u % self.modulus, v % self.modulus, self.struct) % self.modulus

    def mul(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        return self.mul_batch(np.asarray(u)[None, :], np.asarray(v)[None, :])[0]

    def element_vectors(self) -> np.ndarray:
        """All elements as an (size, d) array in index order."""
        if self.size > ELEMENT_CAP:
            raise GuardError(f"{self.size} elements exceed the materialization cap {ELEMENT_CAP}")
        if self._elements is None:
            idx = np.arange(self.size, dtype=np.int64)
            cols = [(idx // self.modulus ** (self.dim - 1 - j)) % self.modulus for j in range(self.dim)]
            self._elements = np.stack(cols, axis=1)
        return self._elements

    def index_of(self, vec: np.ndarray) -> int:
        place = self.modulus ** np.arange(self.dim - 1, -1, -1, dtype=np.int64)
        return int((np.asarray(vec, dtype=np.int64) % self.modulus) @ place)

    def element(self, idx: int) -> np.ndarray:
        return np.array(
            [(idx // self.modulus ** (self.dim - 1 - j)) % self.modulus for j in range(self.dim)],
            dtype=np.int64,
        )

    def power_batch(self, vecs: np.ndarray, n: int) -> np.ndarray:
        out = vecs.copy()
        for _ in range(n - 1):
            out = self.mul_batch(out, vecs)
        return out

    def all_powers(self, n: int) -> np.ndarray:
        """n-th powers of every element, cached."""
        if n not in self._powers:
            self._powers[n] = self.power_batch(self.element_vectors(), n)
        return self._powers[n]

    def __repr__(self) -> str:
        return f"FiniteRing({self.name}, m={self.modulus}, d={self.dim})"


def nilpotency_index(ring: FiniteRing, max_k: int = 16) -> int | None:
    """Smallest k with every k-fold product zero, via span growth; None if none."""
    if not _is_prime(ring.modulus):
        raise GuardError("nilpotency index needs a prime modulus")
    basis = np.eye(ring.dim, dtype=np.int64)
    span = basis
    for k in range(2, max_k + 1):
        prods = []
        for i in range(ring.dim):
            e = np.tile(basis[i], (span.shape[0], 1))
            prods.append(ring.mul_batch(e, span))
        new_span = _rref_mod_p(np.concatenate(prods, axis=0), ring.modulus)
        if new_span.shape[0] == 0:
            return k
        if new_span.shape[0] == span.shape[0] and (new_span == _rref_mod_p(span, ring.modulus)).all():
            return None
        span = new_span
    return None


# --- constructors ------------------------------------------------------------


def _guard_modulus(m: int, override: bool) -> None:
    if m not in CONSTRUCTOR_MODULI and not override:
        raise GuardError(f"modulus {m} outside {CONSTRUCTOR_MODULI}; pass override to lift")


def make_zm(m: int, override: bool = False) -> FiniteRing:
    """The ring Z_m."""
    _guard_modulus(m, override)
    struct = np.ones((1, 1, 1), dtype=np.int64)
    return FiniteRing(f"zm:{m}", m, struct)


def product(a: FiniteRing, b: FiniteRing) -> FiniteRing:
    """Direct product with componentwise operations."""
    if a.modulus != b.modulus:
        raise ValueError("factors must share a modulus")
    d = a.dim + b.dim
    struct = np.zeros((d, d, d), dtype=np.int64)
    struct[: a.dim, : a.dim, : a.dim] = a.struct
    struct[a.dim:, a.dim:, a.dim:] = b.struct
    return FiniteRing(f"product({a.name},{b.name})", a.modulus, struct)


def matrix_ring(k: int, m: int, override: bool = False) -> FiniteRing:
    """Full k x k matrices over Z_m; basis e_{ij} in row-major order."""
    if k > MAX_MATRIX_SIZE and not override:
        raise GuardError(f"matrix size {k} exceeds {MAX_MATRIX_SIZE}; pass override to lift")
    _guard_modulus(m, override)
    d = k * k
    struct = np.zeros((d, d, d), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            for q in range(k):
                struct[i * k + j, j * k + q, i * k + q] = 1
    return FiniteRing(f"mat:{k}x{k}@{m}", m, struct)


def strict_upper(k: int, m: int, override: bool = False) -> FiniteRing:
    """Strictly upper triangular k x k matrices over Z_m (nilpotent)."""
    if k > MAX_MATRIX_SIZE and not override:
        raise GuardError(f"matrix size {k} exceeds {MAX_MATRIX_SIZE}; pass override to lift")
    _guard_modulus(m, override)
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    pos = {p: n for n, p in enumerate(pairs)}
    d = len(pairs)
    struct = np.zeros((d, d, d), dtype=np.int64)
    for (i, j), a in pos.items():
        for (p, q), b in pos.items():
            if j == p:
                struct[a, b, pos[(i, q)]] = 1
    return FiniteRing(f"upper:{k}@{m}", m, struct)


def function_ring(base: FiniteRing, npoints: int, override: bool = False) -> FiniteRing:
    """Ring of functions from npoints points into base, with pointwise product."""
    if npoints > 4 and not override:
        raise GuardError(f"{npoints} points exceed 4; pass override to lift")
    if npoints < 1:
        raise ValueError("need at least one point")
    d = base.dim * npoints
    struct = np.zeros((d, d, d), dtype=np.int64)
    for p in range(npoints):
        o = p * base.dim
        struct[o:o + base.dim, o:o + base.dim, o:o + base.dim] = base.struct
    return FiniteRing(f"fun:{base.name},pts:{npoints}", base.modulus, struct)


def truncated_free(letters: int, maxdeg: int, m: int, override: bool = False) -> FiniteRing:
    """Non-unital free algebra on ``letters`` generators, truncated past maxdeg.

    Basis: all words of length 1..maxdeg in graded lexicographic order, with
    concatenation as product and anything longer than maxdeg set to zero.
    """
    _guard_modulus(m, override)
    if letters < 1 or maxdeg < 1:
        raise ValueError("need at least one letter and degree 1")
    words: list[tuple[int, ...]] = []
    frontier: list[tuple[int, ...]] = [()]
    for _ in range(maxdeg):
        frontier = [w + (a,) for w in frontier for a in range(letters)]
        words.extend(frontier)
    if len(words) > 64 and not override:
        raise GuardError(f"{len(words)} basis words exceed 64; pass override to lift")
    pos = {w: i for i, w in enumerate(words)}
    d = len(words)
    struct = np.zeros((d, d, d), dtype=np.int64)
    for w1, i in pos.items():
        for w2, j in pos.items():
            cat = w1 + w2
            if len(cat) <= maxdeg:
                struct[i, j, pos[cat]] = 1
    return FiniteRing(f"freetrunc:{letters}d{maxdeg}@{m}", m, struct)


def truncated_poly(m: int, maxdeg: int, override: bool = False) -> FiniteRing:
    """Unital commutative ring Z_m[e] with e^(maxdeg+1) = 0; basis 1, e, ..., e^maxdeg."""
    _guard_modulus(m, override)
    d = maxdeg + 1
    struct = np.zeros((d, d, d), dtype=np.int64)
    for i in range(d):
        for j in range(d):
            if i + j < d:
                struct[i, j, i + j] = 1
    return FiniteRing(f"nilpoly:{maxdeg}@{m}", m, struct)


def gap_witness_model() -> tuple[FiniteRing, FiniteRing, AdditiveMap]:
    """A cubes-preserving additive map that is not triple-product-preserving.

    Domain: the free algebra on two letters u, v truncated past degree 3,
    over Z_5.  Codomain: Z_5[e] with e^3 = 0.  The map sends a to f(a) * e
    where the functional f reads off the uvu coefficient minus the uuv
    coefficient.  Because f kills every symmetrized word (all orderings of
    a multiset summed), h(a^3) = 0 for every a, and h(a)^3 = f(a)^3 e^3 = 0,
    so h preserves cubes; yet h(u*v*u) = e differs from h(u)h(v)h(u) = 0.
    """
    dom = truncated_free(2, 3, 5)
    cod = truncated_poly(5, 2)
    # basis words of length 3 in graded-lex order start at index 6:
    # uuu=6, uuv=7, uvu=8, uvv=9, vuu=10, vuv=11, vvu=12, vvv=13
    mat = np.zeros((cod.dim, dom.dim), dtype=np.int64)
    mat[1, 8] = 1   # coefficient of uvu
    mat[1, 7] = 4   # minus the coefficient of uuv
    return dom, cod, AdditiveMap(dom, cod, mat)


def ring_from_spec(spec: str, override: bool = False) -> FiniteRing:
    """Parse catalog strings like zm:5, zm:5^2, mat:2x2@2, upper:4@2, fun:upper:4@2,pts:3."""
    s = spec.strip()
    if s.startswith("fun:"):
        body = s[4:]
        if ",pts:" not in body:
            raise ValueError(f"function ring spec needs ,pts:<n>: {spec!r}")
        inner, pts = body.rsplit(",pts:", 1)
        return function_ring(ring_from_spec(inner, override), int(pts), override)
    if s.startswith("zm:"):
        body = s[3:]
        if "^" in body:
            mstr, kstr = body.split("^", 1)
            m, k = int(mstr), int(kstr)
            if k < 1:
                raise ValueError("power must be positive")
            ring = make_zm(m, override)
            for _ in range(k - 1):
                ring = product(ring, make_zm(m, override))
            if k > 1:
                ring.name = f"zm:{m}^{k}"
            return ring
        return make_zm(int(body), override)
    if s.startswith("mat:"):
        body = s[4:]
        shape, mstr = body.split("@", 1)
        r, c = shape.split("x", 1)
        if r != c:
            raise ValueError("matrix rings must be square")
        return matrix_ring(int(r), int(mstr), override)
    if s.startswith("upper:"):
        body = s[6:]
        kstr, mstr = body.split("@", 1)
        return strict_upper(int(kstr), int(mstr), override)
    if s.startswith("freetrunc:"):
        body, mstr = s[10:].split("@", 1)
        lstr, dstr = body.split("d", 1)
        return truncated_free(int(lstr), int(dstr), int(mstr), override)
    if s.startswith("nilpoly:"):
        dstr, mstr = s[8:].split("@", 1)
        return truncated_poly(int(mstr), int(dstr), override)
    raise ValueError(f"unrecognized ring spec {spec!r}")


# --- additive maps -----------------------------------------------------------


class AdditiveMap:
    """Additive (hence Z_m-linear) map between rings with one modulus."""

    def __init__(self, domain: FiniteRing, codomain: FiniteRing, matrix: np.ndarray):
        if domain.modulus != codomain.modulus:
            raise ValueError("domain and codomain must share a modulus")
        matrix = np.asarray(matrix, dtype=np.int64) % domain.modulus
        if matrix.shape != (codomain.dim, domain.dim):
            raise ValueError(f"matrix must be {(codomain.dim, domain.dim)}, got {matrix.shape}")
        self.domain = domain
        self.codomain = codomain
        self.matrix = matrix

    @staticmethod
    def from_index(domain: FiniteRing, codomain: FiniteRing, index: int) -> AdditiveMap:
        m = domain.modulus
        total = codomain.dim * domain.dim
        digits = [(index // m ** (total - 1 - j)) % m for j in range(total)]
        return AdditiveMap(domain, codomain, np.array(digits, dtype=np.int64).reshape(codomain.dim, domain.dim))

    @property
    def index(self) -> int:
        m = self.domain.modulus
        flat = self.matrix.reshape(-1)
        place = m ** np.arange(len(flat) - 1, -1, -1, dtype=object)
        return int(sum(int(x) * int(p) for x, p in zip(flat, place)))

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return (self.matrix @ (np.asarray(vec, dtype=np.int64) % self.domain.modulus)) % self.domain.modulus

    def apply_batch(self, vecs: np.ndarray) -> np.ndarray:
        return (vecs % self.domain.modulus) @ self.matrix.T % self.domain.modulus

    def __eq__(self, other) -> bool:
        if not isinstance(other, AdditiveMap):
            return NotImplemented
        return (self.domain is other.domain and self.codomain is other.codomain
                and (self.matrix == other.matrix).all())

    def __hash__(self) -> int:
        return hash((id(self.domain), id(self.codomain), self.matrix.tobytes()))

    def __repr__(self) -> str:
        return f"AdditiveMap({self.domain.name}->{self.codomain.name}, index={self.index})"


def negation_map(ring: FiniteRing) -> AdditiveMap:
    return AdditiveMap(ring, ring, (-np.eye(ring.dim, dtype=np.int64)) % ring.modulus)


def identity_map(ring: FiniteRing) -> AdditiveMap:
    return AdditiveMap(ring, ring, np.eye(ring.dim, dtype=np.int64))


def transpose_map(k: int, m: int, override: bool = False) -> tuple[FiniteRing, AdditiveMap]:
    """The matrix ring together with its transposition map."""
    ring = matrix_ring(k, m, override)
    mat = np.zeros((ring.dim, ring.dim), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            mat[j * k + i, i * k + j] = 1
    return ring, AdditiveMap(ring, ring, mat)


def enumerate_additive_maps(
    domain: FiniteRing,
    codomain: FiniteRing,
    override: bool = False,
) -> Iterator[AdditiveMap]:
    """All additive maps in row-major index order; guarded by total count."""
    total = domain.modulus ** (domain.dim * codomain.dim)
    if total > ENUM_CAP and not override:
        raise GuardError(
            f"{total} additive maps exceed the enumeration cap {ENUM_CAP}; sample instead or pass override"
        )
    for index in range(total):
        yield AdditiveMap.from_index(domain, codomain, index)


def sample_additive_maps(
    domain: FiniteRing,
    codomain: FiniteRing,
    count: int,
    seed: int = 0,
) -> Iterator[AdditiveMap]:
    """Reproducible uniform sample of additive maps."""
    rng = np.random.default_rng(seed)
    for _ in range(count):
        mat = rng.integers(0, domain.modulus, size=(codomain.dim, domain.dim))
        yield AdditiveMap(domain, codomain, mat)


@dataclass(frozen=True)
class PredicateResult:
    """Outcome of one predicate check, with a witness when it fails."""

    ok: bool
    checked: int
    exhaustive: bool
    witness: tuple[list[int], ...] | None = None

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "checked": self.checked,
            "exhaustive": self.exhaustive,
            "witness": None if self.witness is None else [list(w) for w in self.witness],
        }


def is_n_jordan(
    h: AdditiveMap,
    n: int,
    max_elements: int = TUPLE_CAP,
    sample_seed: int | None = None,
    sample_count: int = 10 ** 4,
) -> PredicateResult:
    """Does h(a^n) = h(a)^n hold for every element a."""
    if n < 1:
        raise ValueError("n must be positive")
    ring_a, ring_b = h.domain, h.codomain
    if ring_a.size <= max_elements:
        elems = ring_a.element_vectors()
        powers = ring_a.all_powers(n)
        exhaustive = True
    else:
        if sample_seed is None:
            raise GuardError(f"{ring_a.size} elements exceed cap {max_elements}; pass sample_seed")
        rng = np.random.default_rng(sample_seed)
        elems = rng.integers(0, ring_a.modulus, size=(sample_count, ring_a.dim))
        powers = ring_a.power_batch(elems, n)
        exhaustive = False
    lhs = h.apply_batch(powers)
    rhs = ring_b.power_batch(h.apply_batch(elems), n)
    bad = (lhs != rhs).any(axis=1)
    if not bad.any():
        return PredicateResult(True, elems.shape[0], exhaustive)
    first = int(np.flatnonzero(bad)[0])
    return PredicateResult(False, elems.shape[0], exhaustive, (elems[first].tolist(),))


def is_n_ring(
    h: AdditiveMap,
    n: int,
    max_tuples: int = TUPLE_CAP,
    sample_seed: int | None = None,
    sample_count: int = 10 ** 4,
) -> PredicateResult:
    """Does h(a_1 ... a_n) = h(a_1) ... h(a_n) hold for all tuples."""
    if n < 2:
        raise ValueError("n must be at least 2")
    ring_a, ring_b = h.domain, h.codomain
    space = ring_a.size ** n
    if space <= max_tuples:
        elems = ring_a.element_vectors()
        grids = np.meshgrid(*(np.arange(ring_a.size) for _ in range(n)), indexing="ij")
        idx = np.stack([g.reshape(-1) for g in grids], axis=1)
        cols = [elems[idx[:, j]] for j in range(n)]
        exhaustive = True
    else:
        if sample_seed is None:
            raise GuardError(f"{space} tuples exceed cap {max_tuples}; pass sample_seed")
        rng = np.random.default_rng(sample_seed)
        cols = [rng.integers(0, ring_a.modulus, size=(sample_count, ring_a.dim)) for _ in range(n)]
        exhaustive = False
    prod = cols[0]
    for c in cols[1:]:
        prod = ring_a.mul_batch(prod, c)
    lhs = h.apply_batch(prod)
    rhs = h.apply_batch(cols[0])
    for c in cols[1:]:
        rhs = ring_b.mul_batch(rhs, h.apply_batch(c))
    bad = (lhs != rhs).any(axis=1)
    if not bad.any():
        return PredicateResult(True, cols[0].shape[0], exhaustive)
    first = int(np.flatnonzero(bad)[0])
    return PredicateResult(False, cols[0].shape[0], exhaustive, tuple(c[first].tolist() for c in cols))


def recheck_jordan_witness(h: AdditiveMap, n: int, element: list[int]) -> bool:
    """Confirm a Jordan-predicate violation with plain integer arithmetic.

    Independent of the vectorized path: multiplies through the structure
    table in pure Python.  Returns True when the witness really violates
    h(a^n) = h(a)^n.
    """
    m = h.domain.modulus

    def ring_mul(ring: FiniteRing, u: list[int], v: list[int]) -> list[int]:
        out = [0] * ring.dim
        for i, ui in enumerate(u):
            if ui == 0:
                continue
            for j, vj in enumerate(v):
                if vj == 0:
                    continue
                for k in range(ring.dim):
                    out[k] = (out[k] + ui * vj * int(ring.struct[i, j, k])) % m
        return out

    def ring_pow(ring: FiniteRing, u: list[int], e: int) -> list[int]:
        out = list(u)
        for _ in range(e - 1):
            out = ring_mul(ring, out, u)
        return out

    def apply(mat: np.ndarray, u: list[int]) -> list[int]:
        return [int(sum(int(mat[r, c]) * u[c] for c in range(len(u))) % m) for r in range(mat.shape[0])]

    a = [int(x) % m for x in element]
    lhs = apply(h.matrix, ring_pow(h.domain, a, n))
    rhs = ring_pow(h.codomain, apply(h.matrix, a), n)
    return lhs != rhs


@dataclass(frozen=True)
class SearchHit:
    index: int
    matrix: list[list[int]]
    details: dict

    def to_json(self) -> dict:
        return {"index": self.index, "matrix": self.matrix, "details": self.details}


PREDICATES = ("jordan_not_ring", "njordan_not_jordan", "njordan_not_nring")


def _predicate(name: str, h: AdditiveMap, n: int) -> tuple[bool, dict]:
    if name == "jordan_not_ring":
        jordan = is_n_jordan(h, 2)
        if not jordan.ok:
            return False, {}
        ring = is_n_ring(h, 2)
        return not ring.ok, {"jordan": jordan.to_json(), "ring": ring.to_json()}
    if name == "njordan_not_jordan":
        nj = is_n_jordan(h, n)
        if not nj.ok:
            return False, {}
        j2 = is_n_jordan(h, 2)
        return not j2.ok, {"njordan": nj.to_json(), "jordan": j2.to_json()}
    if name == "njordan_not_nring":
        nj = is_n_jordan(h, n)
        if not nj.ok:
            return False, {}
        nr = is_n_ring(h, n)
        return not nr.ok, {"njordan": nj.to_json(), "nring": nr.to_json()}
    raise ValueError(f"unknown predicate {name!r}; choose from {PREDICATES}")


def search(
    domain: FiniteRing,
    codomain: FiniteRing,
    n: int,
    predicate: str | Callable[[AdditiveMap], bool] = "jordan_not_ring",
    limit: int = 10,
    sample_count: int | None = None,
    seed: int = 0,
    override: bool = False,
) -> list[SearchHit]:
    """Scan additive maps in deterministic order and collect predicate hits.

    Exhaustive enumeration under the cap; otherwise a seeded sample of
    ``sample_count`` maps.  The first Jordan filter is vectorized across
    chunks of candidate matrices, the survivors get the full predicate.
    """
    total = domain.modulus ** (domain.dim * codomain.dim)
    use_sample = sample_count is not None
    hits: list[SearchHit] = []

    jordan_power = 2 if predicate == "jordan_not_ring" else n

    def candidates() -> Iterator[tuple[int, np.ndarray]]:
        chunk = 4096
        if use_sample:
            rng = np.random.default_rng(seed)
            done = 0
            while done < sample_count:
                take = min(chunk, sample_count - done)
                mats = rng.integers(0, domain.modulus, size=(take, codomain.dim, domain.dim))
                yield done, mats
                done += take
        else:
            if total > ENUM_CAP and not override:
                raise GuardError(f"{total} maps exceed cap {ENUM_CAP}")
            m = domain.modulus
            dtot = codomain.dim * domain.dim
            start = 0
            while start < total:
                take = min(chunk, total - start)
                idx = np.arange(start, start + take, dtype=np.int64)
                digits = np.stack(
                    [(idx // m ** (dtot - 1 - j)) % m for j in range(dtot)], axis=1
                )
                yield start, digits.reshape(take, codomain.dim, domain.dim)
                start += take

    if domain.size > 4096:
        raise GuardError("search domain too large to precompute element powers")
    elems = domain.element_vectors()
    powers = domain.all_powers(jordan_power)

    for base, mats in candidates():
        if callable(predicate):
            passing = np.arange(mats.shape[0])
        else:
            # vectorized first filter: h(a^p) == h(a)^p for all elements
            him = np.einsum("cij,ej->cei", mats, elems) % domain.modulus
            lhs = np.einsum("cij,ej->cei", mats, powers) % domain.modulus
            flat = him.reshape(-1, codomain.dim)
            hflat = him.reshape(-1, codomain.dim)
            for _ in range(jordan_power - 1):
                flat = codomain.mul_batch(flat, hflat)
            rhs = flat.reshape(him.shape)
            passing = np.flatnonzero(((lhs == rhs).all(axis=2)).all(axis=1))
        for c in passing:
            hmap = AdditiveMap(domain, codomain, mats[c])
            if callable(predicate):
                ok, details = bool(predicate(hmap)), {}
            else:
                ok, details = _predicate(predicate, hmap, n)
            if ok:
                hits.append(SearchHit(base + int(c) if not use_sample else hmap.index,
                                      hmap.matrix.tolist(), details))
                if len(hits) >= limit:
                    return hits
    return hits


def find_njordan_maps(
    domain: FiniteRing,
    codomain: FiniteRing,
    n: int,
    limit: int = 64,
    override: bool = False,
) -> list[AdditiveMap]:
    """All (or the first ``limit``) n-Jordan additive maps, exhaustively."""
    total = domain.modulus ** (domain.dim * codomain.dim)
    if total > ENUM_CAP and not override:
        raise GuardError(f"{total} maps exceed cap {ENUM_CAP}")
    out = []
    for h in enumerate_additive_maps(domain, codomain, override=override):
        if is_n_jordan(h, n).ok:
            out.append(h)
            if len(out) >= limit:
                break
    return out


def paper_examples() -> dict:
    """Reproduce the motivating example computations on finite surrogates.

    Every ring here is a finite surrogate: Z_m stand-ins for the real or
    complex algebras of the original constructions.
    """
    report: dict = {
        "note": "finite surrogate models over Z_m stand in for real or complex algebras",
    }

    z5 = make_zm(5)
    neg = negation_map(z5)
    report["negation_on_z5"] = {
        "ring": z5.name,
        "is_3_jordan": is_n_jordan(neg, 3).to_json(),
        "is_2_jordan": is_n_jordan(neg, 2).to_json(),
        "is_4_jordan": is_n_jordan(neg, 4).to_json(),
        "is_2_ring": is_n_ring(neg, 2).to_json(),
    }

    jordan_maps = [h for h in enumerate_additive_maps(z5, z5) if is_n_jordan(h, 2).ok]
    report["jordan_functionals_on_z5"] = {
        "jordan_map_count": len(jordan_maps),
        "all_multiplicative": all(is_n_ring(h, 2).ok for h in jordan_maps),
        "indices": [h.index for h in jordan_maps],
    }

    u42 = strict_upper(4, 2)
    basis = np.eye(u42.dim, dtype=np.int64)
    # basis order: (0,1),(0,2),(0,3),(1,2),(1,3),(2,3), so these are E12, E23, E34
    triple = u42.mul(u42.mul(basis[0], basis[3]), basis[5])
    sampled_all_4jordan = all(
        is_n_jordan(h, 4).ok for h in sample_additive_maps(u42, u42, 10 ** 4, seed=0)
    )
    report["strict_upper_4_2"] = {
        "ring": u42.name,
        "nilpotency_index": nilpotency_index(u42),
        "triple_product_witness": {
            "factors": ["E12", "E23", "E34"],
            "product": triple.tolist(),
            "nonzero": bool(triple.any()),
        },
        "sampled_maps": 10 ** 4,
        "sample_seed": 0,
        "all_sampled_maps_4_jordan": sampled_all_4jordan,
    }

    fun = function_ring(u42, 3)
    report["function_ring_on_3_points"] = {
        "ring": fun.name,
        "dim": fun.dim,
        "nilpotency_index": nilpotency_index(fun),
        "all_4_fold_products_zero": nilpotency_index(fun) == 4,
    }

    mat22 = matrix_ring(2, 2)
    _, transp = transpose_map(2, 2)
    report["transpose_on_mat2_z2"] = {
        "ring": mat22.name,
        "is_2_jordan": is_n_jordan(transp, 2).to_json(),
        "is_2_ring": is_n_ring(transp, 2).to_json(),
        "n_jordan_up_to_6": {str(n): is_n_jordan(transp, n).ok for n in range(2, 7)},
    }
    return report
