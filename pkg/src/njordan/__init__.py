"""Verification toolkit for additive maps that preserve n-th powers."""

from __future__ import annotations

from .errors import GuardError
from .freealg import (
    ALPHABET,
    COMMUTATIVE,
    NONCOMMUTATIVE,
    FreePoly,
    ParseError,
    abelianize,
    linear_form,
    parse_expr,
    substitute_linear,
    to_string,
)
from .identities import (
    HIdentity,
    combine,
    evaluate,
    identity_to_string,
    is_homogeneous,
    parse_identity,
    seed,
    substitute,
)
from .derivation import (
    BUILTIN_SCRIPTS,
    Certificate,
    DerivationScript,
    InSpan,
    NotInSpan,
    Trace,
    consequence_check,
    generate_instances,
    replay,
    stock_experiments,
    trace_to_json,
    trace_to_text,
    verify_certificate,
)
from .models import (
    AdditiveMap,
    FiniteRing,
    SearchHit,
    gap_witness_model,
    is_n_jordan,
    is_n_ring,
    make_zm,
    matrix_ring,
    paper_examples,
    ring_from_spec,
    search,
    strict_upper,
)
from .cstar_num import (
    DiagAlgebra,
    LinearMapC,
    check_corollary_2_6,
    check_theorem_2_7,
    classify_njordan_functionals,
    op_norm_sup,
    step2_reduction_check,
)

__version__ = "0.1.0"

__all__ = [
    "ALPHABET",
    "AdditiveMap",
    "BUILTIN_SCRIPTS",
    "COMMUTATIVE",
    "Certificate",
    "DerivationScript",
    "DiagAlgebra",
    "FiniteRing",
    "FreePoly",
    "GuardError",
    "HIdentity",
    "InSpan",
    "LinearMapC",
    "NONCOMMUTATIVE",
    "NotInSpan",
    "ParseError",
    "SearchHit",
    "Trace",
    "abelianize",
    "check_corollary_2_6",
    "check_theorem_2_7",
    "classify_njordan_functionals",
    "combine",
    "consequence_check",
    "evaluate",
    "gap_witness_model",
    "generate_instances",
    "identity_to_string",
    "is_homogeneous",
    "is_n_jordan",
    "is_n_ring",
    "linear_form",
    "make_zm",
    "matrix_ring",
    "op_norm_sup",
    "paper_examples",
    "parse_expr",
    "parse_identity",
    "replay",
    "ring_from_spec",
    "search",
    "seed",
    "step2_reduction_check",
    "stock_experiments",
    "strict_upper",
    "substitute",
    "substitute_linear",
    "to_string",
    "trace_to_json",
    "trace_to_text",
    "verify_certificate",
]
