"""Constructions on (N)matrices: powers, strict products, translation images,
canonical two-valued extensions, valuation merging, value purging.

Power and product values are named by their printed tuples ("(a,b)"), kept in
lexicographic order of the printed names, so constructed systems serialize
reproducibly.
"""

from __future__ import annotations

import itertools
import os
from typing import Iterable, Mapping, Optional, Sequence

from .semantics import MatrixError, Nmatrix, PartialValuation
from .syntax import (
    Formula,
    Signature,
    Translation,
    canon_sort,
    is_subformula_closed,
    skeleton,
    text,
)

__all__ = [
    "SizeCapExceeded",
    "size_cap",
    "power",
    "strict_product",
    "translate_matrix",
    "canonical_matrix",
    "merge_valuations",
    "CompatibilityError",
    "restrict_values",
    "matrices_equal",
]

DEFAULT_SIZE_CAP = 10000


class SizeCapExceeded(MatrixError):
    """A construction would exceed the configured value-count cap."""


class CompatibilityError(ValueError):
    """Two component valuations disagree on designation somewhere."""

    def __init__(self, phi: Formula):
        super().__init__(f"valuations incompatible at {text(phi)}")
        self.formula = phi


def size_cap(explicit: Optional[int] = None) -> int:
    if explicit is not None:
        return explicit
    env = os.environ.get("NMFIB_SIZE_CAP")
    return int(env) if env else DEFAULT_SIZE_CAP


def _tuple_name(parts: Sequence[str]) -> str:
    return "(" + ",".join(parts) + ")"


def power(matrix: Nmatrix, n: int, cap: Optional[int] = None) -> Nmatrix:
    """The n-power: values are n-tuples acting coordinatewise.

    The n-power is n-saturated and defines the same consequence relation as
    the matrix itself, which is what makes finite powers usable stand-ins
    for the idealized limit construction.
    """
    if n < 1:
        raise MatrixError("power needs n >= 1")
    if n == 1:
        return matrix
    total = len(matrix.values) ** n
    if total > size_cap(cap):
        raise SizeCapExceeded(f"{total} values exceeds cap {size_cap(cap)}")
    tuples = sorted(itertools.product(matrix.values, repeat=n), key=_tuple_name)
    name_of = {t: _tuple_name(t) for t in tuples}
    designated = [name_of[t] for t in tuples if all(v in matrix.designated for v in t)]
    interp: dict[str, dict[tuple[str, ...], tuple[str, ...]]] = {}
    for conn, arity in matrix.signature.connectives:
        cells = {}
        for args in itertools.product(tuples, repeat=arity):
            per_coord = [
                matrix.cell(conn, tuple(arg[i] for arg in args)) for i in range(n)
            ]
            outs = [name_of[t] for t in itertools.product(*per_coord)]
            cells[tuple(name_of[a] for a in args)] = tuple(outs)
        interp[conn] = cells
    label = f"{matrix.name}^{n}" if matrix.name else ""
    return Nmatrix(
        matrix.signature,
        [name_of[t] for t in tuples],
        designated,
        interp,
        name=label,
        saturated=matrix.saturated,
    )


def strict_product(m1: Nmatrix, m2: Nmatrix, cap: Optional[int] = None) -> Nmatrix:
    """The strict product over disjoint signatures.

    Values are the pairs agreeing on designation; a connective from either
    side constrains its own coordinate and leaves the other free within the
    value set.
    """
    if not m1.signature.disjoint_from(m2.signature):
        raise MatrixError("strict product needs disjoint signatures")
    d1, d2 = m1.designated, m2.designated
    u1 = [v for v in m1.values if v not in d1]
    u2 = [v for v in m2.values if v not in d2]
    if not (d1 and d2 and u1 and u2):
        raise MatrixError("strict product needs non-degenerate components")
    pairs = [(a, b) for a in m1.values if a in d1 for b in m2.values if b in d2]
    pairs += [(a, b) for a in u1 for b in u2]
    if len(pairs) > size_cap(cap):
        raise SizeCapExceeded(f"{len(pairs)} values exceeds cap {size_cap(cap)}")
    pairs.sort(key=_tuple_name)
    name_of = {p: _tuple_name(p) for p in pairs}
    by_first: dict[str, list[tuple[str, str]]] = {}
    by_second: dict[str, list[tuple[str, str]]] = {}
    for p in pairs:
        by_first.setdefault(p[0], []).append(p)
        by_second.setdefault(p[1], []).append(p)
    designated = [name_of[p] for p in pairs if p[0] in d1]
    interp: dict[str, dict[tuple[str, ...], tuple[str, ...]]] = {}
    for side, matrix, pick, coord in (
        (0, m1, by_first, 0),
        (1, m2, by_second, 1),
    ):
        for conn, arity in matrix.signature.connectives:
            cells = {}
            for args in itertools.product(pairs, repeat=arity):
                own = matrix.cell(conn, tuple(a[coord] for a in args))
                outs = [name_of[p] for v in own for p in pick.get(v, ())]
                cells[tuple(name_of[a] for a in args)] = tuple(outs)
            interp[conn] = cells
    label = ""
    if m1.name and m2.name:
        label = f"{m1.name}*{m2.name}"
    return Nmatrix(
        m1.signature.union(m2.signature),
        [name_of[p] for p in pairs],
        designated,
        interp,
        name=label,
        saturated=m1.saturated and m2.saturated,
    )


def translate_matrix(matrix: Nmatrix, t: Translation) -> Nmatrix:
    """The matrix over the translation's source signature whose connectives
    are interpreted by evaluating their derived-connective bodies.

    Refused for properly non-deterministic input: evaluating a derived
    connective over an Nmatrix does not induce a well-defined cell map.
    """
    if not matrix.deterministic():
        raise MatrixError("translation image is only defined for deterministic matrices")

    def eval_body(phi: Formula, env: Mapping[str, str]) -> str:
        from .syntax import Var

        if isinstance(phi, Var):
            return env[phi.name]
        args = tuple(eval_body(a, env) for a in phi.args)
        return matrix.cell(phi.head, args)[0]

    interp: dict[str, dict[tuple[str, ...], tuple[str, ...]]] = {}
    for conn, arity in t.source.connectives:
        body = t.body(conn)
        cells = {}
        for args in itertools.product(matrix.values, repeat=arity):
            env = {f"p{i + 1}": v for i, v in enumerate(args)}
            cells[args] = (eval_body(body, env),)
        interp[conn] = cells
    return Nmatrix(
        t.source,
        matrix.values,
        matrix.designated,
        interp,
        name=f"{matrix.name}^t" if matrix.name else "",
        saturated=matrix.saturated,
    )


def canonical_matrix(kind: str, conn: str, arity: int) -> Nmatrix:
    """Two-valued matrix of a top-like, bottom-like, or unrestrained connective."""
    outs = {"top": ("1",), "bottom": ("0",), "unrestrained": ("0", "1")}
    if kind not in outs:
        raise MatrixError(f"unknown canonical kind {kind!r}")
    cells = {
        args: outs[kind]
        for args in itertools.product(("0", "1"), repeat=arity)
    }
    return Nmatrix(
        Signature.of({conn: arity}),
        ("0", "1"),
        ("1",),
        {conn: cells},
        name=f"{kind}_{conn}",
        saturated=kind != "bottom" or arity == 0,
    )


def merge_valuations(
    v1: PartialValuation,
    v2: PartialValuation,
    gamma: Iterable[Formula],
    product: Optional[Nmatrix] = None,
) -> PartialValuation:
    """Combine compatible component valuations into one over the product.

    v1 must cover the sigma1-skeletons of gamma and v2 the sigma2-skeletons;
    compatibility means they agree everywhere on designation.  The resulting
    product valuation assigns each formula the pair of its skeleton values.
    """
    gamma = canon_sort(gamma)
    if not is_subformula_closed(gamma):
        raise MatrixError("merge domain is not closed under subformulas")
    m1, m2 = v1.matrix, v2.matrix
    if product is None:
        product = strict_product(m1, m2)
    s1, s2 = m1.signature, m2.signature
    a1, a2 = v1.as_dict(), v2.as_dict()
    out = {}
    for phi in gamma:
        k1, k2 = skeleton(phi, s1), skeleton(phi, s2)
        if k1 not in a1:
            raise MatrixError(f"first valuation misses skeleton {text(k1)}")
        if k2 not in a2:
            raise MatrixError(f"second valuation misses skeleton {text(k2)}")
        left, right = a1[k1], a2[k2]
        if (left in m1.designated) != (right in m2.designated):
            raise CompatibilityError(phi)
        out[phi] = _tuple_name((left, right))
    merged = PartialValuation.of(product, out)
    if not merged.check():
        raise MatrixError("merged assignment does not respect the product cells")
    return merged


def restrict_values(matrix: Nmatrix, keep: Iterable[str]) -> Nmatrix:
    """Purge all values outside `keep`, intersecting every cell.

    Fails if a cell empties out or the result is degenerate.
    """
    keep_set = set(keep)
    values = [v for v in matrix.values if v in keep_set]
    interp: dict[str, dict[tuple[str, ...], tuple[str, ...]]] = {}
    for conn, arity in matrix.signature.connectives:
        cells = {}
        for args in itertools.product(values, repeat=arity):
            out = tuple(v for v in matrix.cell(conn, args) if v in keep_set)
            if not out:
                raise MatrixError(f"purging empties cell {conn}{args}")
            cells[args] = out
        interp[conn] = cells
    return Nmatrix(
        matrix.signature,
        values,
        [v for v in matrix.designated if v in keep_set],
        interp,
        name=matrix.name,
        saturated=False,
    )


def matrices_equal(m1: Nmatrix, m2: Nmatrix) -> bool:
    """Cell-for-cell equality (same values, designation, and interpretation)."""
    return (
        m1.signature == m2.signature
        and m1.values == m2.values
        and m1.designated == m2.designated
        and m1.interp == m2.interp
    )
