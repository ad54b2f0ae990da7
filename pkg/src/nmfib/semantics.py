"""Finite Nmatrices, partial valuations, and decidable consequence.

An Nmatrix interprets each k-place connective by a total map from k-tuples
of truth values to non-empty sets of values; a logical matrix is the
deterministic special case.  Entailment from a finite premise set is decided
on the subformula closure of the sequent: a partial valuation on a
subformula-closed set always extends to the whole language, so a
countermodel found there is a genuine countermodel.

Value ids are opaque strings.  Products and powers (see matrixops) name
their values by the printed tuples, so countermodels round-trip through
report files unchanged.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Sequence, Union

from .syntax import (
    App,
    Formula,
    Signature,
    apply_substitution,
    canon_key,
    canon_sort,
    is_subformula_closed,
    subformula_closure,
    text,
    variables,
)

__all__ = [
    "MatrixError",
    "Nmatrix",
    "PartialValuation",
    "enumerate_partial_valuations",
    "Holds",
    "Fails",
    "Verdict",
    "entails",
    "logically_equivalent",
    "respects_rule",
    "FilteredVerdict",
    "filter_valuations_by_rules",
    "NoCounterexampleFound",
    "SaturationCounterexample",
    "bounded_saturation_check",
    "load_system",
    "dump_system",
    "two_valued_matrix",
]


class MatrixError(ValueError):
    """Ill-formed Nmatrix, or a formula outside the matrix signature."""


Cell = tuple[str, ...]


class Nmatrix:
    """Finite Nmatrix: ordered values, designated subset, cell-complete interp.

    interp[name] maps every tuple of values (of the connective's arity) to a
    non-empty tuple of output values, kept in value order.  `saturated` is a
    knowledge flag used when assembling combined semantics: matrices known
    saturated may be used at power 1.
    """

    def __init__(
        self,
        signature: Signature,
        values: Sequence[str],
        designated: Iterable[str],
        interp: Mapping[str, Mapping[tuple[str, ...], Iterable[str]]],
        name: str = "",
        saturated: bool = False,
        allow_degenerate: bool = False,
    ):
        self.signature = signature
        self.values = tuple(values)
        if len(set(self.values)) != len(self.values):
            raise MatrixError("duplicate value ids")
        self.designated = frozenset(designated)
        if not self.designated <= set(self.values):
            raise MatrixError("designated values not among values")
        self.name = name
        self.saturated = saturated
        if not allow_degenerate:
            if not self.designated:
                raise MatrixError("degenerate matrix: no designated value")
            if self.designated == set(self.values):
                raise MatrixError("degenerate matrix: no undesignated value")
        rank = {v: i for i, v in enumerate(self.values)}
        table: dict[str, dict[Cell, Cell]] = {}
        for conn, arity in signature.connectives:
            if conn not in interp:
                raise MatrixError(f"missing interpretation for {conn!r}")
            cells = {tuple(args): tuple(out) for args, out in interp[conn].items()}
            fixed: dict[Cell, Cell] = {}
            for args in itertools.product(self.values, repeat=arity):
                out = cells.get(args)
                if out is None:
                    raise MatrixError(f"missing cell {conn}{args}")
                if not out:
                    raise MatrixError(f"empty cell {conn}{args}")
                if set(out) - set(self.values):
                    raise MatrixError(f"cell {conn}{args} mentions unknown values")
                fixed[args] = tuple(sorted(set(out), key=rank.get))
            if len(cells) != len(fixed):
                raise MatrixError(f"interpretation of {conn!r} lists cells outside the value set")
            table[conn] = fixed
        self.interp = table

    @property
    def undesignated(self) -> frozenset[str]:
        return frozenset(self.values) - self.designated

    def cell(self, conn: str, args: Sequence[str]) -> Cell:
        return self.interp[conn][tuple(args)]

    def deterministic(self) -> bool:
        return all(len(out) == 1 for cells in self.interp.values() for out in cells.values())

    def unitary(self) -> bool:
        return len(self.designated) == 1

    def check_formulas(self, phis: Iterable[Formula]) -> None:
        from .syntax import check_well_formed

        for phi in phis:
            try:
                check_well_formed(phi, self.signature)
            except Exception as exc:
                raise MatrixError(str(exc)) from exc

    def __repr__(self) -> str:
        label = self.name or "Nmatrix"
        return f"<{label}: {len(self.values)} values, {len(self.signature.connectives)} connectives>"


@dataclass(frozen=True)
class PartialValuation:
    """An assignment on a subformula-closed domain respecting every cell."""

    matrix: Nmatrix
    assignment: tuple[tuple[Formula, str], ...]

    @staticmethod
    def of(matrix: Nmatrix, mapping: Mapping[Formula, str]) -> "PartialValuation":
        items = tuple(sorted(mapping.items(), key=lambda kv: canon_key(kv[0])))
        return PartialValuation(matrix, items)

    def as_dict(self) -> dict[Formula, str]:
        return dict(self.assignment)

    @property
    def domain(self) -> tuple[Formula, ...]:
        return tuple(phi for phi, _ in self.assignment)

    def value(self, phi: Formula) -> str:
        for psi, v in self.assignment:
            if psi == phi:
                return v
        raise KeyError(f"{text(phi)} not in valuation domain")

    def designates(self, phi: Formula) -> bool:
        return self.value(phi) in self.matrix.designated

    def check(self) -> bool:
        """Re-verify: domain subformula-closed, every compound inside its cell."""
        mapping = self.as_dict()
        if not is_subformula_closed(mapping):
            return False
        for phi, v in mapping.items():
            if v not in self.matrix.values:
                return False
            if isinstance(phi, App):
                args = tuple(mapping[a] for a in phi.args)
                if v not in self.matrix.cell(phi.head, args):
                    return False
        return True

    def lines(self) -> list[str]:
        return [f"{text(phi)} |-> {v}" for phi, v in self.assignment]


def _assignment_order(
    domain: Sequence[Formula],
    favored: Sequence[Formula] = (),
) -> list[Formula]:
    """Topological order on the domain (subformulas first), scheduling each
    favored formula as early as its subformulas allow.  Constraint-carrying
    formulas placed early let the search prune whole branches at once.
    """
    domain_set = set(domain)
    emitted: list[Formula] = []
    seen: set[Formula] = set()

    def emit(phi: Formula) -> None:
        if phi in seen:
            return
        if isinstance(phi, App):
            for a in sorted(phi.args, key=canon_key):
                if a in domain_set:
                    emit(a)
        seen.add(phi)
        emitted.append(phi)

    for phi in favored:
        if phi in domain_set:
            emit(phi)
    for phi in canon_sort(domain):
        emit(phi)
    return emitted


def _search(
    matrix: Nmatrix,
    domain: Sequence[Formula],
    must_designate: Iterable[Formula],
    must_undesignate: Iterable[Formula],
    extra_check=None,
) -> Iterator[dict[Formula, str]]:
    """All assignments on the domain respecting cells and the designation
    constraints, in canonical DFS order.  extra_check(phi, partial) may veto
    a branch right after phi is assigned."""
    des = set(must_designate)
    undes = set(must_undesignate)
    order = _assignment_order(domain, favored=canon_sort(des | undes))
    allowed_base: dict[Formula, Optional[Cell]] = {}
    for phi in order:
        pool: Optional[Cell] = None
        if phi in des and phi in undes:
            return
        if phi in des:
            pool = tuple(v for v in matrix.values if v in matrix.designated)
        elif phi in undes:
            pool = tuple(v for v in matrix.values if v not in matrix.designated)
        allowed_base[phi] = pool

    assignment: dict[Formula, str] = {}

    def choices(phi: Formula) -> Cell:
        if isinstance(phi, App):
            args = tuple(assignment[a] for a in phi.args)
            cell = matrix.cell(phi.head, args)
        else:
            cell = matrix.values
        pool = allowed_base[phi]
        if pool is None:
            return cell
        return tuple(v for v in cell if v in pool)

    def walk(i: int) -> Iterator[dict[Formula, str]]:
        if i == len(order):
            yield dict(assignment)
            return
        phi = order[i]
        for v in choices(phi):
            assignment[phi] = v
            if extra_check is None or extra_check(phi, assignment):
                yield from walk(i + 1)
            del assignment[phi]

    yield from walk(0)


def enumerate_partial_valuations(matrix: Nmatrix, gamma: Iterable[Formula]) -> Iterator[PartialValuation]:
    """All Gamma-partial valuations, in canonical DFS order."""
    domain = canon_sort(gamma)
    if not is_subformula_closed(domain):
        raise MatrixError("domain is not closed under subformulas")
    matrix.check_formulas(domain)
    for assignment in _search(matrix, domain, (), ()):
        yield PartialValuation.of(matrix, assignment)


@dataclass(frozen=True)
class Holds:
    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Fails:
    countermodel: PartialValuation

    def __bool__(self) -> bool:
        return False


Verdict = Union[Holds, Fails]


def entails(matrix: Nmatrix, premises: Iterable[Formula], conclusion: Formula) -> Verdict:
    """Decide premises |- conclusion over the matrix.

    Fails carries a partial valuation on the subformula closure of the
    sequent that designates every premise and undesignates the conclusion.
    """
    premises = canon_sort(premises)
    matrix.check_formulas(premises + [conclusion])
    domain = subformula_closure(premises + [conclusion])
    for assignment in _search(matrix, domain, premises, [conclusion]):
        return Fails(PartialValuation.of(matrix, assignment))
    return Holds()


def logically_equivalent(matrix: Nmatrix, gamma: Iterable[Formula], delta: Iterable[Formula]) -> bool:
    gamma = canon_sort(gamma)
    delta = canon_sort(delta)
    return all(bool(entails(matrix, gamma, d)) for d in delta) and all(
        bool(entails(matrix, delta, g)) for g in gamma
    )


def _rule_instances(rule, universe: Sequence[Formula]):
    """All substitutions of the rule's schematic variables into the universe,
    in canonical order; yields (premise instances, conclusion instance)."""
    names = sorted({v.name for phi in (*rule.premises, rule.conclusion) for v in variables(phi)})
    pool = canon_sort(universe)
    for values in itertools.product(pool, repeat=len(names)):
        sigma = dict(zip(names, values))
        yield (
            tuple(apply_substitution(sigma, p) for p in rule.premises),
            apply_substitution(sigma, rule.conclusion),
        )


def respects_rule(valuation: PartialValuation, rule, universe: Iterable[Formula]) -> bool:
    """Bounded check: does the valuation respect the rule for every
    substitution into the universe whose instance lies in its domain?

    True only certifies respect *within the universe*.
    """
    mapping = valuation.as_dict()
    des = valuation.matrix.designated
    for prem, concl in _rule_instances(rule, canon_sort(universe)):
        inside = all(p in mapping for p in prem) and concl in mapping
        if not inside:
            continue
        if all(mapping[p] in des for p in prem) and mapping[concl] not in des:
            return False
    return True


@dataclass(frozen=True)
class FilteredVerdict:
    verdict: Verdict
    exactness: str  # "exact" or "heuristic"

    def __bool__(self) -> bool:
        return bool(self.verdict)


def filter_valuations_by_rules(
    matrix: Nmatrix,
    rules: Sequence,
    premises: Iterable[Formula],
    conclusion: Formula,
    universe: Optional[Iterable[Formula]] = None,
    saturated: bool = False,
) -> FilteredVerdict:
    """Entailment over the partial valuations respecting every rule within
    the universe.

    The result is semantically exact when the caller declares the matrix
    saturated or when the rules are all axioms; otherwise it is tagged as a
    heuristic (rule-respect is only checked within the universe).
    """
    premises = canon_sort(premises)
    matrix.check_formulas(premises + [conclusion])
    exact = saturated or all(not r.premises for r in rules)
    if universe is None:
        universe = subformula_closure(premises + [conclusion])
    universe = canon_sort(universe)

    instances = []
    for rule in rules:
        for prem, concl in _rule_instances(rule, universe):
            instances.append((prem, concl))
    domain = subformula_closure(
        premises + [conclusion] + [f for prem, concl in instances for f in (*prem, concl)]
    )

    # index each instance at the point its last formula gets assigned
    order = _assignment_order(domain, favored=canon_sort(set(premises) | {conclusion}))
    position = {phi: i for i, phi in enumerate(order)}
    by_last: dict[Formula, list] = {}
    for prem, concl in instances:
        last = max((*prem, concl), key=lambda f: position[f])
        by_last.setdefault(last, []).append((prem, concl))

    des = matrix.designated

    def check(phi: Formula, assignment: dict[Formula, str]) -> bool:
        for prem, concl in by_last.get(phi, ()):
            if all(assignment[p] in des for p in prem) and assignment[concl] not in des:
                return False
        return True

    for assignment in _search(matrix, domain, premises, [conclusion], extra_check=check):
        v = PartialValuation.of(matrix, assignment)
        return FilteredVerdict(Fails(v), "exact" if exact else "heuristic")
    return FilteredVerdict(Holds(), "exact" if exact else "heuristic")


@dataclass(frozen=True)
class NoCounterexampleFound:
    def __bool__(self) -> bool:
        return False


@dataclass(frozen=True)
class SaturationCounterexample:
    gamma: tuple[Formula, ...]
    delta: tuple[Formula, ...]

    def __bool__(self) -> bool:
        return True


def bounded_saturation_check(
    matrix: Nmatrix,
    k: int,
    gamma_pool: Iterable[Formula],
    delta_pool: Iterable[Formula],
):
    """Search the pools for a refutation of k-saturation.

    A counterexample is a pair (Gamma, Delta) with |Delta| <= k such that
    Gamma fails to entail each member of Delta separately, yet no single
    valuation designates Gamma while undesignating all of Delta.  Finding
    none proves nothing (the check is bounded).
    """
    gpool = canon_sort(gamma_pool)
    dpool = canon_sort(delta_pool)
    matrix.check_formulas(gpool + dpool)
    gamma_subsets = [
        list(c) for size in range(len(gpool) + 1) for c in itertools.combinations(gpool, size)
    ]
    for size in range(2, min(k, len(dpool)) + 1):
        for delta in itertools.combinations(dpool, size):
            for gamma in gamma_subsets:
                if any(f in gamma for f in delta):
                    continue
                if any(bool(entails(matrix, gamma, f)) for f in delta):
                    continue
                domain = subformula_closure(gamma + list(delta))
                joint = next(iter(_search(matrix, domain, gamma, delta)), None)
                if joint is None:
                    return SaturationCounterexample(tuple(gamma), tuple(delta))
    return NoCounterexampleFound()


# ---------------------------------------------------------------------------
# System files
# ---------------------------------------------------------------------------

def load_system(data: Mapping, allow_degenerate: bool = False) -> Nmatrix:
    sig = Signature.of([(c["name"], int(c["arity"])) for c in data["signature"]])
    interp: dict[str, dict[tuple[str, ...], tuple[str, ...]]] = {}
    for conn, rows in data["interpretation"].items():
        cells = {}
        for row in rows:
            cells[tuple(row["args"])] = tuple(row["out"])
        interp[conn] = cells
    return Nmatrix(
        sig,
        data["values"],
        data["designated"],
        interp,
        name=data.get("name", ""),
        saturated=bool(data.get("saturated", False)),
        allow_degenerate=allow_degenerate,
    )


def dump_system(matrix: Nmatrix) -> dict:
    out = {
        "signature": [{"name": n, "arity": k} for n, k in matrix.signature.connectives],
        "values": list(matrix.values),
        "designated": sorted(matrix.designated, key=matrix.values.index),
        "interpretation": {
            conn: [
                {"args": list(args), "out": list(outs)}
                for args, outs in sorted(cells.items())
            ]
            for conn, cells in sorted(matrix.interp.items())
        },
    }
    if matrix.name:
        out["name"] = matrix.name
    if matrix.saturated:
        out["saturated"] = True
    return out


def load_system_file(path: str, allow_degenerate: bool = False) -> Nmatrix:
    with open(path, "r", encoding="utf-8") as fh:
        return load_system(json.load(fh), allow_degenerate=allow_degenerate)


def two_valued_matrix(fragment, name: str = "", saturated: Optional[bool] = None) -> Nmatrix:
    """The classical two-valued matrix of a fragment of Boolean connectives."""
    from .boolfun import classify

    interp = {}
    for conn, f in fragment.functions:
        cells = {}
        for row in range(1 << f.arity):
            args = tuple("1" if row >> (f.arity - 1 - i) & 1 else "0" for i in range(f.arity))
            cells[args] = ("1",) if f.on_row(row) else ("0",)
        interp[conn] = cells
    if saturated is None:
        # exact criterion: saturated iff no connective is very significant
        saturated = all(not classify(f).very_significant for _, f in fragment.functions)
    return Nmatrix(
        fragment.signature,
        ("0", "1"),
        ("1",),
        interp,
        name=name,
        saturated=saturated,
    )
