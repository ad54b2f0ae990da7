"""Boolean functions as truth-table bitmasks, connective taxonomy, clone tests.

A k-place function is a 2^k-bit table.  Row i is the argument vector given by
the k-bit big-endian encoding of i (first argument = most significant bit),
and bit i of the mask holds the value on row i.  The string form writes row 0
first, so the classical 'or' is "0111".
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .syntax import (
    Formula,
    Signature,
    SignatureError,
    Var,
    app,
    params,
    parse,
    var,
)

__all__ = [
    "BooleanFunction",
    "Classification",
    "classify",
    "PostPredicates",
    "post_predicates",
    "anf_coefficients",
    "in_clone_top",
    "in_clone_and_top_bot",
    "in_clone_biimp",
    "FragmentSpec",
    "fragment_functions_at_arity_one",
    "fragment_in_clone",
    "CompletenessVerdict",
    "functionally_complete",
    "ClosureBudgetExceeded",
    "clone_closure_at_arity",
    "clone_expressions",
    "find_expression",
    "function_of_formula",
    "nontop_unary_witness",
    "threshold_formula",
    "threshold_function",
    "standard_function",
    "standard_fragment",
    "PRIMITIVE_TABLES",
    "DERIVED_TRANSLATIONS",
    "load_fragment",
    "dump_fragment",
]


@dataclass(frozen=True)
class BooleanFunction:
    arity: int
    bits: int

    def __post_init__(self) -> None:
        rows = 1 << self.arity
        if not 0 <= self.bits < (1 << rows):
            raise ValueError(f"table out of range for arity {self.arity}")

    @staticmethod
    def from_string(s: str, arity: int) -> "BooleanFunction":
        if len(s) != 1 << arity or set(s) - {"0", "1"}:
            raise ValueError(f"table string {s!r} is not {1 << arity} bits")
        bits = 0
        for i, ch in enumerate(s):
            if ch == "1":
                bits |= 1 << i
        return BooleanFunction(arity, bits)

    @staticmethod
    def from_callable(arity: int, fn: Callable[..., int]) -> "BooleanFunction":
        bits = 0
        for row in range(1 << arity):
            if fn(*_row_args(row, arity)):
                bits |= 1 << row
        return BooleanFunction(arity, bits)

    def to_string(self) -> str:
        return "".join("1" if self.bits >> i & 1 else "0" for i in range(1 << self.arity))

    def on_row(self, row: int) -> int:
        return self.bits >> row & 1

    def __call__(self, *args: int) -> int:
        if len(args) != self.arity:
            raise ValueError(f"arity {self.arity} function got {len(args)} arguments")
        return self.on_row(_row_index(args))

    def __str__(self) -> str:
        return self.to_string()


def _row_index(args: Sequence[int]) -> int:
    row = 0
    for a in args:
        row = row << 1 | (1 if a else 0)
    return row


def _row_args(row: int, arity: int) -> tuple[int, ...]:
    return tuple(row >> (arity - 1 - i) & 1 for i in range(arity))


def _projection(arity: int, j: int) -> BooleanFunction:
    """The j-th projection (1-based) at the given arity."""
    bits = 0
    for row in range(1 << arity):
        if row >> (arity - j) & 1:
            bits |= 1 << row
    return BooleanFunction(arity, bits)


def _constant(arity: int, value: int) -> BooleanFunction:
    rows = 1 << arity
    return BooleanFunction(arity, (1 << rows) - 1 if value else 0)


# ---------------------------------------------------------------------------
# Taxonomy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Classification:
    top_like: bool
    bottom_like: bool
    projective_indices: tuple[int, ...]
    projection_conjunction: Optional[tuple[int, ...]]
    significant: bool
    very_significant: bool
    truth_preserving: bool


def classify(f: BooleanFunction) -> Classification:
    rows = 1 << f.arity
    ones = [r for r in range(rows) if f.on_row(r)]
    top = len(ones) == rows
    bottom = not ones
    # j is projective iff f(a)=1 forces a_j=1
    projective = tuple(
        j for j in range(1, f.arity + 1)
        if all(r >> (f.arity - j) & 1 for r in ones)
    )
    # the only candidate J is the projective set itself
    mask = 0
    for j in projective:
        mask |= 1 << (f.arity - j)
    is_pc = all(f.on_row(r) == (1 if r & mask == mask else 0) for r in range(rows))
    pc = projective if is_pc and not bottom else None
    if bottom:
        pc = None
    return Classification(
        top_like=top,
        bottom_like=bottom,
        projective_indices=projective,
        projection_conjunction=pc,
        significant=not top and not bottom,
        very_significant=not bottom and pc is None,
        truth_preserving=bool(f.on_row(rows - 1)),
    )


@dataclass(frozen=True)
class PostPredicates:
    preserves0: bool
    preserves1: bool
    monotone: bool
    affine: bool
    self_dual: bool


def anf_coefficients(f: BooleanFunction) -> int:
    """Moebius transform over GF(2); bit m is the coefficient of monomial m."""
    coeffs = [f.on_row(r) for r in range(1 << f.arity)]
    # rows are big-endian argument vectors; the transform is order-agnostic
    step = 1
    while step < len(coeffs):
        for base in range(0, len(coeffs), step * 2):
            for i in range(base, base + step):
                coeffs[i + step] ^= coeffs[i]
        step *= 2
    bits = 0
    for m, c in enumerate(coeffs):
        if c:
            bits |= 1 << m
    return bits


def post_predicates(f: BooleanFunction) -> PostPredicates:
    rows = 1 << f.arity
    mono = True
    for r in range(rows):
        for j in range(f.arity):
            if not r >> j & 1:
                if f.on_row(r) > f.on_row(r | 1 << j):
                    mono = False
                    break
        if not mono:
            break
    anf = anf_coefficients(f)
    affine = all(not anf >> m & 1 for m in range(rows) if bin(m).count("1") >= 2)
    dual = all(f.on_row(rows - 1 - r) != f.on_row(r) for r in range(rows))
    return PostPredicates(
        preserves0=not f.on_row(0),
        preserves1=bool(f.on_row(rows - 1)),
        monotone=mono,
        affine=affine,
        self_dual=dual,
    )


# ---------------------------------------------------------------------------
# Closed-form clone membership (arity >= 1)
# ---------------------------------------------------------------------------

def in_clone_top(f: BooleanFunction) -> bool:
    """Constant-1 functions and projections: the clone generated by top."""
    if f.arity < 1:
        raise ValueError("0-place functions are handled at fragment level")
    if f.bits == (1 << (1 << f.arity)) - 1:
        return True
    return any(f == _projection(f.arity, j) for j in range(1, f.arity + 1))


def in_clone_and_top_bot(f: BooleanFunction) -> bool:
    """Constant-0, or the conjunction of the arguments in some set J."""
    if f.arity < 1:
        raise ValueError("0-place functions are handled at fragment level")
    rows = 1 << f.arity
    ones = [r for r in range(rows) if f.on_row(r)]
    if not ones:
        return True
    meet = rows - 1
    for r in ones:
        meet &= r
    return all(f.on_row(r) == (1 if r & meet == meet else 0) for r in range(rows))


def in_clone_biimp(f: BooleanFunction) -> bool:
    """Affine and 1-preserving: the clone generated by bi-implication."""
    if f.arity < 1:
        raise ValueError("0-place functions are handled at fragment level")
    p = post_predicates(f)
    return p.affine and p.preserves1


# ---------------------------------------------------------------------------
# Fragments of classical logic
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FragmentSpec:
    """A signature together with a Boolean function for each connective."""

    functions: tuple[tuple[str, BooleanFunction], ...]

    @staticmethod
    def of(items: Mapping[str, BooleanFunction] | Iterable[tuple[str, BooleanFunction]]) -> "FragmentSpec":
        pairs = sorted(items.items()) if isinstance(items, Mapping) else sorted(items)
        return FragmentSpec(tuple(pairs))

    @property
    def signature(self) -> Signature:
        return Signature.of([(name, f.arity) for name, f in self.functions])

    def function(self, name: str) -> BooleanFunction:
        for n, f in self.functions:
            if n == name:
                return f
        raise SignatureError(f"connective {name!r} not in fragment")

    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.functions)

    def union(self, other: "FragmentSpec") -> "FragmentSpec":
        mine = dict(self.functions)
        for n, f in other.functions:
            if n in mine and mine[n] != f:
                raise SignatureError(f"connective {n!r} declared with two different tables")
            mine[n] = f
        return FragmentSpec.of(mine)


def fragment_functions_at_arity_one(frag: FragmentSpec) -> list[tuple[str, BooleanFunction]]:
    """Member functions with 0-place connectives lifted to unary constants."""
    out = []
    for name, f in frag.functions:
        out.append((name, _constant(1, f.bits & 1) if f.arity == 0 else f))
    return out


def fragment_in_clone(frag: FragmentSpec, clone: str) -> bool:
    """Membership of a whole fragment in one of the closed-form clones.

    0-place connectives: value 1 is admitted by every clone here; value 0
    only by the conjunction-with-constants clone.
    """
    tests = {"top": in_clone_top, "and_top_bot": in_clone_and_top_bot, "biimp": in_clone_biimp}
    test = tests[clone]
    for _, f in frag.functions:
        if f.arity == 0:
            if f.bits == 0 and clone != "and_top_bot":
                return False
            continue
        if not test(f):
            return False
    return True


_COATOMS = ("P0", "P1", "A", "M", "D")


@dataclass(frozen=True)
class CompletenessVerdict:
    complete: bool
    witness: Optional[str]
    preserved: tuple[str, ...]


def functionally_complete(frag: FragmentSpec) -> CompletenessVerdict:
    """Post's criterion: complete iff each of the five maximal clones is escaped."""
    preds = [post_predicates(f) for _, f in fragment_functions_at_arity_one(frag)]
    preserved = tuple(
        name for name, get in (
            ("P0", lambda p: p.preserves0),
            ("P1", lambda p: p.preserves1),
            ("A", lambda p: p.affine),
            ("M", lambda p: p.monotone),
            ("D", lambda p: p.self_dual),
        )
        if all(get(p) for p in preds)
    )
    if preserved:
        return CompletenessVerdict(False, preserved[0], preserved)
    return CompletenessVerdict(True, None, ())


# ---------------------------------------------------------------------------
# Clone closure at a fixed arity
# ---------------------------------------------------------------------------

def _compose_bits(g: BooleanFunction, hs: Sequence[int], k: int) -> int:
    """Table of g(h1..hm) as a mask over the 2^k rows.

    Works minterm-wise on g: each satisfying row of g contributes the rows
    where every argument mask agrees with it.
    """
    full = (1 << (1 << k)) - 1
    out = 0
    m = g.arity
    for row_g in range(1 << m):
        if not g.on_row(row_g):
            continue
        acc = full
        for i, h in enumerate(hs):
            acc &= h if row_g >> (m - 1 - i) & 1 else full ^ h
            if not acc:
                break
        out |= acc
    return out


def _compose(g: BooleanFunction, hs: Sequence[BooleanFunction], k: int) -> int:
    return _compose_bits(g, [h.bits for h in hs], k)


def _frontier_tuples(new_item, older: Sequence, m: int):
    """All m-tuples over older+[new_item] containing new_item, each once."""
    for mask in range(1, 1 << m):
        free = [i for i in range(m) if not mask >> i & 1]
        for choice in itertools.product(older, repeat=len(free)):
            tup = [new_item] * m
            for i, val in zip(free, choice):
                tup[i] = val
            yield tup


class ClosureBudgetExceeded(ValueError):
    """The closure fixpoint hit its size or work cap before completing."""


def clone_closure_at_arity(
    generators: Iterable[BooleanFunction],
    k: int,
    cap: int = 70000,
    work_cap: int = 2_000_000,
) -> frozenset[BooleanFunction]:
    """The k-ary slice of the clone generated by the given functions.

    Least set containing the k projections, closed under applying each
    generator to k-ary members; 0-place generators contribute constants.
    """
    if not 1 <= k <= 4:
        raise ValueError("closure arity must be between 1 and 4")
    gens = sorted(set(generators), key=lambda f: (f.arity, f.bits))
    have: set[int] = set()
    order: list[BooleanFunction] = []
    work = 0

    def add(bits: int) -> None:
        if bits not in have:
            have.add(bits)
            order.append(BooleanFunction(k, bits))

    for j in range(1, k + 1):
        add(_projection(k, j).bits)
    for g in gens:
        if g.arity == 0:
            add(_constant(k, g.bits & 1).bits)
    frontier = 0
    while frontier < len(order):
        if len(order) > cap:
            raise ClosureBudgetExceeded(f"clone closure exceeded cap of {cap} functions")
        f_new = order[frontier]
        older = order[:frontier]
        frontier += 1
        for g in gens:
            if g.arity == 0:
                continue
            m = g.arity
            work += (len(older) + 1) ** m - len(older) ** m
            if work > work_cap:
                raise ClosureBudgetExceeded(f"clone closure exceeded work cap of {work_cap}")
            for hs in _frontier_tuples(f_new, older, m):
                add(_compose(g, hs, k))
    return frozenset(order)


def clone_expressions(
    generators: Mapping[str, BooleanFunction],
    k: int,
    targets: Optional[Iterable[int]] = None,
    cap: int = 4096,
) -> dict[int, Formula]:
    """Like clone_closure_at_arity but remembers, per table, one derived
    connective over the generator names (written in p1..pk) that computes it.

    Discovery order, so returned expressions stay small.  Stops early once
    all requested target tables are found; gives up quietly at the cap.
    """
    if not 1 <= k <= 4:
        raise ValueError("closure arity must be between 1 and 4")
    want = set(targets) if targets is not None else None
    found: dict[int, Formula] = {}
    order: list[int] = []

    def add(bits: int, expr: Formula) -> bool:
        if bits not in found:
            found[bits] = expr
            order.append(bits)
        if want is not None and want <= set(found):
            return True
        return False

    for j in range(1, k + 1):
        if add(_projection(k, j).bits, var(f"p{j}")):
            return found
    for name, g in sorted(generators.items()):
        if g.arity == 0:
            if add(_constant(k, g.bits & 1).bits, app(name, ())):
                return found
    frontier = 0
    while frontier < len(order):
        if len(order) > cap:
            break
        bits_new = order[frontier]
        older = order[:frontier]
        frontier += 1
        for name, g in sorted(generators.items()):
            if g.arity == 0:
                continue
            for hs in _frontier_tuples(bits_new, older, g.arity):
                table = _compose_bits(g, hs, k)
                expr = app(name, tuple(found[b] for b in hs))
                if add(table, expr):
                    return found
    return found


def find_expression(frag: FragmentSpec, target: BooleanFunction, cap: int = 4096) -> Optional[Formula]:
    """A derived connective of the fragment computing the target table, if
    one is found within the search cap."""
    gens = dict(frag.functions)
    found = clone_expressions(gens, target.arity, targets=[target.bits], cap=cap)
    return found.get(target.bits)


def function_of_formula(phi: Formula, frag: FragmentSpec, k: int) -> BooleanFunction:
    """The Boolean function of a derived connective phi(p1..pk) over a fragment."""
    allowed = {f"p{i}" for i in range(1, k + 1)}

    def eval_at(psi: Formula, env: dict[str, int]) -> int:
        if isinstance(psi, Var):
            if psi.name not in allowed:
                raise SignatureError(f"variable {psi.name} outside p1..p{k}")
            return env[psi.name]
        f = frag.function(psi.head)
        return f(*(eval_at(a, env) for a in psi.args))

    bits = 0
    for row in range(1 << k):
        env = {f"p{i + 1}": b for i, b in enumerate(_row_args(row, k))}
        if eval_at(phi, env):
            bits |= 1 << row
    return BooleanFunction(k, bits)


def nontop_unary_witness(name: str, f: BooleanFunction) -> Formula:
    """A 1-place non-top-like compound theta over a non-top-like connective.

    Take alpha = c(p,...,p); if that is already non-top-like it is theta.
    Otherwise substitute alpha at the argument positions that are true on a
    falsifying row of f, and p elsewhere.
    """
    cls = classify(f)
    if cls.top_like:
        raise ValueError(f"connective {name!r} is top-like")
    if f.arity < 1:
        raise ValueError("witness needs a connective of arity >= 1")
    p = var("p")
    alpha = app(name, (p,) * f.arity)
    diag = BooleanFunction.from_callable(1, lambda a: f(*(a,) * f.arity))
    if not classify(diag).top_like:
        theta = alpha
    else:
        row = min(r for r in range(1 << f.arity) if not f.on_row(r))
        args = tuple(alpha if bit else p for bit in _row_args(row, f.arity))
        theta = app(name, args)
    # the table of theta must be falsifiable, by construction
    from .syntax import apply_substitution

    renamed = apply_substitution({"p": var("p1")}, theta)
    table = function_of_formula(renamed, FragmentSpec.of({name: f}), 1)
    if classify(table).top_like:
        raise AssertionError("constructed witness is top-like")
    return theta


# ---------------------------------------------------------------------------
# The standard connectives
# ---------------------------------------------------------------------------

PRIMITIVE_TABLES: dict[str, tuple[int, str]] = {
    "top": (0, "1"),
    "bot": (0, "0"),
    "neg": (1, "10"),
    "and": (2, "0001"),
    "or": (2, "0111"),
    "imp": (2, "1101"),
}

# derived connectives; each body may use the primitives and earlier entries
DERIVED_TRANSLATIONS: dict[str, tuple[int, str]] = {
    "coimp": (2, "neg(imp(p2,p1))"),
    "iff": (2, "and(imp(p1,p2),imp(p2,p1))"),
    "xor": (2, "neg(iff(p1,p2))"),
    "xor3": (3, "xor(p1,xor(p2,p3))"),
    "if3": (3, "and(imp(p1,p2),imp(neg(p1),p3))"),
}


def _primitive_fragment() -> FragmentSpec:
    return FragmentSpec.of(
        {name: BooleanFunction.from_string(s, k) for name, (k, s) in PRIMITIVE_TABLES.items()}
    )


def _derivation_fragment() -> FragmentSpec:
    """Primitives plus every derived connective defined before this point."""
    out = {name: BooleanFunction.from_string(s, k) for name, (k, s) in PRIMITIVE_TABLES.items()}
    for name, (k, src) in DERIVED_TRANSLATIONS.items():
        frag = FragmentSpec.of(out)
        out[name] = function_of_formula(parse(src, frag.signature), frag, k)
    return FragmentSpec.of(out)


def threshold_formula(k: int, n: int) -> Formula:
    """thr_k_n as a derived connective over the primitives.

    thr_k_0 is top, thr_k_k is the k-fold conjunction, and in between
    thr_k_n(p1..pk) = (p1 and thr_{k-1}_{n-1}(p2..pk)) or thr_{k-1}_n(p2..pk).
    """
    if not 0 <= n <= k:
        raise ValueError(f"threshold needs 0 <= n <= k, got n={n}, k={k}")

    def build(names: tuple[Var, ...], need: int) -> Formula:
        if need == 0:
            return app("top", ())
        if need == len(names):
            out: Formula = names[-1]
            for v in reversed(names[:-1]):
                out = app("and", (v, out))
            return out
        return app("or", (app("and", (names[0], build(names[1:], need - 1))), build(names[1:], need)))

    return build(params(k), n)


def threshold_function(k: int, n: int) -> BooleanFunction:
    return function_of_formula(threshold_formula(k, n), _primitive_fragment(), k)


def standard_function(name: str) -> BooleanFunction:
    """Table of any standard connective name, including thr_k_n."""
    if name in PRIMITIVE_TABLES:
        k, s = PRIMITIVE_TABLES[name]
        return BooleanFunction.from_string(s, k)
    if name in DERIVED_TRANSLATIONS:
        return _derivation_fragment().function(name)
    if name.startswith("thr_"):
        try:
            _, ks, ns = name.split("_")
            return threshold_function(int(ks), int(ns))
        except ValueError as exc:
            raise SignatureError(f"bad threshold name {name!r}") from exc
    raise SignatureError(f"unknown standard connective {name!r}")


def standard_fragment(*names: str, rename: Optional[Mapping[str, str]] = None) -> FragmentSpec:
    """Fragment built from standard tables, optionally under different names.

    standard_fragment("or2", rename={"or2": "or"}) gives a second copy of
    classical disjunction called or2.
    """
    rename = dict(rename or {})
    out = {}
    for name in names:
        out[name] = standard_function(rename.get(name, name))
    return FragmentSpec.of(out)


# ---------------------------------------------------------------------------
# Fragment files
# ---------------------------------------------------------------------------

def load_fragment(data: Mapping) -> FragmentSpec:
    try:
        conns = data["connectives"]
    except KeyError as exc:
        raise ValueError("fragment file needs a 'connectives' list") from exc
    out = {}
    for c in conns:
        name, arity, table = c["name"], int(c["arity"]), c["table"]
        out[name] = BooleanFunction.from_string(table, arity)
    if not out:
        raise ValueError("fragment file declares no connectives")
    return FragmentSpec.of(out)


def dump_fragment(frag: FragmentSpec) -> dict:
    return {
        "connectives": [
            {"name": name, "arity": f.arity, "table": f.to_string()}
            for name, f in frag.functions
        ]
    }


def load_fragment_file(path: str) -> FragmentSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return load_fragment(json.load(fh))
