import json
import random
from pathlib import Path

import pytest

from nmfib.boolfun import (
    BooleanFunction,
    FragmentSpec,
    standard_fragment,
    standard_function,
)
from nmfib.calculus import builtin_calculus, load_calculus
from nmfib.fibring import (
    CATALOG_IDS,
    Classical,
    No,
    Sequent,
    Subclassical,
    Unknown,
    WitnessNotFound,
    Yes,
    auto_calculus,
    catalog_fragments,
    certify_entailment,
    decide_fc_recovery,
    decide_recovery,
    fibred_semantics,
    k_determinedness_probe,
    phi_t_family,
    reproduce,
    subclassical_witness,
    three_valued_negation_matrix,
    truth_preserving_bot_matrix,
    _random_sequent,
)
from nmfib.semantics import Fails, MatrixError, entails, load_system, two_valued_matrix
from nmfib.boolfun import load_fragment
from nmfib.syntax import Signature, parse, text

SYSTEMS = Path(__file__).resolve().parents[1] / "src" / "nmfib" / "systems"


def test_fibred_semantics_examples():
    f_and, f_and2 = catalog_fragments("two_conj")
    assert len(fibred_semantics(f_and, f_and2, 3).values) == 2  # both saturated

    m5 = fibred_semantics(three_valued_negation_matrix("neg"), three_valued_negation_matrix("sim"), 1)
    assert len(m5.values) == 5

    f_imp, f_bot = catalog_fragments("imp_bot")
    m4 = fibred_semantics(f_imp, f_bot, 2)
    assert len(m4.values) == 4  # implication squared, falsum at power 1

    with pytest.raises(MatrixError):
        fibred_semantics(f_imp, f_imp, 2)


def test_truth_preserving_bot_matrix():
    m4 = truth_preserving_bot_matrix(standard_fragment("imp"))
    assert m4.deterministic()
    assert m4.cell("bot", ()) == ("(1,0)",)
    assert m4.cell("imp", ("(1,0)", "(0,0)")) == ("(0,1)",)
    m4a = truth_preserving_bot_matrix(standard_fragment("and"))
    assert m4a.cell("and", ("(1,0)", "(0,1)")) == ("(0,0)",)
    with pytest.raises(MatrixError):
        truth_preserving_bot_matrix(standard_fragment("coimp"))


def test_decide_recovery_conditions_in_order():
    # when both (a) and (b) would hold, (a) is named first
    f_top = standard_fragment("top")
    f_top2 = FragmentSpec.of({"top2": standard_function("top")})
    v = decide_recovery(f_top, f_top2)
    assert isinstance(v, Classical) and v.condition == "a"


def test_decide_recovery_rejects_overlap():
    with pytest.raises(MatrixError):
        decide_recovery(standard_fragment("or"), standard_fragment("or", "neg"))


def test_projection_connective_disqualifies_condition_c():
    # a falsum plus an affirmation connective is not "a lone falsum plus top-likes"
    f_iff = standard_fragment("iff")
    f_mixed = FragmentSpec.of(
        {"bot": standard_function("bot"), "aff": BooleanFunction.from_string("01", 1)}
    )
    v = decide_recovery(f_iff, f_mixed)
    assert isinstance(v, Subclassical)
    assert v.countermodel.check()


def test_subclassical_witnesses_verify():
    for cid in CATALOG_IDS:
        f1, f2 = catalog_fragments(cid)
        v = decide_recovery(f1, f2)
        if isinstance(v, Subclassical):
            assert v.countermodel.check(), cid
            union = f1.union(f2)
            assert bool(
                entails(two_valued_matrix(union), list(v.witness.premises), v.witness.conclusion)
            ), cid
            refuted = entails(
                fibred_semantics(f1, f2, v.power_used), list(v.witness.premises), v.witness.conclusion
            )
            assert isinstance(refuted, Fails), cid


def test_classical_verdicts_sound_on_random_sequents():
    rng = random.Random(42)
    cases = [
        catalog_fragments("two_conj"),
        catalog_fragments("coimp_top"),
        catalog_fragments("biimp_bot"),
        (
            standard_fragment("and"),
            FragmentSpec.of({"top2": standard_function("top"), "bot2": standard_function("bot")}),
        ),
        (standard_fragment("xor3"), standard_fragment("bot")),
    ]
    for f1, f2 in cases:
        assert isinstance(decide_recovery(f1, f2), Classical)
        sig = f1.signature.union(f2.signature)
        product = fibred_semantics(f1, f2, 2)
        classical = two_valued_matrix(f1.union(f2))
        for _ in range(200):
            gamma, phi = _random_sequent(rng, sig, depth=3, n_vars=3)
            assert bool(entails(product, gamma, phi)) == bool(entails(classical, gamma, phi)), (
                [text(g) for g in gamma],
                text(phi),
            )


def test_countermodels_persist_at_higher_power():
    # a refutation at power n stays a refutation at power n+1
    samples = [
        ("two_disj", ["or(p,q)"], "or2(p,q)"),
        ("two_neg", ["neg(p)"], "sim(p)"),
        ("conj_disj", ["or(p,and(q,r))"], "and(or(p,q),or(p,r))"),
    ]
    for cid, prems_t, goal_t in samples:
        f1, f2 = catalog_fragments(cid)
        sig = f1.signature.union(f2.signature)
        prems = [parse(t, sig) for t in prems_t]
        goal = parse(goal_t, sig)
        for n in (2, 3):
            assert isinstance(entails(fibred_semantics(f1, f2, n), prems, goal), Fails), (cid, n)


def test_certify_entailment_examples():
    f_and, f_and2 = catalog_fragments("two_conj")
    sig = f_and.signature.union(f_and2.signature)
    v = certify_entailment(f_and, f_and2, None, [parse("and(p,q)", sig)], parse("and2(p,q)", sig))
    assert isinstance(v, Yes)

    f_neg, f_sim = catalog_fragments("two_neg")
    s2 = f_neg.signature.union(f_sim.signature)
    v = certify_entailment(f_neg, f_sim, None, [parse("neg(p)", s2)], parse("sim(p)", s2))
    assert isinstance(v, No)
    assert v.countermodel.check()

    f_or, f_or2 = catalog_fragments("two_disj")
    s3 = f_or.signature.union(f_or2.signature)
    v = certify_entailment(
        f_or,
        f_or2,
        builtin_calculus("or_pair"),
        [parse("or(p,or(q,r))", s3)],
        parse("or(p,or2(q,r))", s3),
        universe_depth=1,
    )
    assert isinstance(v, Yes)


def test_certify_with_catalog_matrices():
    # the saturated 3-valued components decide the two-negations failure at power 1
    m1 = three_valued_negation_matrix("neg")
    m2 = three_valued_negation_matrix("sim")
    sig = m1.signature.union(m2.signature)
    v = certify_entailment(m1, m2, None, [parse("neg(p)", sig)], parse("sim(p)", sig), n=1)
    assert isinstance(v, No) and v.power_used == 1
    assert v.countermodel.matrix.values == fibred_semantics(m1, m2, 1).values
    assert v.countermodel.check()


def test_decide_recovery_beyond_the_catalog():
    # the witness machinery succeeds on combinations the catalog never names
    aff = BooleanFunction.from_string("01", 1)
    pairs = [
        (standard_fragment("iff"), standard_fragment("sim", rename={"sim": "neg"})),
        (standard_fragment("xor"), standard_fragment("sim", rename={"sim": "neg"})),
        (standard_fragment("imp"), standard_fragment("iff")),
        (standard_fragment("coimp"), standard_fragment("and")),
        (standard_fragment("thr_3_2"), standard_fragment("bot")),
        (standard_fragment("if3"), standard_fragment("bot")),
        (standard_fragment("xor"), standard_fragment("and")),
        (standard_fragment("xor3"), FragmentSpec.of({"bot1": BooleanFunction.from_string("00", 1)})),
        (standard_fragment("imp"), standard_fragment("and2", rename={"and2": "and"})),
        (FragmentSpec.of({"aff": aff}), standard_fragment("bot")),
    ]
    for f1, f2 in pairs:
        verdict = decide_recovery(f1, f2)
        names = (f1.names(), f2.names())
        if isinstance(verdict, Subclassical):
            assert verdict.countermodel.check(), names
            union = f1.union(f2)
            assert bool(
                entails(
                    two_valued_matrix(union), list(verdict.witness.premises), verdict.witness.conclusion
                )
            ), names
        else:
            assert isinstance(verdict, Classical), names
    # a pure-projection side meets condition (a), which is named first
    v = decide_recovery(FragmentSpec.of({"aff": aff}), standard_fragment("bot"))
    assert isinstance(v, Classical) and v.condition == "a"


def test_certify_consistency():
    # the same query never comes back both Yes and No
    f_or, f_or2 = catalog_fragments("two_disj")
    sig = f_or.signature.union(f_or2.signature)
    queries = [
        ([], "or(p,p)"),
        (["or(p,p)"], "p"),
        (["p"], "or2(p,q)"),
        (["or(p,q)"], "or2(p,q)"),
    ]
    for prems_t, goal_t in queries:
        prems = [parse(t, sig) for t in prems_t]
        goal = parse(goal_t, sig)
        first = certify_entailment(f_or, f_or2, None, prems, goal)
        second = certify_entailment(f_or, f_or2, None, prems, goal)
        assert type(first) is type(second)


def test_certify_unknown_reports_bounds():
    # no calculus knows the coimplication fragment, and the sequent is
    # product-valid, so neither side can decide it
    f_co, f_top = catalog_fragments("coimp_top")
    sig = f_co.signature.union(f_top.signature)
    v = certify_entailment(
        f_co, f_top, None, [parse("coimp(p,q)", sig)], parse("q", sig), step_cap=300
    )
    assert isinstance(v, Unknown)
    assert v.step_cap == 300


def test_fc_recovery():
    assert decide_fc_recovery(standard_fragment("coimp"), standard_fragment("top")).outcome == "Recovered"
    maj_neg = FragmentSpec.of(
        {"thr_3_2": standard_function("thr_3_2"), "neg": standard_function("neg")}
    )
    out = decide_fc_recovery(maj_neg, standard_fragment("top"))
    assert out.outcome == "Recovered" and out.clone == "D"
    with pytest.raises(MatrixError):
        decide_fc_recovery(standard_fragment("or", "neg"), standard_fragment("top"))
    with pytest.raises(MatrixError):
        decide_fc_recovery(standard_fragment("and"), standard_fragment("top"))
    # incomplete union with a UP1 side that pairs with no listed clone
    out = decide_fc_recovery(standard_fragment("or", "coimp"), standard_fragment("top"))
    assert out.outcome == "Recovered" and out.clone == "T0_1"


def test_kdet_probe():
    f_or, f_or2 = catalog_fragments("two_disj")
    hit = k_determinedness_probe(f_or, f_or2, 1, n=3)
    assert hit and hit.countermodel.check()
    f_iff, f_bot1 = catalog_fragments("biimp_bot1")
    assert k_determinedness_probe(f_iff, f_bot1, 1, n=2)
    f_and, f_and2 = catalog_fragments("two_conj")
    assert not k_determinedness_probe(f_and, f_and2, 1, n=2)
    assert not k_determinedness_probe(f_and, f_and2, 2, n=2)


def test_phi_t_family():
    phis, level = phi_t_family(("or", standard_function("or")), ("or2", standard_function("or")), 2, n=3)
    assert len(phis) == 3 and level == 3
    assert text(phis[0]) == "or(or2(p,p),or2(or2(p,p),or2(p,p)))"
    single, _ = phi_t_family(("or", standard_function("or")), ("or2", standard_function("or")), 0, n=2)
    assert len(single) == 1
    # implication has no projective slots, so both arguments carry nestings
    phis2, _ = phi_t_family(("imp", standard_function("imp")), ("neg", standard_function("neg")), 1, n=3)
    assert len(phis2) == 2
    assert text(phis2[0]) == "imp(neg(p),neg(neg(p)))"
    with pytest.raises(ValueError):
        phi_t_family(("and", standard_function("and")), ("neg", standard_function("neg")), 1)
    with pytest.raises(ValueError):
        phi_t_family(("or", standard_function("or")), ("top", standard_function("top")), 1)


def test_witness_machinery_directly():
    f_or, f_bot = standard_fragment("or"), standard_fragment("bot")
    sub = subclassical_witness(f_or, f_bot)
    assert str(sub.witness) in ("or(bot,p) |- p", "or(p,bot) |- p")
    cm = sub.countermodel
    assert cm.check()

    # implication expresses disjunction, so the same failure lifts through it
    f_imp = standard_fragment("imp")
    sub2 = subclassical_witness(f_imp, f_bot)
    assert "imp" in str(sub2.witness)


def test_recovery_sweep_over_single_connective_pairs():
    # every ordered pair drawn from seven standard connectives: classical
    # verdicts agree with the two-valued matrix on sampled sequents, and
    # every subclassical verdict already carries its disagreement proof
    import itertools

    names = ["top", "bot", "neg", "and", "or", "iff", "xor"]
    rng = random.Random(99)
    expected_classical = {
        ("bot", "bot"): "b", ("bot", "and"): "b", ("and", "bot"): "b",
        ("and", "and"): "b", ("bot", "iff"): "c", ("iff", "bot"): "c",
    }
    for n1, n2 in itertools.product(names, repeat=2):
        f1 = FragmentSpec.of({n1: standard_function(n1)})
        f2 = FragmentSpec.of({n2 + "2": standard_function(n2)})
        verdict = decide_recovery(f1, f2)
        if "top" in (n1, n2):
            assert isinstance(verdict, Classical) and verdict.condition == "a", (n1, n2)
        elif (n1, n2) in expected_classical:
            assert isinstance(verdict, Classical), (n1, n2)
            assert verdict.condition == expected_classical[n1, n2], (n1, n2)
        else:
            assert isinstance(verdict, Subclassical), (n1, n2)
        if isinstance(verdict, Classical):
            sig = f1.signature.union(f2.signature)
            product = fibred_semantics(f1, f2, 2)
            classical = two_valued_matrix(f1.union(f2))
            for _ in range(40):
                gamma, phi = _random_sequent(rng, sig, depth=3, n_vars=3)
                assert bool(entails(product, gamma, phi)) == bool(
                    entails(classical, gamma, phi)
                ), (n1, n2)


def test_fallback_sequent_search_finds_witnesses():
    from nmfib.fibring import _fallback_search, _classically_valid

    f_or, f_bot = standard_fragment("or"), standard_fragment("bot")
    union = f_or.union(f_bot)
    product = fibred_semantics(f_or, f_bot, 2)
    hit = None
    for seq in _fallback_search(f_or, f_bot, union, 2):
        if not _classically_valid(union, seq):
            continue
        if isinstance(entails(product, list(seq.premises), seq.conclusion), Fails):
            hit = seq
            break
    assert hit is not None
    assert "bot" in str(hit)


def test_reproduce_all_catalog_entries():
    for cid in CATALOG_IDS:
        report = reproduce(cid)
        assert report.passed, "\n".join(report.lines())
    with pytest.raises(KeyError):
        reproduce("nope")


def test_bundled_system_files_load():
    names = sorted(p.name for p in SYSTEMS.glob("*.json"))
    assert names, "bundled systems directory is empty"
    for name in names:
        data = json.loads((SYSTEMS / name).read_text())
        if "connectives" in data:
            load_fragment(data)
        elif "values" in data:
            load_system(data)
        elif "rules" in data:
            load_calculus(data)
        elif "mapping" in data:
            pass  # translation file: checked via the CLI tests
        else:
            raise AssertionError(f"unrecognized bundled file {name}")
