import itertools
import random

import pytest

from forcinglab import InputError
from forcinglab.forcing import FORCES, FORCES_NEGATION, UNDECIDED, decides
from forcinglab.ramsey import (
    ACCEPTS,
    NEITHER,
    REJECTS,
    ClopenPredicate,
    FinFamily,
    LevelColoring,
    LevelTree,
    check_hl_witness,
    clopen_formula,
    gnw_accepts,
    gnw_construct,
    gnw_dichotomy_search,
    gnw_status_bruteforce,
    gnw_verify_horn,
    hl_search,
    hl_witness_exists_bruteforce,
    is_mn_dense,
    is_strong_subtree,
    mathias_pure_decide,
    seq_tree_has_path,
    seq_tree_rank_certificate,
    strong_subtree_assemble,
)
from forcinglab.zoo import mathias_decode, mathias_id, mathias_pure_extension


def _random_family(rng, n):
    members = set()
    for _ in range(rng.randint(1, 8)):
        size = rng.randint(1, 3)
        members.add(frozenset(rng.sample(range(n), size)))
    return FinFamily(n, frozenset(members))


# -- accept / reject --------------------------------------------------------


def test_singletons_accept():
    F = FinFamily(8, frozenset(frozenset([i]) for i in range(8)))
    assert gnw_accepts(F, (), range(8), 1) == ACCEPTS


def test_zero_only_family_rejects_away_from_zero():
    F = FinFamily(6, frozenset([frozenset([0])]))
    assert gnw_accepts(F, (), range(1, 6), 1) == REJECTS


def test_block_size_validation():
    F = FinFamily(4, frozenset([frozenset([0])]))
    with pytest.raises(InputError):
        gnw_accepts(F, (), {0, 1}, 3)


def test_status_matches_bruteforce_form():
    rng = random.Random(20260810)
    for _ in range(250):
        n = rng.randint(3, 7)
        F = _random_family(rng, n)
        a = tuple(sorted(rng.sample(range(n), rng.randint(0, 2))))
        A = tuple(sorted(rng.sample(range(n), rng.randint(1, n))))
        s = rng.randint(1, len(A))
        assert gnw_accepts(F, a, A, s) == gnw_status_bruteforce(F, a, A, s)


def test_accepts_antitone_and_exclusive():
    rng = random.Random(7)
    for _ in range(120):
        n = rng.randint(4, 8)
        F = _random_family(rng, n)
        A = tuple(sorted(rng.sample(range(n), rng.randint(2, n))))
        s = rng.randint(1, len(A) - 1)
        st = gnw_accepts(F, (), A, s)
        assert st in (ACCEPTS, REJECTS, NEITHER)
        sub = A[: len(A) - 1]
        if st == ACCEPTS and len(sub) >= s:
            assert gnw_accepts(F, (), sub, s) == ACCEPTS


# -- dichotomy search --------------------------------------------------------


def test_search_even_singletons():
    F = FinFamily(10, frozenset(frozenset([i]) for i in range(0, 10, 2)))
    assert gnw_verify_horn(F, frozenset([1, 3, 5, 7, 9]), 1, "a")
    result = gnw_dichotomy_search(F, 5, 1)
    assert result is not None
    assert gnw_verify_horn(F, result.H, 1, result.horn)


def test_search_all_m_subsets_gives_horn_b():
    m = 2
    F = FinFamily(6, frozenset(frozenset(c) for c in itertools.combinations(range(6), m)))
    result = gnw_dichotomy_search(F, 4, m)
    assert result is not None and result.horn == "b"
    assert gnw_verify_horn(F, result.H, m, "b")


def test_search_parameter_validation():
    F = FinFamily(4, frozenset([frozenset([0])]))
    with pytest.raises(InputError):
        gnw_dichotomy_search(F, 5, 1)
    with pytest.raises(InputError):
        gnw_dichotomy_search(F, 3, 4)


# -- construction ------------------------------------------------------------


def test_construct_singletons_accepts_empty():
    F = FinFamily(10, frozenset(frozenset([i]) for i in range(10)))
    r = gnw_construct(F, 1, 5)
    assert r.completed and r.horn == "b"
    assert ("decide", (), ACCEPTS) in r.transcript


def test_construct_zero_family_rejection_path():
    F = FinFamily(6, frozenset([frozenset([0])]))
    r = gnw_construct(F, 1, 3)
    assert r.completed and r.horn == "a"
    assert 0 not in r.H
    assert gnw_verify_horn(F, r.H, 1, "a")


def test_construct_transcript_exclusions_audited():
    # replay the rejection walk: each excluded element had a subset of the
    # picks so far whose one-step extension was not rejected over the tail
    rng = random.Random(99)
    audited = 0
    for _ in range(60):
        n = rng.randint(5, 9)
        F = _random_family(rng, n)
        r = gnw_construct(F, 1, 3)
        if not (r.completed and r.horn == "a"):
            continue
        audited += 1
        work = next(e[1] for e in r.transcript if e[0] == "reject-walk")
        rs = []
        for entry in r.transcript:
            if entry[0] == "excluded":
                x = entry[1]
                tail = [y for y in work if y > x]
                if len(tail) < 1:
                    continue  # excluded for lack of a tail
                witnessed = any(
                    gnw_accepts(F, tuple(sorted(sub + (x,))), tail, 1) != REJECTS
                    for k in range(len(rs) + 1)
                    for sub in itertools.combinations(rs, k)
                )
                assert witnessed
            elif entry[0] == "reject-step":
                rs.append(entry[1])
        assert frozenset(rs) == r.H
    assert audited > 0


# -- level trees -------------------------------------------------------------


def test_level_tree_validation():
    T = LevelTree(3)
    assert T.level(2) == ("00", "01", "10", "11")
    with pytest.raises(InputError):
        LevelTree(2, frozenset({"", "0", "00", "11"}))  # 11 missing its parent
    with pytest.raises(InputError):
        LevelTree(2, frozenset({"", "0", "1", "00"}))  # 1 dead-ends early
    pruned = LevelTree(2, frozenset({"", "0", "00", "01"}))
    assert pruned.level(1) == ("0",)


def test_is_mn_dense_examples():
    T = LevelTree(3)
    assert is_mn_dense(T, T.level(3), "", 1, 3)
    assert not is_mn_dense(T, {"000"}, "", 1, 3)
    assert is_mn_dense(T, {"000", "100"}, "", 1, 3)
    assert is_mn_dense(T, {"010"}, "0", 1, 3)  # only one level-1 node above 0... itself
    with pytest.raises(InputError):
        is_mn_dense(T, set(), "", 2, 1)


def test_is_mn_dense_matches_quantifier():
    T = LevelTree(3)
    rng = random.Random(5)
    for _ in range(200):
        m = rng.randint(0, 2)
        n = rng.randint(m, 3)
        D = frozenset(v for v in T.level(n) if rng.random() < 0.5)
        expected = all(
            any(v.startswith(u) for v in D) for u in T.level(m)
        )
        assert is_mn_dense(T, D, "", m, n) == expected


def _coloring(depth, fn, d=1):
    T = LevelTree(depth)
    values = {}
    for l in range(depth + 1):
        for combo in itertools.product(*(T.level(l) for _ in range(d))):
            values[combo] = fn(combo)
    return LevelColoring(d, depth, 2, values)


def test_hl_constant_coloring():
    f = _coloring(3, lambda combo: 0)
    T = LevelTree(3)
    w = hl_search([T], f)
    assert w is not None and w.level == 0
    assert check_hl_witness([T], f, w)


def test_hl_last_bit_coloring():
    f = _coloring(3, lambda combo: int(combo[0][-1]) if combo[0] else 0)
    T = LevelTree(3)
    w = hl_search([T], f)
    assert w is not None
    assert check_hl_witness([T], f, w)


def test_hl_two_trees_sampled():
    rng = random.Random(11)
    T = LevelTree(3)
    for _ in range(25):
        f = _coloring(3, lambda combo: rng.randint(0, 1), d=2)
        w = hl_search([T, T], f)
        assert w is not None
        assert check_hl_witness([T, T], f, w)


def test_hl_search_agrees_with_bruteforce_existence():
    T = LevelTree(2)
    for bits in range(1 << 7):
        nodes = [n for l in range(3) for n in T.level(l)]
        values = {(n,): bits >> i & 1 for i, n in enumerate(nodes)}
        f = LevelColoring(1, 2, 2, values)
        found = hl_search([T], f)
        assert (found is not None) == hl_witness_exists_bruteforce([T], f)
        if found is not None:
            assert check_hl_witness([T], f, found)


def test_hl_checker_rejects_tampering():
    f = _coloring(3, lambda combo: 0)
    T = LevelTree(3)
    w = hl_search([T], f)
    from forcinglab.ramsey import HlRow, HlWitness

    bad_rows = tuple(
        (m, HlRow(row.n, (frozenset(list(row.denses[0])[:1]),), row.color))
        if m == w.level and len(row.denses[0]) > 1
        else (m, row)
        for m, row in w.rows
    )
    tampered = HlWitness(w.level, w.stems, bad_rows)
    # dropping witnesses can break density; flag anything that does
    if tampered != w:
        assert not check_hl_witness([T], f, tampered)


# -- strong subtrees ---------------------------------------------------------


def test_strong_subtree_full_levels():
    T = LevelTree(3)
    st = strong_subtree_assemble(T, "", [T.level(1), T.level(3)], [0, 1, 3])
    assert st.certified
    assert st.base == (0, 1)


def test_strong_subtree_single_step():
    T = LevelTree(2)
    # a one-step dense set rich enough to keep both successors of the stem
    st = strong_subtree_assemble(T, "", [("00", "10", "01", "11")], [1, 2])
    assert st.certified and st.base == (1,)


def test_strong_subtree_density_precondition():
    T = LevelTree(2)
    with pytest.raises(InputError) as err:
        strong_subtree_assemble(T, "", [("00",)], [1, 2])
    assert "dense set 0" in str(err.value)


def test_strong_subtree_certificate_rejects_dropped_successor():
    T = LevelTree(2)
    nodes = frozenset({"", "0", "1", "00", "10"})  # 0 and 1 kept, but 01/11 gone
    ok, failure = is_strong_subtree(T, nodes, "", [1])
    assert not ok
    assert failure[0] == 1


def test_strong_subtree_recheck_from_scratch():
    T = LevelTree(3)
    st = strong_subtree_assemble(T, "0", [("00", "01"), T.level(3)], [1, 2, 3])
    ok, failure = is_strong_subtree(T, st.nodes, st.stem, st.base)
    assert ok == st.certified and (failure is None) == st.certified
    assert st.certified


# -- pure decision -----------------------------------------------------------


def test_pure_decide_spec_examples(mathias6):
    p = mathias_id((), {0, 1, 2, 3})
    X0 = ClopenPredicate(1, frozenset([(0,)]))
    d = mathias_pure_decide(mathias6, p, X0)
    assert not d.forces_membership
    assert mathias_decode(d.condition) == ((), frozenset({1, 2, 3}))
    Xall = ClopenPredicate(0, frozenset([()]))
    dall = mathias_pure_decide(mathias6, mathias6.top, Xall)
    assert dall.forces_membership and dall.condition == mathias6.top


def test_pure_decide_envelope_too_small(mathias6):
    from forcinglab import SizeCapError

    with pytest.raises(SizeCapError):
        mathias_pure_decide(mathias6, mathias_id((0,), {0, 1}), ClopenPredicate(3, frozenset([(1, 2, 3)])))


def test_pure_decide_verified_by_filters(mathias6):
    rng = random.Random(3)
    conditions = [
        c
        for c in mathias6.ids
        if len(mathias_decode(c)[1]) >= len(mathias_decode(c)[0]) + 3
    ]
    prefixes = [()] + [tuple(sorted(s)) for r in (1, 2) for s in itertools.combinations(range(6), r)]
    for _ in range(30):
        accepted = frozenset(p for p in prefixes if rng.random() < 0.3)
        X = ClopenPredicate(2, accepted)
        p = rng.choice(conditions)
        d = mathias_pure_decide(mathias6, p, X)
        assert mathias_pure_extension(d.condition, p)
        phi, env = clopen_formula(mathias6, X)
        verdict = decides(mathias6, d.condition, phi, env)
        assert verdict == (FORCES if d.forces_membership else FORCES_NEGATION)
        # exhaustive check over the reals reachable through the extension
        stem, envl = mathias_decode(d.condition)
        floor = stem[-1] if stem else -1
        beyond = sorted(x for x in envl if x > floor)
        for r in range(len(beyond) + 1):
            for z in itertools.combinations(beyond, r):
                real = frozenset(stem) | frozenset(z)
                if not real:
                    continue
                assert X.member(real) == d.forces_membership


# -- long paths versus rank certificates --------------------------------------


def test_seq_tree_duality():
    rng = random.Random(13)
    for _ in range(60):
        tree = {()}
        for _ in range(rng.randint(0, 60)):
            base = rng.choice(sorted(tree, key=len))
            if len(base) < 6:
                tree.add(base + (rng.randint(0, 2),))
        # close under prefixes
        closed = {t[:i] for t in tree for i in range(len(t) + 1)}
        for n in range(1, 7):
            has = seq_tree_has_path(closed, n)
            cert = seq_tree_rank_certificate(closed, n)
            assert has == (cert is None)
            if cert is not None:
                for s in closed:
                    for t in closed:
                        if len(t) > len(s) and t[: len(s)] == s:
                            assert cert[t] < cert[s] < n
