"""Shared test machinery: the small-poset corpus, canonical name
environments, and the formula corpus enumerator.

The small-poset corpus is every reflexive-transitive order with a greatest
element on at most five conditions, up to isomorphism (every operation under
test is invariant under renaming conditions, so isomorphism representatives
exhaust the labeled space).  Orders with nontrivial equivalence classes are
included: they are exactly what exercises the separative quotient.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from forcinglab import Poset
from forcinglab.formulas import And, Eq, ExistsIn, ForallIn, Imp, Mem, Not, Or
from forcinglab.names import Name, check_name, generic_name

# ---------------------------------------------------------------------------
# labeled posets
# ---------------------------------------------------------------------------


def _labeled_posets_brute(k: int) -> list[tuple[frozenset[tuple[int, int]], ...]]:
    """All partial orders on range(k) as strict-pair sets, by brute scan."""
    out = []
    pairs = [(i, j) for i in range(k) for j in range(k) if i != j]
    for bits in range(1 << len(pairs)):
        rel = {pairs[t] for t in range(len(pairs)) if bits >> t & 1}
        ok = True
        for (a, b) in rel:
            if (b, a) in rel:
                ok = False
                break
            for c in range(k):
                if (b, c) in rel and (a, c) not in rel:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(frozenset(rel))
    return out


def _extend_posets(base: list[frozenset], k: int) -> list[frozenset]:
    """Posets on range(k+1) from posets on range(k): choose the new element's
    strict down-set and up-set."""
    out = []
    for rel in base:
        downs = []
        ups = []
        for bits in range(1 << k):
            sub = frozenset(i for i in range(k) if bits >> i & 1)
            if all((j, i) not in rel or j in sub for i in sub for j in range(k)):
                downs.append(sub)
            if all((i, j) not in rel or j in sub for i in sub for j in range(k)):
                ups.append(sub)
        for d in downs:
            for u in ups:
                if d & u:
                    continue
                if all((a, b) in rel for a in d for b in u):
                    new = set(rel)
                    new.update((a, k) for a in d)
                    new.update((k, b) for b in u)
                    out.append(frozenset(new))
    return out


@lru_cache(maxsize=None)
def labeled_posets(k: int) -> tuple:
    if k <= 4:
        return tuple(_labeled_posets_brute(k))
    return tuple(_extend_posets(list(labeled_posets(k - 1)), k - 1))


def _partitions(items: tuple[int, ...]):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def _canonical(n: int, leq: set[tuple[int, int]]) -> int:
    best = None
    for perm in itertools.permutations(range(n)):
        code = 0
        for (a, b) in leq:
            code |= 1 << (perm[a] * n + perm[b])
        if best is None or code < best:
            best = code
    return best


@lru_cache(maxsize=None)
def small_posets_with_top(max_n: int = 5) -> tuple[Poset, ...]:
    """Isomorphism representatives of all preorders with a greatest element
    on 1..max_n points."""
    out = []
    for n in range(1, max_n + 1):
        seen = set()
        for part in _partitions(tuple(range(n))):
            blocks = [sorted(b) for b in part]
            k = len(blocks)
            for rel in labeled_posets(k):
                block_of = {}
                for bi, b in enumerate(blocks):
                    for x in b:
                        block_of[x] = bi
                leq = set()
                for i in range(n):
                    for j in range(n):
                        bi, bj = block_of[i], block_of[j]
                        if bi == bj or (bi, bj) in rel:
                            leq.add((i, j))
                tops = [e for e in range(n) if all((x, e) in leq for x in range(n))]
                if not tops:
                    continue
                code = _canonical(n, leq)
                if code in seen:
                    continue
                seen.add(code)
                ids = [f"p{i}" for i in range(n)]
                pairs = [(f"p{a}", f"p{b}") for (a, b) in leq]
                out.append(Poset(f"small{n}x{len(seen)}", ids, f"p{tops[0]}", pairs, closed=True))
    return tuple(out)


# ---------------------------------------------------------------------------
# canonical environments and the formula corpus
# ---------------------------------------------------------------------------

HF0 = frozenset()
HF1 = frozenset([HF0])
HF2 = frozenset([HF0, HF1])


def hf_universe(level: int) -> list[frozenset]:
    """All sets of rank below the level: V_1 = {0}, V_{k+1} = P(V_k)."""
    V = [HF0]
    for _ in range(level - 1):
        V = [
            frozenset(c)
            for r in range(len(V) + 1)
            for c in itertools.combinations(V, r)
        ]
    return V


ENV_NAMES = ("e", "one", "two", "gen", "y", "w")


def canonical_env(P: Poset) -> dict[str, Name]:
    """Six names: three constants, the generic-filter name, and two mixed
    names hung on deterministically chosen conditions."""
    non_top = [c for c in P.ids if c != P.top]
    q1 = non_top[0] if non_top else P.top
    q2 = P.ids[-1]
    e = check_name(HF0, P)
    one = check_name(HF1, P)
    two = check_name(HF2, P)
    y = Name([(e, q1)])
    nested = Name([(e, q2)])
    w = Name([(y, q1), (nested, q2), (one, P.top)])
    return {"e": e, "one": one, "two": two, "gen": generic_name(P), "y": y, "w": w}


def _atoms(terms: tuple[str, ...]) -> list:
    out = []
    for a in terms:
        for b in terms:
            out.append(Mem(a, b))
            out.append(Eq(a, b))
    return out


def _depth2(terms: tuple[str, ...]) -> list:
    atoms = _atoms(terms)
    out = []
    out.extend(Not(a) for a in atoms)
    for a in atoms:
        for b in atoms:
            out.append(And(a, b))
            out.append(Or(a, b))
            out.append(Imp(a, b))
    var_atoms = _atoms(terms + ("v",))
    for t in terms:
        for body in var_atoms:
            out.append(ForallIn("v", t, body))
            out.append(ExistsIn("v", t, body))
    return out


CORPUS_PAIRS = (("e", "gen"), ("y", "w"), ("one", "two"))


def formula_corpus(names: tuple[str, ...] = ENV_NAMES) -> list:
    """Deterministic formula corpus: all atoms and depth-2 formulas over the
    full six-name alphabet, all depth-3 negations, and the depth-3 binaries
    and quantifiers over the designated two-name subalphabets (the full
    depth-3 binary closure over six names is combinatorially out of reach).
    """
    out = list(_atoms(names))
    level2 = _depth2(names)
    out.extend(level2)
    out.extend(Not(f) for f in level2)
    for pair in CORPUS_PAIRS:
        sub_atoms = _atoms(pair)
        sub_l2 = _depth2(pair)
        for f in sub_l2:
            for a in sub_atoms:
                out.append(And(a, f))
                out.append(And(f, a))
                out.append(Or(a, f))
                out.append(Or(f, a))
                out.append(Imp(a, f))
                out.append(Imp(f, a))
        deep_bodies = _depth2(pair + ("v",))
        for t in pair:
            for body in deep_bodies:
                out.append(ForallIn("v", t, body))
                out.append(ExistsIn("v", t, body))
    seen = set()
    unique = []
    for f in out:
        if f not in seen:
            seen.add(f)
            unique.append(f)
    return unique


def quantifier_bounds_small(f, env, cap: int = 64) -> bool:
    """Skip formulas quantifying over an environment name with too many
    entries (the bound's entry list is the quantifier's fan-out)."""
    if isinstance(f, (Mem, Eq)):
        return True
    if isinstance(f, Not):
        return quantifier_bounds_small(f.sub, env, cap)
    if isinstance(f, (And, Or, Imp)):
        return quantifier_bounds_small(f.left, env, cap) and quantifier_bounds_small(
            f.right, env, cap
        )
    if isinstance(f.bound, str) and f.bound in env and len(env[f.bound].entries) > cap:
        return False
    return quantifier_bounds_small(f.body, env, cap)
