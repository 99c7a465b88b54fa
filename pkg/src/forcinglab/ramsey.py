"""Finite combinatorial engines: the accept/reject dichotomy for families of
finite sets, the dense-level partition search on products of binary trees,
strong subtree assembly, and pure decision for the finite Mathias order.

Everything infinite in the classical statements is finitized by an explicit
parameter: the block size s stands in for "every infinite subset", search
targets bound the sets produced, and exhaustion of the finite universe is
reported rather than treated as a failure.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .errors import ForcingLabError, InputError, SizeCapError
from .formulas import And, Eq, Formula, Mem, Not, Or
from .forcing import FORCES, FORCES_NEGATION, UNDECIDED, context_for, decides
from .names import Name, check_name, von_neumann
from .poset import Poset
from .zoo import mathias_decode, mathias_id, mathias_pure_extension

# ---------------------------------------------------------------------------
# Accept / reject for families of nonempty finite sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FinFamily:
    """A family of nonempty subsets of {0..universe_size-1}."""

    universe_size: int
    members: frozenset[frozenset[int]]

    def __post_init__(self):
        for m in self.members:
            if not m:
                raise InputError("family members must be nonempty")
            if not all(isinstance(x, int) and 0 <= x < self.universe_size for x in m):
                raise InputError("family members must live inside the universe")

    def has_prefix(self, s: Sequence[int]) -> bool:
        """Does some initial segment of the increasing enumeration of s belong
        to the family?"""
        acc = set()
        for x in sorted(s):
            acc.add(x)
            if frozenset(acc) in self.members:
                return True
        return False


ACCEPTS = "accepts"
REJECTS = "rejects"
NEITHER = "neither"


def gnw_accepts(F: FinFamily, a: Iterable[int], A: Iterable[int], s: int) -> str:
    """Accept/reject status of the pair (a, A) at block size s.

    Accepts: every size-s block drawn from A past max(a) completes a to a set
    with an initial segment in the family.  Rejects: no subset of A of size
    at least s accepts.  The rejection check runs on the equivalent single
    block form (any accepted block is itself an accepting subset); the raw
    quantifier form lives in ``gnw_status_bruteforce``.
    """
    a_t = tuple(sorted(set(a)))
    A_t = tuple(sorted(set(A)))
    if s < 1:
        raise InputError("block size must be at least 1")
    if s > len(A_t):
        raise InputError(f"block size {s} exceeds |A| = {len(A_t)}")
    if _accepts(F, a_t, A_t, s):
        return ACCEPTS
    if _rejects(F, a_t, A_t, s):
        return REJECTS
    return NEITHER


def _accepts(F: FinFamily, a_t: tuple[int, ...], A_t: tuple[int, ...], s: int) -> bool:
    floor = a_t[-1] if a_t else -1
    beyond = [x for x in A_t if x > floor]
    for B in itertools.combinations(beyond, s):
        if not F.has_prefix(a_t + B):
            return False
    return True


def _rejects(F: FinFamily, a_t: tuple[int, ...], A_t: tuple[int, ...], s: int) -> bool:
    # Equivalent single-block form of "no subset of size >= s accepts": any
    # accepted block is itself an accepting subset, and a subset short on
    # elements past max(a) accepts vacuously.
    floor = a_t[-1] if a_t else -1
    beyond = [x for x in A_t if x > floor]
    low = len(A_t) - len(beyond)
    j = min(s - 1, len(beyond))
    if low >= 1 and low + j >= s:
        return False
    for C in itertools.combinations(beyond, s):
        if F.has_prefix(a_t + C):
            return False
    return True


def gnw_status_bruteforce(F: FinFamily, a: Iterable[int], A: Iterable[int], s: int) -> str:
    """Reference form of the status: rejection quantifies over every subset
    of size at least s, verbatim."""
    a_t = tuple(sorted(set(a)))
    A_t = tuple(sorted(set(A)))
    if s < 1 or s > len(A_t):
        raise InputError("block size out of range")
    if _accepts(F, a_t, A_t, s):
        return ACCEPTS
    for r in range(s, len(A_t) + 1):
        for B in itertools.combinations(A_t, r):
            if _accepts(F, a_t, B, s):
                return NEITHER
    return REJECTS


@dataclass(frozen=True)
class GnwSearchResult:
    H: frozenset[int]
    horn: str  # "a": nothing from the family inside H; "b": every big block has a prefix


def gnw_dichotomy_search(
    F: FinFamily, h: int, m: int, ground: Optional[frozenset[int]] = None
) -> Optional[GnwSearchResult]:
    """First H (size h upward, colex within a size) satisfying either horn.

    Horn a: no family member is a subset of H.  Horn b: every B inside H with
    at least m elements has an initial segment in the family.  Returns None
    when no candidate works at this finite scale.
    """
    pool = tuple(sorted(ground)) if ground is not None else tuple(range(F.universe_size))
    if not 1 <= h <= len(pool):
        raise InputError(f"target size {h} out of range for a pool of {len(pool)}")
    if not 1 <= m <= h:
        raise InputError("witness size must satisfy 1 <= m <= h")
    for size in range(h, len(pool) + 1):
        for combo in sorted(itertools.combinations(pool, size), key=lambda t: t[::-1]):
            H = frozenset(combo)
            if all(not mem <= H for mem in F.members):
                return GnwSearchResult(H, "a")
            if _horn_b(F, combo, m):
                return GnwSearchResult(H, "b")
    return None


def _horn_b(F: FinFamily, H: tuple[int, ...], m: int) -> bool:
    for r in range(m, len(H) + 1):
        for B in itertools.combinations(H, r):
            if not F.has_prefix(B):
                return False
    return True


def gnw_verify_horn(F: FinFamily, H: frozenset[int], m: int, horn: str) -> bool:
    """Independent exhaustive check of a search result, bitmask style."""
    elems = sorted(H)
    member_masks = set()
    for mem in F.members:
        mask = 0
        for x in mem:
            mask |= 1 << x
        member_masks.add(mask)
    if horn == "a":
        hmask = 0
        for x in elems:
            hmask |= 1 << x
        for mm in member_masks:
            if mm & ~hmask == 0:
                return False
        return True
    if horn == "b":
        for bits in range(1, 1 << len(elems)):
            if bin(bits).count("1") < m:
                continue
            acc = 0
            good = False
            for i, x in enumerate(elems):
                if bits >> i & 1:
                    acc |= 1 << x
                    if acc in member_masks:
                        good = True
                        break
            if not good:
                return False
        return True
    raise InputError(f"unknown horn {horn!r}")


@dataclass(frozen=True)
class GnwConstructResult:
    H: frozenset[int]
    horn: Optional[str]
    completed: bool
    transcript: tuple[tuple, ...]


def gnw_construct(
    F: FinFamily, s: int, h: int, ground: Optional[frozenset[int]] = None
) -> GnwConstructResult:
    """Shrink-and-decide construction of a dichotomy witness.

    Walks min-first through the pool keeping an available tail that decides
    (at block size s) every subset of the chosen elements, shrinking the tail
    to an accepting subset whenever a pair is undecided.  If the empty set
    ends up accepted the chosen-plus-tail set realizes horn b; otherwise the
    rejection walk picks elements all of whose subsets stay rejected,
    recording at each step the accepting continuations that were excluded.
    Exhausting the pool early yields a partial result with the transcript so
    far.
    """
    pool = tuple(sorted(ground)) if ground is not None else tuple(range(F.universe_size))
    if not 1 <= h <= len(pool):
        raise InputError(f"target size {h} out of range for a pool of {len(pool)}")
    if not 1 <= s <= h:
        raise InputError("block size must satisfy 1 <= s <= h")
    transcript: list[tuple] = []
    avail = list(pool)
    chosen: list[int] = []
    statuses: dict[tuple[int, ...], str] = {}

    def settle(a_t: tuple[int, ...]) -> bool:
        """Make avail decide a_t, shrinking to the largest deciding subset
        when it does not already; False when stuck below the block size."""
        nonlocal avail
        if len(avail) < s:
            return False
        st = gnw_accepts(F, a_t, avail, s)
        if st != NEITHER:
            transcript.append(("decide", a_t, st))
            statuses[a_t] = st
            return True
        for size in range(len(avail) - 1, s - 1, -1):
            for B in itertools.combinations(avail, size):
                if _accepts(F, a_t, B, s):
                    verdict = ACCEPTS
                elif _rejects(F, a_t, B, s):
                    verdict = REJECTS
                else:
                    continue
                avail = list(B)
                transcript.append(("shrink", a_t, frozenset(B), verdict))
                statuses[a_t] = verdict
                return True
        return False

    ok = settle(())
    while ok and len(chosen) < h and avail:
        n = min(avail)
        chosen.append(n)
        avail = [x for x in avail if x > n]
        if len(avail) < s:
            transcript.append(("exhausted", n))
            ok = False
            break
        for r in range(0, len(chosen)):
            for rest in itertools.combinations(chosen[:-1], r):
                a_t = tuple(sorted(rest + (n,)))
                if not settle(a_t):
                    transcript.append(("exhausted", n))
                    ok = False
                    break
            if not ok:
                break
    if not ok or len(chosen) < h:
        return GnwConstructResult(frozenset(chosen) | frozenset(avail), None, False, tuple(transcript))

    base = frozenset(chosen) | frozenset(avail)
    if statuses.get((), None) == ACCEPTS:
        if _horn_b(F, tuple(sorted(base)), s):
            return GnwConstructResult(base, "b", True, tuple(transcript))
        return GnwConstructResult(base, None, False, tuple(transcript))

    # rejection walk inside the decided set
    work = sorted(base)
    transcript.append(("reject-walk", tuple(work)))
    rs: list[int] = []
    while len(rs) < h:
        floor = rs[-1] if rs else -1
        picked = None
        for x in work:
            if x <= floor:
                continue
            tail = [y for y in work if y > x]
            if len(tail) < s:
                continue
            bad = False
            for r in range(0, len(rs) + 1):
                for sub in itertools.combinations(rs, r):
                    a_t = tuple(sorted(sub + (x,)))
                    if gnw_accepts(F, a_t, tail, s) != REJECTS:
                        bad = True
                        break
                if bad:
                    break
            if bad:
                transcript.append(("excluded", x))
                continue
            picked = x
            transcript.append(("reject-step", x))
            break
        if picked is None:
            return GnwConstructResult(frozenset(rs), None, False, tuple(transcript))
        rs.append(picked)
    H = frozenset(rs)
    if all(not mem <= H for mem in F.members):
        return GnwConstructResult(H, "a", True, tuple(transcript))
    return GnwConstructResult(H, None, False, tuple(transcript))


# ---------------------------------------------------------------------------
# Dense level sets on products of binary trees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LevelTree:
    """A binary tree of bounded depth: all 01-strings of length <= depth, or
    an explicit prefix-closed, dead-end-free subset of them."""

    depth: int
    nodes: Optional[frozenset[str]] = None

    def __post_init__(self):
        if self.depth < 0:
            raise InputError("tree depth must be nonnegative")
        if self.nodes is None:
            return
        if "" not in self.nodes:
            raise InputError("a pruned tree still contains the root")
        for node in self.nodes:
            if len(node) > self.depth or set(node) - {"0", "1"}:
                raise InputError(f"bad node {node!r}")
            if node and node[:-1] not in self.nodes:
                raise InputError(f"node {node!r} missing its parent")
            if len(node) < self.depth and not (
                node + "0" in self.nodes or node + "1" in self.nodes
            ):
                raise InputError(f"node {node!r} is a dead end before the last level")

    def __contains__(self, node: str) -> bool:
        if self.nodes is None:
            return len(node) <= self.depth and not set(node) - {"0", "1"}
        return node in self.nodes

    def level(self, l: int) -> tuple[str, ...]:
        if not 0 <= l <= self.depth:
            raise InputError(f"level {l} out of range")
        if self.nodes is None:
            return tuple("".join(bits) for bits in itertools.product("01", repeat=l))
        return tuple(sorted(n for n in self.nodes if len(n) == l))

    def extensions(self, t: str, l: int) -> tuple[str, ...]:
        return tuple(v for v in self.level(l) if v.startswith(t))

    def children(self, t: str) -> tuple[str, ...]:
        return tuple(c for c in (t + "0", t + "1") if c in self)


def is_mn_dense(T: LevelTree, D: Iterable[str], t: str, m: int, n: int) -> bool:
    """Is D a subset of level n meeting every level-m node extending t?"""
    if not (len(t) <= m <= n <= T.depth):
        raise InputError(f"need |t| <= m <= n <= depth, got |t|={len(t)}, m={m}, n={n}")
    if t not in T:
        raise InputError(f"stem {t!r} is not in the tree")
    dset = frozenset(D)
    level_n = frozenset(T.level(n))
    if not dset <= level_n:
        return False
    return all(any(v.startswith(u) for v in dset) for u in T.extensions(t, m))


@dataclass(frozen=True)
class LevelColoring:
    """A coloring of same-level node tuples across a product of trees."""

    d: int
    depth: int
    k: int
    values: Mapping[tuple[str, ...], int] = field(hash=False)

    def color(self, nodes: tuple[str, ...]) -> int:
        try:
            return self.values[nodes]
        except KeyError as exc:
            raise InputError(f"coloring is missing the tuple {nodes!r}") from exc

    def validate_total(self, trees: Sequence[LevelTree]) -> None:
        for l in range(self.depth + 1):
            for combo in itertools.product(*(T.level(l) for T in trees)):
                if combo not in self.values:
                    raise InputError(f"coloring is missing the tuple {combo!r}")
                if not 0 <= self.values[combo] < self.k:
                    raise InputError(f"color out of range at {combo!r}")


@dataclass(frozen=True)
class HlRow:
    n: int
    denses: tuple[frozenset[str], ...]
    color: int


@dataclass(frozen=True)
class HlWitness:
    level: int
    stems: tuple[str, ...]
    rows: tuple[tuple[int, HlRow], ...]  # one row per m, ascending

    def row(self, m: int) -> HlRow:
        for mm, row in self.rows:
            if mm == m:
                return row
        raise InputError(f"witness has no row for level {m}")


def hl_search(trees: Sequence[LevelTree], f: LevelColoring) -> Optional[HlWitness]:
    """Search for a level, stems, and per-level dense sets on which the
    coloring is constant, preferring low commitment levels.

    Dense-set candidates per source node are scanned as choice functions in
    lexicographic order, so results are deterministic.
    """
    d = len(trees)
    if d != f.d:
        raise InputError("coloring dimension does not match the trees")
    if d > 2:
        raise SizeCapError("products of more than two trees are out of scale")
    depth = f.depth
    if any(T.depth < depth for T in trees):
        raise InputError("trees are shallower than the coloring")
    if depth > 5:
        raise SizeCapError("depth beyond 5 is out of scale")
    if f.k > 2:
        raise SizeCapError("more than two colors is out of scale")
    f.validate_total(trees)
    if depth < 1:
        return None
    for l in range(depth):
        for stems in itertools.product(*(T.level(l) for T in trees)):
            rows = []
            for m in range(l, depth):
                row = _hl_row(trees, f, stems, m, depth)
                if row is None:
                    rows = None
                    break
                rows.append((m, row))
            if rows is not None:
                return HlWitness(l, tuple(stems), tuple(rows))
    return None


def _hl_row(
    trees: Sequence[LevelTree],
    f: LevelColoring,
    stems: tuple[str, ...],
    m: int,
    depth: int,
) -> Optional[HlRow]:
    d = len(trees)
    for n in range(m, depth + 1):
        for color in range(f.k):
            if d == 1:
                sources = trees[0].extensions(stems[0], m)
                chosen = []
                for u in sources:
                    v = next(
                        (v for v in trees[0].extensions(u, n) if f.color((v,)) == color),
                        None,
                    )
                    if v is None:
                        chosen = None
                        break
                    chosen.append(v)
                if chosen is not None:
                    return HlRow(n, (frozenset(chosen),), color)
            else:
                row = _hl_row_pair(trees, f, stems, m, n, color)
                if row is not None:
                    return row
    return None


def _hl_row_pair(
    trees: Sequence[LevelTree],
    f: LevelColoring,
    stems: tuple[str, ...],
    m: int,
    n: int,
    color: int,
) -> Optional[HlRow]:
    u0s = trees[0].extensions(stems[0], m)
    u1s = trees[1].extensions(stems[1], m)
    cand0 = [trees[0].extensions(u, n) for u in u0s]
    cand1 = {u1: trees[1].extensions(u1, n) for u1 in u1s}
    for picks in itertools.product(*cand0):
        d0 = frozenset(picks)
        d1 = []
        ok = True
        for u1 in u1s:
            v1 = next(
                (v for v in cand1[u1] if all(f.color((v0, v)) == color for v0 in d0)),
                None,
            )
            if v1 is None:
                ok = False
                break
            d1.append(v1)
        if ok:
            return HlRow(n, (d0, frozenset(d1)), color)
    return None


def check_hl_witness(
    trees: Sequence[LevelTree], f: LevelColoring, w: HlWitness
) -> bool:
    """Validate a witness from scratch: stems placed, one row per level from
    the witness level up, each row dense and monochromatic."""
    depth = f.depth
    if not 0 <= w.level < depth:
        return False
    for T, stem in zip(trees, w.stems):
        if len(stem) != w.level or stem not in T:
            return False
    seen = dict(w.rows)
    if sorted(seen) != list(range(w.level, depth)):
        return False
    for m, row in seen.items():
        if not m <= row.n <= depth:
            return False
        if len(row.denses) != len(trees):
            return False
        for T, stem, D in zip(trees, w.stems, row.denses):
            if not is_mn_dense(T, D, stem, m, row.n):
                return False
        for combo in itertools.product(*row.denses):
            if f.color(combo) != row.color:
                return False
    return True


def hl_witness_exists_bruteforce(trees: Sequence[LevelTree], f: LevelColoring) -> bool:
    """Existence by raw enumeration over all dense-set tuples (tiny depths only)."""
    depth = f.depth
    if depth < 1:
        return False
    if any(len(T.level(depth)) > 4 for T in trees):
        raise SizeCapError("bruteforce existence check is for tiny trees")
    for l in range(depth):
        for stems in itertools.product(*(T.level(l) for T in trees)):
            if all(
                _brute_row_exists(trees, f, stems, m, depth) for m in range(l, depth)
            ):
                return True
    return False


def _brute_row_exists(trees, f, stems, m, depth) -> bool:
    for n in range(m, depth + 1):
        level_sets = []
        for T, stem in zip(trees, stems):
            nodes = T.level(n)
            subsets = []
            for bits in range(1, 1 << len(nodes)):
                D = frozenset(nodes[i] for i in range(len(nodes)) if bits >> i & 1)
                if is_mn_dense(T, D, stem, m, n):
                    subsets.append(D)
            level_sets.append(subsets)
        for combo in itertools.product(*level_sets):
            colors = {f.color(tup) for tup in itertools.product(*combo)}
            if len(colors) == 1:
                return True
    return False


# ---------------------------------------------------------------------------
# Strong subtrees
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StrongSubtree:
    nodes: frozenset[str]
    stem: str
    base: tuple[int, ...]
    leaf_level: int
    certified: bool
    failure: Optional[tuple[int, str, str]]


def is_strong_subtree(
    T: LevelTree, nodes: frozenset[str], stem: str, base: Sequence[int]
) -> tuple[bool, Optional[tuple[int, str, str]]]:
    """Does the node set keep, at every base level, all tree successors of
    its members extending the stem?  Returns (ok, first failure)."""
    base_set = set(base)
    for s in sorted(nodes):
        if len(s) in base_set and s.startswith(stem):
            for c in T.children(s):
                if c not in nodes:
                    return False, (len(s), s, c)
    return True, None


def strong_subtree_assemble(
    T: LevelTree,
    t: str,
    denses: Sequence[Iterable[str]],
    levels: Sequence[int],
) -> StrongSubtree:
    """Close the given dense sets downward and certify strongness on the
    given levels (all but the last, which is the leaf frontier).

    Every dense set must be (levels[p], levels[p+1])-dense above the stem;
    violations report the failing index.  The certificate is recomputed from
    scratch on the assembled node set.
    """
    levels = list(levels)
    denses = [frozenset(D) for D in denses]
    if len(levels) != len(denses) + 1:
        raise InputError("need one more level than dense sets")
    if any(levels[i] >= levels[i + 1] for i in range(len(levels) - 1)):
        raise InputError("levels must be strictly increasing")
    if levels and levels[0] < len(t):
        raise InputError("first level sits above the stem")
    for p, D in enumerate(denses):
        if not is_mn_dense(T, D, t, levels[p], levels[p + 1]):
            raise InputError(f"dense set {p} is not ({levels[p]},{levels[p+1]})-dense above {t!r}")
    closure: set[str] = set()
    for D in denses:
        for v in D:
            for j in range(len(v) + 1):
                closure.add(v[:j])
    nodes = frozenset(s for s in closure if s.startswith(t) or t.startswith(s))
    base = tuple(levels[:-1])
    ok, failure = is_strong_subtree(T, nodes, t, base)
    return StrongSubtree(nodes, t, base, levels[-1], ok, failure)


# ---------------------------------------------------------------------------
# Pure decision on the finite Mathias order
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClopenPredicate:
    """Membership in a set of reals decided by a bounded initial segment.

    ``accepted`` lists the initial segments (strictly increasing tuples of
    naturals, length up to the horizon) that put a real inside the set.
    """

    horizon: int
    accepted: frozenset[tuple[int, ...]]

    def __post_init__(self):
        if self.horizon < 0:
            raise InputError("horizon must be nonnegative")
        for pre in self.accepted:
            if len(pre) > self.horizon:
                raise InputError(f"prefix {pre!r} exceeds the horizon")
            if any(pre[i] >= pre[i + 1] for i in range(len(pre) - 1)):
                raise InputError(f"prefix {pre!r} is not increasing")

    def member(self, real: Iterable[int]) -> bool:
        ordered = tuple(sorted(real))
        return any(ordered[: len(pre)] == pre for pre in self.accepted)


def clopen_formula(M: Poset, X: ClopenPredicate) -> tuple[Formula, dict[str, Name]]:
    """Compile membership of the generic real in X to a formula over the
    canonical name for the union of the stems in the generic filter."""
    env = {"real": mathias_real_name(M)}
    universe = _mathias_universe(M)
    for x in range(universe):
        env[f"k{x}"] = check_name(von_neumann(x), M)
    true_f: Formula = Eq("real", "real")
    disjuncts = []
    for pre in sorted(X.accepted):
        if not pre:
            disjuncts.append(true_f)
            continue
        parts: list[Formula] = [Mem(f"k{x}", "real") for x in pre]
        parts.extend(Not(Mem(f"k{y}", "real")) for y in range(pre[-1]) if y not in pre)
        g = parts[0]
        for part in parts[1:]:
            g = And(g, part)
        disjuncts.append(g)
    if not disjuncts:
        return Not(true_f), env
    out = disjuncts[0]
    for g in disjuncts[1:]:
        out = Or(out, g)
    return out, env


_REAL_NAMES: dict[int, tuple[Poset, Name]] = {}


def mathias_real_name(M: Poset) -> Name:
    """Name for the union of the stems along the generic filter."""
    hit = _REAL_NAMES.get(id(M))
    if hit is not None and hit[0] is M:
        return hit[1]
    entries = []
    for cid in M.ids:
        stem, _ = mathias_decode(cid)
        for x in stem:
            entries.append((check_name(von_neumann(x), M), cid))
    name = Name(entries)
    _REAL_NAMES[id(M)] = (M, name)
    return name


def _mathias_universe(M: Poset) -> int:
    best = 0
    for cid in M.ids:
        _, env = mathias_decode(cid)
        if env:
            best = max(best, max(env) + 1)
    return best


@dataclass(frozen=True)
class PureDecision:
    condition: str
    forces_membership: bool
    route: str


def mathias_pure_decide(M: Poset, p: str, X: ClopenPredicate) -> PureDecision:
    """A stem-preserving extension of p deciding membership of the generic
    real in X.

    The envelope is thinned through the accept/reject construction on the
    family of stem extensions whose canonical conditions force membership;
    whichever horn comes back gives the deciding envelope.  If the finite
    scale leaves that extension undecided the envelope is shrunk directly,
    down to the stem itself, which always decides.
    """
    stem, envelope = mathias_decode(p)
    if len(envelope) < len(stem) + X.horizon:
        raise SizeCapError(
            f"envelope of {p!r} is too small for horizon {X.horizon} (needs {len(stem) + X.horizon})"
        )
    phi, env = clopen_formula(M, X)
    ctx = context_for(M)
    fmask = ctx.forces_set(phi, env)
    floor = stem[-1] if stem else -1
    B = tuple(sorted(x for x in envelope if x > floor))

    def canonical(x_set: tuple[int, ...]) -> str:
        tail = tuple(b for b in B if b > x_set[-1])
        return mathias_id(stem + x_set, set(stem) | set(x_set) | set(tail))

    members = set()
    for r in range(1, len(B) + 1):
        for xs in itertools.combinations(B, r):
            cid = canonical(xs)
            if fmask >> M.check_condition(cid) & 1:
                members.add(frozenset(xs))
    family = FinFamily(_mathias_universe(M), frozenset(members))

    def attempt(H: frozenset[int], route: str) -> Optional[PureDecision]:
        q = mathias_id(stem, set(stem) | H)
        if q not in M.index:
            return None
        verdict = decides(M, q, phi, env)
        if verdict == UNDECIDED:
            return None
        if not mathias_pure_extension(q, p):
            return None
        return PureDecision(q, verdict == FORCES, route)

    if B:
        built = gnw_construct(family, 1, len(B), ground=frozenset(B))
        if built.completed:
            found = attempt(built.H, "construct")
            if found:
                return found
        for h in range(len(B), 0, -1):
            searched = gnw_dichotomy_search(family, h, 1, ground=frozenset(B))
            if searched:
                found = attempt(searched.H, "search")
                if found:
                    return found
        for b in B:
            found = attempt(frozenset([b]), "shrink")
            if found:
                return found
    if stem:
        found = attempt(frozenset(), "collapse")
        if found:
            return found
    raise ForcingLabError(f"no pure extension of {p!r} decides the predicate")


# ---------------------------------------------------------------------------
# Prefix-closed sequence sets: long paths versus decreasing rank functions
# ---------------------------------------------------------------------------


def seq_tree_has_path(T: Iterable[tuple], n: int) -> bool:
    """Does the prefix-closed set contain a sequence of length n?"""
    return any(len(t) >= n for t in T)


def seq_tree_rank_certificate(T: Iterable[tuple], n: int) -> Optional[dict[tuple, int]]:
    """A map into {0..n-1} strictly decreasing along extensions, or None.

    The downward height of each node is the least possible value, so the
    certificate exists exactly when every node sits at depth below n.
    """
    nodes = set(T)
    if not nodes:
        return {}
    heights: dict[tuple, int] = {}
    for node in sorted(nodes, key=len, reverse=True):
        kids = [heights[c] for c in heights if len(c) == len(node) + 1 and c[: len(node)] == node]
        heights[node] = 1 + max(kids) if kids else 0
    if any(h >= n for h in heights.values()):
        return None
    return heights
