"""The forcing relation over a finite poset, plus its semantic cross-check.

Instead of deciding one (condition, formula) query at a time, every formula
is evaluated to the full set of conditions forcing it, carried as a bitmask.
The atomic clauses run by simultaneous recursion on rank:

* ``p`` forces ``x = y`` when no extension of ``p`` separates the two names
  by a membership question drawn from the names occurring inside them;
* ``p`` forces ``x in y`` when the extensions of ``p`` that sit below some
  entry condition of ``y`` while forcing equality of ``x`` with that entry
  are dense below ``p``.

Negation is "no extension forces it", conjunction intersects, disjunction
rules out extensions forcing both negations, implication is the negated
conjunction form, the bounded universal intersects over entries, and the
bounded existential asks for a dense set of entry-backed witnesses.

The independent check is purely semantic: on a finite poset the upward
closure of a minimal condition meets every dense set, so evaluating a
formula directly on the hereditarily finite interpretations of its names
under every such filter decides everything.  ``p`` semantically forces a
formula when it evaluates true under every minimal filter through ``p``.
The two routes share no logic and are compared set-for-set in the tests.
"""

from __future__ import annotations

import itertools
import sys
from typing import Iterable, Mapping, Optional
from weakref import WeakKeyDictionary

from .completion import RegularOpenAlgebra
from .errors import ForcingLabError, InputError
from .formulas import And, Check, Eq, ExistsIn, ForallIn, Formula, Imp, Mem, Not, Or, Term
from .names import HF, Name, check_name, hereditary_names, validate_name
from .poset import Poset

_CONTEXTS: "WeakKeyDictionary[Poset, ForcingContext]" = WeakKeyDictionary()


def context_for(P: Poset) -> "ForcingContext":
    ctx = _CONTEXTS.get(P)
    if ctx is None:
        ctx = ForcingContext(P)
        _CONTEXTS[P] = ctx
    return ctx


class ForcingContext:
    """Per-poset memo tables for atomic sets, formula sets, and the oracle.

    The tables are the only mutable state; insertions are idempotent, so a
    context may be shared across threads without coordination.
    """

    def __init__(self, P: Poset):
        sys.setrecursionlimit(max(sys.getrecursionlimit(), 50000))
        self.poset = P
        self.n = len(P)
        self.down = P.down_masks()
        self.full = P.full_mask
        filters = P.minimal_filters()
        self.filter_witnesses = tuple(w for w, _ in filters)
        self.filter_masks = tuple(m for _, m in filters)
        self.nf = len(filters)
        self.filter_full = (1 << self.nf) - 1
        # cond_filters[i]: which minimal filters contain condition i; these are
        # simultaneously the filters whose witness lies below condition i.
        cond_filters = [0] * self.n
        for fidx, fmask in enumerate(self.filter_masks):
            m = fmask
            while m:
                low = m & -m
                cond_filters[low.bit_length() - 1] |= 1 << fidx
                m ^= low
        self.cond_filters = cond_filters
        self._mem: dict[tuple[Name, Name], int] = {}
        self._eq: dict[tuple[Name, Name], int] = {}
        self._forces: dict[tuple, int] = {}
        self._oracle: dict[tuple, int] = {}
        self._interp: dict[tuple[Name, int], HF] = {}
        self._free: dict[Formula, frozenset[str]] = {}
        self._validated: set[Name] = set()
        self._entry_order: dict[Name, tuple] = {}
        # environments are interned by identity; callers must not mutate an
        # environment after evaluating against it
        self._env_tokens: dict[int, int] = {}
        self._env_keepalive: list[Mapping[str, Name]] = []

    # -- set combinators -----------------------------------------------------

    def avoid(self, S: int) -> int:
        """Conditions with no extension in S."""
        if S == 0:
            return self.full
        if S == self.full:
            return 0
        out = 0
        for i, d in enumerate(self.down):
            if not d & S:
                out |= 1 << i
        return out

    def dense_below(self, S: int) -> int:
        """Conditions below which S is dense."""
        if S == self.full:
            return self.full
        if S == 0:
            return 0
        return self.avoid(self.avoid(S))

    # -- names ----------------------------------------------------------------

    def require_valid(self, name: Name) -> None:
        if name in self._validated:
            return
        ok, violation = validate_name(name, self.poset)
        if not ok:
            path, cond = violation
            raise InputError(
                f"name violates the nested-condition discipline at {cond!r} (path {path})"
            )
        self._validated.add(name)

    def interp(self, name: Name, fidx: int) -> HF:
        key = (name, fidx)
        hit = self._interp.get(key)
        if hit is not None:
            return hit
        members = self.filter_masks[fidx]
        index = self.poset.index
        memo = self._interp
        stack = [name]
        while stack:
            cur = stack[-1]
            if (cur, fidx) in memo:
                stack.pop()
                continue
            live = [c for c, cond in cur.entries if members >> index[cond] & 1]
            pending = [c for c in live if (c, fidx) not in memo]
            if pending:
                stack.extend(pending)
            else:
                memo[(cur, fidx)] = frozenset(memo[(c, fidx)] for c in live)
                stack.pop()
        return memo[key]

    # -- atomic forcing sets ---------------------------------------------------

    def _entries_of(self, y: Name) -> tuple[tuple, dict[int, tuple]]:
        """Entries in rank order plus a rank-indexed view, cached per name."""
        hit = self._entry_order.get(y)
        if hit is None:
            ordered = tuple(sorted(y.entries, key=lambda e: (e[0].rank, e[1])))
            by_rank: dict[int, list] = {}
            for entry in ordered:
                by_rank.setdefault(entry[0].rank, []).append(entry)
            hit = (ordered, {r: tuple(es) for r, es in by_rank.items()})
            self._entry_order[y] = hit
        return hit

    def mem_set(self, x: Name, y: Name) -> int:
        """Conditions forcing membership of x in y."""
        key = (x, y)
        hit = self._mem.get(key)
        if hit is not None:
            return hit
        index = self.poset.index
        ordered, by_rank = self._entries_of(y)
        probe = by_rank.get(x.rank, ())
        S = 0
        for entry in itertools.chain(probe, ordered):
            child, cond = entry
            eq = self.eq_set(x, child)
            if eq:
                S |= self.down[index[cond]] & eq
                if S == self.full:
                    break
        result = self.dense_below(S)
        self._mem[key] = result
        return result

    def eq_set(self, x: Name, y: Name) -> int:
        """Conditions forcing equality of x and y."""
        if x == y:
            return self.full
        key = (x, y)
        hit = self._eq.get(key)
        if hit is not None:
            return hit
        hx = hereditary_names(x)
        hy = hereditary_names(y)
        U = 0
        result: Optional[int] = None
        count = 0

        def witnesses():
            # names on one side only distinguish fastest; shared ones last
            for z in hx:
                if z not in hy:
                    yield z
            for z in hy:
                if z not in hx:
                    yield z
            for z in hx:
                if z in hy:
                    yield z

        for z in witnesses():
            U |= self.mem_set(z, x) ^ self.mem_set(z, y)
            if U == self.full:
                result = 0
                break
            count += 1
            if count % 8 == 0 and self.avoid(U) == 0:
                result = 0
                break
        if result is None:
            result = self.avoid(U)
        self._eq[key] = result
        self._eq[(y, x)] = result
        return result

    # -- formula forcing sets ----------------------------------------------

    def free_vars(self, f: Formula) -> frozenset[str]:
        hit = self._free.get(f)
        if hit is None:
            if isinstance(f, (Mem, Eq)):
                hit = frozenset(t for t in (f.left, f.right) if isinstance(t, str))
            elif isinstance(f, Not):
                hit = self.free_vars(f.sub)
            elif isinstance(f, (And, Or, Imp)):
                hit = self.free_vars(f.left) | self.free_vars(f.right)
            else:
                hit = self.free_vars(f.body) - {f.var}
                if isinstance(f.bound, str):
                    hit |= {f.bound}
            self._free[f] = hit
        return hit

    def _resolve(self, term: Term, env: Mapping[str, Name], binds: dict[str, Name]) -> Name:
        if isinstance(term, Check):
            return check_name(term.value, self.poset)
        if term in binds:
            return binds[term]
        name = env.get(term)
        if name is None:
            raise InputError(f"unbound symbol {term!r}")
        self.require_valid(name)
        return name

    def _key(self, f: Formula, env: Mapping[str, Name], binds: dict[str, Name]) -> tuple:
        token = self._env_tokens.get(id(env))
        if token is None:
            token = len(self._env_keepalive)
            self._env_tokens[id(env)] = token
            self._env_keepalive.append(env)
        if not binds:
            return (f, token)
        parts = tuple(
            (v, binds[v]) for v in sorted(self.free_vars(f)) if v in binds
        )
        return (f, token, parts)

    def forces_set(self, f: Formula, env: Mapping[str, Name], binds: Optional[dict[str, Name]] = None) -> int:
        binds = binds or {}
        key = self._key(f, env, binds)
        hit = self._forces.get(key)
        if hit is not None:
            return hit
        down = self.down
        index = self.poset.index
        if isinstance(f, Mem):
            out = self.mem_set(self._resolve(f.left, env, binds), self._resolve(f.right, env, binds))
        elif isinstance(f, Eq):
            out = self.eq_set(self._resolve(f.left, env, binds), self._resolve(f.right, env, binds))
        elif isinstance(f, Not):
            out = self.avoid(self.forces_set(f.sub, env, binds))
        elif isinstance(f, And):
            out = self.forces_set(f.left, env, binds) & self.forces_set(f.right, env, binds)
        elif isinstance(f, Or):
            na = self.avoid(self.forces_set(f.left, env, binds))
            nb = self.avoid(self.forces_set(f.right, env, binds))
            out = self.avoid(na & nb)
        elif isinstance(f, Imp):
            nb = self.avoid(self.forces_set(f.right, env, binds))
            out = self.avoid(self.forces_set(f.left, env, binds) & nb)
        elif isinstance(f, ForallIn):
            w = self._resolve(f.bound, env, binds)
            out = self.full
            for child, cond in sorted(w.entries, key=lambda e: e[1]):
                sub = self.forces_set(f.body, env, {**binds, f.var: child})
                out &= self.avoid(down[index[cond]] & ~sub & self.full)
                if not out:
                    break
        elif isinstance(f, ExistsIn):
            w = self._resolve(f.bound, env, binds)
            S = 0
            for child, cond in sorted(w.entries, key=lambda e: e[1]):
                S |= down[index[cond]] & self.forces_set(f.body, env, {**binds, f.var: child})
                if S == self.full:
                    break
            out = self.dense_below(S)
        else:
            raise InputError(f"not a formula node: {f!r}")
        self._forces[key] = out
        return out

    # -- semantic oracle -------------------------------------------------------

    def oracle_mask(self, f: Formula, env: Mapping[str, Name], binds: Optional[dict[str, Name]] = None) -> int:
        """Bitmask over minimal filters under which f evaluates true."""
        binds = binds or {}
        key = self._key(f, env, binds)
        hit = self._oracle.get(key)
        if hit is not None:
            return hit
        index = self.poset.index
        if isinstance(f, (Mem, Eq)):
            ln = self._resolve(f.left, env, binds)
            rn = self._resolve(f.right, env, binds)
            out = 0
            for fidx in range(self.nf):
                lv = self.interp(ln, fidx)
                rv = self.interp(rn, fidx)
                holds = lv in rv if isinstance(f, Mem) else lv == rv
                if holds:
                    out |= 1 << fidx
        elif isinstance(f, Not):
            out = ~self.oracle_mask(f.sub, env, binds) & self.filter_full
        elif isinstance(f, And):
            out = self.oracle_mask(f.left, env, binds) & self.oracle_mask(f.right, env, binds)
        elif isinstance(f, Or):
            out = self.oracle_mask(f.left, env, binds) | self.oracle_mask(f.right, env, binds)
        elif isinstance(f, Imp):
            out = (~self.oracle_mask(f.left, env, binds) | self.oracle_mask(f.right, env, binds)) & self.filter_full
        elif isinstance(f, ForallIn):
            w = self._resolve(f.bound, env, binds)
            out = self.filter_full
            for child, cond in sorted(w.entries, key=lambda e: e[1]):
                guard = self.cond_filters[index[cond]]
                sub = self.oracle_mask(f.body, env, {**binds, f.var: child})
                out &= (~guard | sub) & self.filter_full
                if not out:
                    break
        elif isinstance(f, ExistsIn):
            w = self._resolve(f.bound, env, binds)
            out = 0
            for child, cond in sorted(w.entries, key=lambda e: e[1]):
                guard = self.cond_filters[index[cond]]
                out |= guard & self.oracle_mask(f.body, env, {**binds, f.var: child})
                if out == self.filter_full:
                    break
        else:
            raise InputError(f"not a formula node: {f!r}")
        self._oracle[key] = out
        return out

    def oracle_condition_set(self, f: Formula, env: Mapping[str, Name]) -> int:
        """Conditions p such that f holds under every minimal filter through p."""
        M = self.oracle_mask(f, env)
        missing = ~M & self.filter_full
        out = 0
        for i in range(self.n):
            if not self.cond_filters[i] & missing:
                out |= 1 << i
        return out


# -- public operations ----------------------------------------------------


def forces_atomic(P: Poset, p: str, kind: str, x: Name, y: Name) -> bool:
    """Does p force the atomic statement (kind is 'mem' or 'eq')?"""
    ctx = context_for(P)
    ctx.require_valid(x)
    ctx.require_valid(y)
    bit = 1 << P.check_condition(p)
    if kind == "mem":
        return bool(ctx.mem_set(x, y) & bit)
    if kind == "eq":
        return bool(ctx.eq_set(x, y) & bit)
    raise InputError(f"atomic kind must be 'mem' or 'eq', got {kind!r}")


def forces(P: Poset, p: str, f: Formula, env: Mapping[str, Name]) -> bool:
    ctx = context_for(P)
    return bool(ctx.forces_set(f, env) >> P.check_condition(p) & 1)


def forces_set(P: Poset, f: Formula, env: Mapping[str, Name]) -> frozenset[str]:
    ctx = context_for(P)
    return frozenset(P.ids_of(ctx.forces_set(f, env)))


FORCES = "forces"
FORCES_NEGATION = "forces-negation"
UNDECIDED = "undecided"


def decides(P: Poset, p: str, f: Formula, env: Mapping[str, Name]) -> str:
    """Which of p forcing f, p forcing its negation, or neither, holds."""
    ctx = context_for(P)
    mask = ctx.forces_set(f, env)
    pi = P.check_condition(p)
    if mask >> pi & 1:
        return FORCES
    if not ctx.down[pi] & mask:
        return FORCES_NEGATION
    return UNDECIDED


def decide_name_value(P: Poset, p: str, y: Name) -> list[tuple[str, HF]]:
    """Pair every minimal condition below p with the value it decides y to be.

    Each returned (m, z) is verified: m forces y equal to the constant name
    of z.  The list is never empty since a finite poset has a minimal
    condition below everything.
    """
    ctx = context_for(P)
    ctx.require_valid(y)
    pi = P.check_condition(p)
    out = []
    for fidx, w in enumerate(ctx.filter_witnesses):
        if not ctx.filter_masks[fidx] >> pi & 1:
            continue
        z = ctx.interp(y, fidx)
        zname = check_name(z, P)
        if not ctx.eq_set(y, zname) >> P.check_condition(w) & 1:
            raise ForcingLabError(
                f"decision check failed: {w!r} does not force the computed value of the name"
            )
        out.append((w, z))
    if not out:
        raise ForcingLabError(f"no minimal condition below {p!r}")
    return out


def truth_value(A: RegularOpenAlgebra, f: Formula, env: Mapping[str, Name]) -> int:
    """The regular-open hull of the conditions forcing f."""
    ctx = context_for(A.base)
    return A.ro(ctx.forces_set(f, env))


def oracle_forces(P: Poset, p: str, f: Formula, env: Mapping[str, Name]) -> bool:
    """Semantic route: true under every minimal filter through p."""
    ctx = context_for(P)
    return bool(ctx.oracle_condition_set(f, env) >> P.check_condition(p) & 1)


def oracle_set(P: Poset, f: Formula, env: Mapping[str, Name]) -> frozenset[str]:
    ctx = context_for(P)
    return frozenset(P.ids_of(ctx.oracle_condition_set(f, env)))


def soundness_disagreements(
    P: Poset, formulas: Iterable[Formula], env: Mapping[str, Name]
) -> list[tuple[Formula, frozenset[str], frozenset[str]]]:
    """Formulas where the syntactic and semantic condition sets differ."""
    ctx = context_for(P)
    bad = []
    for f in formulas:
        syntactic = ctx.forces_set(f, env)
        semantic = ctx.oracle_condition_set(f, env)
        if syntactic != semantic:
            bad.append((f, frozenset(P.ids_of(syntactic)), frozenset(P.ids_of(semantic))))
    return bad
