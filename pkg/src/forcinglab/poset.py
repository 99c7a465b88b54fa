"""Finite forcing preorders and their order-theoretic vocabulary.

A forcing here is a finite set of condition identifiers carrying a reflexive,
transitive relation with a designated greatest element.  Antisymmetry is not
required; distinct conditions may sit in the same equivalence class of the
order.  All condition sets handed around by this module are plain sets of
identifier strings; internally every set is mirrored as a bitmask over the
lexicographically sorted identifier list, which keeps the quantifier-heavy
predicates (density, exhaustiveness, compatibility) cheap.

Everything constructed here is immutable after ``__init__``; the lazily built
caches are private and idempotent, so values can be shared freely between
threads.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import InputError, SizeCapError

_DEFAULT_CAP = 20000


def condition_cap() -> int:
    """Maximum number of conditions a constructor may materialize.

    Overridable through the ``FORCINGLAB_CAP`` environment variable (a decimal
    count of conditions).
    """
    raw = os.environ.get("FORCINGLAB_CAP")
    if raw is None:
        return _DEFAULT_CAP
    try:
        value = int(raw)
    except ValueError as exc:
        raise InputError(f"FORCINGLAB_CAP must be a decimal integer, got {raw!r}") from exc
    if value < 1:
        raise InputError(f"FORCINGLAB_CAP must be positive, got {value}")
    return value


class Poset:
    """A finite reflexive-transitive order with a greatest element.

    ``pairs`` lists (p, q) with p <= q; they may be cover pairs, the
    reflexive-transitive closure is computed unless ``closed=True`` promises
    the input relation is already closed.
    """

    __slots__ = (
        "name",
        "ids",
        "index",
        "top",
        "_down",
        "_up",
        "_full",
        "_compat",
        "_minimal_mask",
        "_minimal_filters",
        "__weakref__",
    )

    def __init__(
        self,
        name: str,
        ids: Iterable[str],
        top: str,
        pairs: Iterable[tuple[str, str]],
        *,
        closed: bool = False,
    ):
        id_tuple = tuple(sorted(set(ids)))
        if not id_tuple:
            raise InputError("a poset needs at least one condition")
        if len(id_tuple) > condition_cap():
            raise SizeCapError(
                f"poset {name!r} has {len(id_tuple)} conditions, cap is {condition_cap()}"
            )
        index = {c: i for i, c in enumerate(id_tuple)}
        if top not in index:
            raise InputError(f"top {top!r} is not a condition of poset {name!r}")
        n = len(id_tuple)
        down = [1 << i for i in range(n)]
        for p, q in pairs:
            try:
                pi, qi = index[p], index[q]
            except KeyError as exc:
                raise InputError(f"order pair ({p!r}, {q!r}) mentions an unknown condition") from exc
            down[qi] |= 1 << pi
        if not closed:
            for k in range(n):
                bit = 1 << k
                dk = down[k]
                for i in range(n):
                    if down[i] & bit:
                        down[i] |= dk
        self.name = name
        self.ids = id_tuple
        self.index = index
        self.top = top
        self._down = down
        self._full = (1 << n) - 1
        if down[index[top]] != self._full:
            raise InputError(f"top {top!r} is not a greatest element of poset {name!r}")
        up = [0] * n
        for i in range(n):
            di = down[i]
            bit = 1 << i
            while di:
                low = di & -di
                up[low.bit_length() - 1] |= bit
                di ^= low
        self._up = up
        self._compat: Optional[list[int]] = None
        self._minimal_mask: Optional[int] = None
        self._minimal_filters: Optional[tuple[tuple[str, int], ...]] = None

    # -- identifier/bitmask plumbing -------------------------------------

    def __len__(self) -> int:
        return len(self.ids)

    @property
    def conditions(self) -> tuple[str, ...]:
        return self.ids

    @property
    def full_mask(self) -> int:
        return self._full

    def check_condition(self, p: str) -> int:
        try:
            return self.index[p]
        except KeyError as exc:
            raise InputError(f"unknown condition {p!r} in poset {self.name!r}") from exc

    def mask_of(self, conditions: Iterable[str]) -> int:
        mask = 0
        for p in conditions:
            mask |= 1 << self.check_condition(p)
        return mask

    def ids_of(self, mask: int) -> tuple[str, ...]:
        out = []
        while mask:
            low = mask & -mask
            out.append(self.ids[low.bit_length() - 1])
            mask ^= low
        return tuple(out)

    def down_mask(self, p: str) -> int:
        """Bitmask of all q <= p."""
        return self._down[self.check_condition(p)]

    def up_mask(self, p: str) -> int:
        """Bitmask of all q >= p."""
        return self._up[self.check_condition(p)]

    def down_masks(self) -> list[int]:
        return self._down

    # -- order predicates --------------------------------------------------

    def leq(self, p: str, q: str) -> bool:
        """p <= q under the stored closed relation."""
        pi = self.check_condition(p)
        return bool(self._down[self.check_condition(q)] >> pi & 1)

    def compat_masks(self) -> list[int]:
        """compat_masks()[i] = bitmask of conditions compatible with ids[i]."""
        if self._compat is None:
            down = self._down
            n = len(self.ids)
            compat = [0] * n
            for i in range(n):
                di = down[i]
                row = 0
                for j in range(i, n):
                    if di & down[j]:
                        row |= 1 << j
                compat[i] = compat[i] | row
                # mirror the symmetric half
                for j in range(i + 1, n):
                    if row >> j & 1:
                        compat[j] |= 1 << i
            self._compat = compat
        return self._compat

    def compatible(self, p: str, q: str) -> bool:
        """True iff some r satisfies r <= p and r <= q."""
        pi = self.check_condition(p)
        qi = self.check_condition(q)
        return bool(self._down[pi] & self._down[qi])

    def minimal_mask(self) -> int:
        """Bitmask of conditions with nothing strictly below them."""
        if self._minimal_mask is None:
            mask = 0
            down, up = self._down, self._up
            for i in range(len(self.ids)):
                # minimal: everything below i is also above i (same class)
                if down[i] & ~up[i] == 0:
                    mask |= 1 << i
            self._minimal_mask = mask
        return self._minimal_mask

    def minimal_filters(self) -> tuple[tuple[str, int], ...]:
        """Distinct upward closures of minimal conditions, as (witness id, mask).

        Equivalent minimal conditions generate the same filter; only one
        representative per filter is kept, in identifier order.
        """
        if self._minimal_filters is None:
            seen: dict[int, str] = {}
            mm = self.minimal_mask()
            i = 0
            while mm:
                if mm & 1:
                    um = self._up[i]
                    if um not in seen:
                        seen[um] = self.ids[i]
                mm >>= 1
                i += 1
            self._minimal_filters = tuple((wid, um) for um, wid in sorted(seen.items(), key=lambda kv: kv[1]))
        return self._minimal_filters


@dataclass(frozen=True)
class Filter:
    """An upward closed, downward directed, nonempty condition set."""

    poset: Poset
    members: frozenset[str]

    def __post_init__(self):
        if not is_filter(self.poset, self.members):
            raise InputError("condition set is not a filter")

    def __contains__(self, p: str) -> bool:
        return p in self.members

    def mask(self) -> int:
        return self.poset.mask_of(self.members)


FAMILY_KINDS = ("dense", "exhaustive", "antichain", "unrestricted")


@dataclass(frozen=True)
class ConditionFamily:
    """A condition set tagged with the predicate it is promised to satisfy."""

    members: frozenset[str]
    kind: str = "unrestricted"


def make_family(P: Poset, members: Iterable[str], kind: str = "unrestricted") -> ConditionFamily:
    ms = frozenset(members)
    if kind not in FAMILY_KINDS:
        raise InputError(f"unknown family kind {kind!r}")
    if kind == "dense" and not is_dense(P, ms):
        raise InputError("family tagged dense is not dense")
    if kind == "exhaustive" and not is_exhaustive(P, ms):
        raise InputError("family tagged exhaustive is not exhaustive")
    if kind == "antichain" and not is_antichain(P, ms):
        raise InputError("family tagged antichain is not an antichain")
    for p in ms:
        P.check_condition(p)
    return ConditionFamily(ms, kind)


# -- predicates on condition sets ------------------------------------------


def leq(P: Poset, p: str, q: str) -> bool:
    return P.leq(p, q)


def compatible(P: Poset, p: str, q: str) -> bool:
    return P.compatible(p, q)


def is_filter(P: Poset, S: Iterable[str]) -> bool:
    """Nonempty, upward closed, downward directed."""
    mask = P.mask_of(S)
    if mask == 0:
        return False
    members = []
    m = mask
    while m:
        low = m & -m
        members.append(low.bit_length() - 1)
        m ^= low
    for i in members:
        if P._up[i] & ~mask:
            return False
    down = P._down
    for a in range(len(members)):
        for b in range(a + 1, len(members)):
            if not down[members[a]] & down[members[b]] & mask:
                return False
    return True


def is_dense(P: Poset, D: Iterable[str]) -> bool:
    """Every condition has an extension in D."""
    mask = P.mask_of(D)
    return all(d & mask for d in P._down)


def is_exhaustive(P: Poset, E: Iterable[str]) -> bool:
    """Every condition is compatible with some member of E."""
    mask = P.mask_of(E)
    return all(c & mask for c in P.compat_masks())


def is_antichain(P: Poset, A: Iterable[str]) -> bool:
    """All distinct pairs in A are incompatible."""
    members = sorted(set(A))
    down = P._down
    idx = [P.check_condition(p) for p in members]
    for a in range(len(idx)):
        for b in range(a + 1, len(idx)):
            if down[idx[a]] & down[idx[b]]:
                return False
    return True


def extend_to_maximal_antichain(P: Poset, A: Iterable[str], D: Iterable[str]) -> frozenset[str]:
    """Grow the antichain A inside D until it is maximal in P.

    Candidates from D are scanned in identifier order, so the result is
    deterministic.  D is expected to be dense; density itself is the caller's
    obligation and is what makes the greedy result maximal in all of P.
    """
    a_set = frozenset(A)
    d_set = frozenset(D)
    if not a_set <= d_set:
        raise InputError("antichain is not contained in the supplied dense set")
    if not is_antichain(P, a_set):
        raise InputError("starting set is not an antichain")
    chosen = sorted(a_set)
    chosen_mask = 0
    compat = P.compat_masks()
    for p in chosen:
        chosen_mask |= 1 << P.check_condition(p)
    for q in sorted(d_set):
        qi = P.check_condition(q)
        if 1 << qi & chosen_mask:
            continue
        if compat[qi] & chosen_mask:
            continue
        chosen.append(q)
        chosen_mask |= 1 << qi
    return frozenset(chosen)


def is_separative(P: Poset) -> bool:
    """Whenever p is not below q, some r <= p is incompatible with q."""
    n = len(P.ids)
    down = P._down
    compat = P.compat_masks()
    for p in range(n):
        for q in range(n):
            if down[q] >> p & 1:
                continue
            # need r <= p with r incompatible with q
            if down[p] & ~compat[q] == 0:
                return False
    return True


def separative_quotient(P: Poset) -> tuple[Poset, dict[str, str], bool]:
    """Quotient by equality of compatibility sets, ordered by their containment.

    Returns (quotient, projection, was_separative); each class is named after
    its lexicographically least member.  ``was_separative`` reports whether
    the projection is a bijection that preserves and reflects the order.
    """
    compat = P.compat_masks()
    classes: dict[int, list[str]] = {}
    for i, c in enumerate(P.ids):
        classes.setdefault(compat[i], []).append(c)
    reps = {row: min(members) for row, members in classes.items()}
    projection = {}
    for row, members in classes.items():
        for c in members:
            projection[c] = reps[row]
    rows = list(classes)
    pairs = []
    for r1 in rows:
        for r2 in rows:
            if r1 & ~r2 == 0:
                pairs.append((reps[r1], reps[r2]))
    quotient = Poset(
        P.name + ".sep",
        reps.values(),
        projection[P.top],
        pairs,
        closed=True,
    )
    was_separative = len(reps) == len(P.ids)
    if was_separative:
        for p in P.ids:
            for q in P.ids:
                if P.leq(p, q) != quotient.leq(projection[p], projection[q]):
                    was_separative = False
                    break
            if not was_separative:
                break
    return quotient, projection, was_separative
