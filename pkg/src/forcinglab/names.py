"""Names over a forcing poset and their interpretation.

A name is a finite set of (child name, condition) pairs; hereditarily finite
sets are plain frozensets (so extensional equality is structural equality).
Interpreting a name under a filter keeps exactly the children whose attached
condition lies in the filter, recursively.

Condition identifiers are coded as hereditarily finite sets through the von
Neumann naturals, with identifiers enumerated in lexicographic order; that
coding is what lets the canonical name for the generic filter interpret back
to the filter itself.
"""

from __future__ import annotations

from typing import Iterable, Optional, Union
from weakref import WeakKeyDictionary

from .errors import InputError
from .poset import Filter, Poset

HF = frozenset

_EMPTY_HF: HF = frozenset()


_HF_RANK: dict[HF, int] = {}


def hf_rank(x: HF) -> int:
    hit = _HF_RANK.get(x)
    if hit is not None:
        return hit
    stack = [x]
    while stack:
        cur = stack[-1]
        if cur in _HF_RANK:
            stack.pop()
            continue
        pending = [y for y in cur if y not in _HF_RANK]
        if pending:
            stack.extend(pending)
        else:
            _HF_RANK[cur] = 1 + max((_HF_RANK[y] for y in cur), default=-1)
            stack.pop()
    return _HF_RANK[x]


_VN: list[HF] = [_EMPTY_HF]


def von_neumann(i: int) -> HF:
    """The i-th von Neumann natural {0, 1, ..., i-1}."""
    if i < 0:
        raise InputError("von Neumann coding is defined for naturals")
    while len(_VN) <= i:
        _VN.append(frozenset(_VN))
    return _VN[i]


def von_neumann_value(x: HF) -> Optional[int]:
    """Decode a von Neumann natural, or None if x is not one."""
    i = len(x)
    return i if von_neumann(i) == x else None


class Name:
    """A finite set of (child, condition) pairs, hashable and immutable."""

    __slots__ = ("entries", "rank", "_hash")

    def __init__(self, entries: Iterable[tuple["Name", str]] = ()):
        es = frozenset(entries)
        for child, cond in es:
            if not isinstance(child, Name) or not isinstance(cond, str):
                raise InputError("name entries must be (Name, condition id) pairs")
        object.__setattr__(self, "entries", es)
        object.__setattr__(self, "rank", 0 if not es else 1 + max(c.rank for c, _ in es))
        object.__setattr__(self, "_hash", hash(es))

    def __setattr__(self, *_):
        raise AttributeError("Name is immutable")

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return isinstance(other, Name) and self._hash == other._hash and self.entries == other.entries

    def __repr__(self) -> str:
        return f"Name({len(self.entries)} entries, rank {self.rank})"


EMPTY_NAME = Name()


def rank(x: Union[Name, HF]) -> int:
    """Rank of a name or hereditarily finite set: 0 when empty, else one more
    than the largest child rank."""
    if isinstance(x, Name):
        return x.rank
    if isinstance(x, frozenset):
        return hf_rank(x)
    raise InputError(f"rank is defined on names and HF sets, not {type(x).__name__}")


_CHECK_CACHE: dict[tuple[HF, str], Name] = {}


def check_name(x: HF, P: Poset) -> Name:
    """The constant name for x: every entry carries the greatest condition."""
    key = (x, P.top)
    hit = _CHECK_CACHE.get(key)
    if hit is None:
        hit = Name((check_name(y, P), P.top) for y in x)
        _CHECK_CACHE[key] = hit
    return hit


def condition_codes(P: Poset) -> dict[str, HF]:
    """Identifier -> HF code, following lexicographic identifier order."""
    return {cid: von_neumann(i) for i, cid in enumerate(P.ids)}


def decode_condition(P: Poset, x: HF) -> Optional[str]:
    i = von_neumann_value(x)
    if i is None or i >= len(P.ids):
        return None
    return P.ids[i]


_GENERIC_CACHE: "WeakKeyDictionary[Poset, Name]" = WeakKeyDictionary()


def generic_name(P: Poset) -> Name:
    """The canonical name interpreting to the generic filter: one entry
    (coded check name of q, q) per condition q."""
    hit = _GENERIC_CACHE.get(P)
    if hit is None:
        hit = Name((check_name(von_neumann(i), P), cid) for i, cid in enumerate(P.ids))
        _GENERIC_CACHE[P] = hit
    return hit


_HEREDITARY_CACHE: dict[Name, frozenset[Name]] = {}


def hereditary_names(n: Name) -> frozenset[Name]:
    """All names occurring strictly inside n, at any depth."""
    hit = _HEREDITARY_CACHE.get(n)
    if hit is not None:
        return hit
    stack = [n]
    while stack:
        cur = stack[-1]
        if cur in _HEREDITARY_CACHE:
            stack.pop()
            continue
        pending = [c for c, _ in cur.entries if c not in _HEREDITARY_CACHE]
        if pending:
            stack.extend(pending)
        else:
            acc: set[Name] = set()
            for child, _ in cur.entries:
                acc.add(child)
                acc |= _HEREDITARY_CACHE[child]
            _HEREDITARY_CACHE[cur] = frozenset(acc)
            stack.pop()
    return _HEREDITARY_CACHE[n]


_CHECK_SHAPED: dict[tuple[Name, str], bool] = {}


def is_check_shaped(n: Name, P: Poset) -> bool:
    """True when every condition hereditarily inside n is the greatest one."""
    top = P.top
    key = (n, top)
    hit = _CHECK_SHAPED.get(key)
    if hit is not None:
        return hit
    stack = [n]
    while stack:
        cur = stack[-1]
        if (cur, top) in _CHECK_SHAPED:
            stack.pop()
            continue
        if any(cond != top for _, cond in cur.entries):
            _CHECK_SHAPED[(cur, top)] = False
            stack.pop()
            continue
        pending = [c for c, _ in cur.entries if (c, top) not in _CHECK_SHAPED]
        if pending:
            stack.extend(pending)
        else:
            _CHECK_SHAPED[(cur, top)] = all(_CHECK_SHAPED[(c, top)] for c, _ in cur.entries)
            stack.pop()
    return _CHECK_SHAPED[key]


def validate_name(n: Name, P: Poset) -> tuple[bool, Optional[tuple[tuple[str, ...], str]]]:
    """Check the nested-condition discipline: inside an entry attached to q,
    deeper entry conditions must extend to q.

    Constant (check-shaped) subtrees are exempt: their entries all carry the
    greatest condition no matter where they sit, and they interpret the same
    way under every filter.  Returns (ok, first violation), the violation
    being the path of entry conditions down to the offender.  Unknown
    condition identifiers raise an input error.
    """

    def entry_key(entry: tuple[Name, str]):
        return (entry[1], entry[0].rank, id(entry[0]))

    ok_memo: set[tuple[Name, Optional[str]]] = set()

    def walk(name: Name, bound: Optional[str], path: tuple[str, ...]):
        if (name, bound) in ok_memo:
            return None
        for child, cond in sorted(name.entries, key=entry_key):
            P.check_condition(cond)
            here = path + (cond,)
            if bound is not None and not P.leq(cond, bound):
                if not (cond == P.top and is_check_shaped(child, P)):
                    return here
            bad = walk(child, cond, here)
            if bad is not None:
                return bad
        ok_memo.add((name, bound))
        return None

    violation = walk(n, None, ())
    if violation is None:
        return True, None
    return False, (violation[:-1], violation[-1])


def interpret(n: Name, G: Filter) -> HF:
    """Evaluate the name under the filter, extensionally."""
    members = G.members
    memo: dict[Name, HF] = {}
    stack = [n]
    while stack:
        cur = stack[-1]
        if cur in memo:
            stack.pop()
            continue
        live = [child for child, cond in cur.entries if cond in members]
        pending = [c for c in live if c not in memo]
        if pending:
            stack.extend(pending)
        else:
            memo[cur] = frozenset(memo[c] for c in live)
            stack.pop()
    return memo[n]
