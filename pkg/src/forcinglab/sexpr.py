"""A small s-expression reader shared by the formula and name grammars.

Produces lists, symbols, and hereditarily-finite-set literals (``#{...}``),
each tagged with the line/column where it started.  Comments run from ``;``
to end of line.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import InputError

Span = tuple[int, int]


@dataclass(frozen=True)
class SAtom:
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class SList:
    items: tuple["SNode", ...]
    line: int
    col: int


@dataclass(frozen=True)
class SSet:
    value: frozenset
    line: int
    col: int


SNode = Union[SAtom, SList, SSet]

_DELIMS = "();}"


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message: str) -> InputError:
        return InputError(f"{self.line}:{self.col}: {message}")

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def advance(self) -> str:
        ch = self.text[self.pos]
        self.pos += 1
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def skip_space(self):
        while self.pos < len(self.text):
            ch = self.peek()
            if ch == ";":
                while self.pos < len(self.text) and self.peek() != "\n":
                    self.advance()
            elif ch.isspace():
                self.advance()
            else:
                return

    def read(self) -> SNode:
        self.skip_space()
        if self.pos >= len(self.text):
            raise self.error("unexpected end of input")
        line, col = self.line, self.col
        ch = self.peek()
        if ch == "(":
            self.advance()
            items = []
            while True:
                self.skip_space()
                if self.pos >= len(self.text):
                    raise InputError(f"{line}:{col}: unclosed '('")
                if self.peek() == ")":
                    self.advance()
                    return SList(tuple(items), line, col)
                items.append(self.read())
        if ch == ")":
            raise self.error("unbalanced ')'")
        if ch == "#":
            return self.read_set()
        if ch == "}":
            raise self.error("unbalanced '}'")
        return self.read_atom()

    def read_set(self) -> SSet:
        line, col = self.line, self.col
        self.advance()
        if self.peek() != "{":
            raise self.error("expected '{' after '#'")
        self.advance()
        elems = []
        while True:
            self.skip_space()
            if self.pos >= len(self.text):
                raise InputError(f"{line}:{col}: unclosed '#{{'")
            if self.peek() == "}":
                self.advance()
                return SSet(frozenset(e.value for e in elems), line, col)
            if self.peek() != "#":
                raise self.error("HF literals contain only nested HF literals")
            elems.append(self.read_set())

    def read_atom(self) -> SAtom:
        line, col = self.line, self.col
        chars = []
        while self.pos < len(self.text):
            ch = self.peek()
            if ch.isspace() or ch in _DELIMS or ch == "#":
                break
            chars.append(self.advance())
        if not chars:
            raise self.error(f"unexpected character {self.peek()!r}")
        return SAtom("".join(chars), line, col)


def read_one(text: str) -> SNode:
    reader = _Reader(text)
    node = reader.read()
    reader.skip_space()
    if reader.pos < len(reader.text):
        raise reader.error("trailing input after expression")
    return node


def read_all(text: str) -> list[SNode]:
    reader = _Reader(text)
    out = []
    while True:
        reader.skip_space()
        if reader.pos >= len(reader.text):
            return out
        out.append(reader.read())


def print_hf(x: frozenset) -> str:
    inner = sorted((print_hf(y) for y in x), key=lambda s: (len(s), s))
    return "#{" + " ".join(inner) + "}"
