"""
Partition expressions.

Grammar, loosest binding first::

    expr     := tensored (';' tensored)*        a ; b  puts b below a
    tensored := postfix (('⊗' | 'ox') postfix)*
    postfix  := primary ('*' | '~')*            * involutes, ~ reflects
    primary  := '(' expr ')' | literal | name | name '(' args ')'

Literals use the partition text format (``P(0,2): {l1,l2}`` or
``P(0,4)#{1,4}{2,3}``). Names are the built-in constants (``pair``,
``fourblock``, ...), the families ``b``, ``pi``, ``sigma``, ``tau``, ``idn``
taking one integer, and the constructions ``nest``, ``mult``, ``pdouble``,
``sdouble``, ``rot`` and ``wrot``.

Evaluation returns the partition and the number of loops removed by the ``;``
compositions written in the expression. Loops removed inside construction
words are not counted.

Error positions are byte offsets into the UTF-8 encoded input.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Union

from . import constructions as cons
from . import partition as pc
from .errors import ParseError
from .partition import Partition


@dataclass(frozen=True)
class Literal:
    p: Partition
    pos: int


@dataclass(frozen=True)
class Name:
    name: str
    pos: int


@dataclass(frozen=True)
class Int:
    value: int
    pos: int


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple[Node, ...]
    pos: int


@dataclass(frozen=True)
class TensorNode:
    left: Node
    right: Node


@dataclass(frozen=True)
class ComposeNode:
    top: Node
    bottom: Node


@dataclass(frozen=True)
class Unary:
    op: str  # '*' or '~'
    arg: Node


Node = Union[Literal, Name, Int, Call, TensorNode, ComposeNode, Unary]

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT = re.compile(r"\d+")
_LITERAL_START = re.compile(r"P\s*\(\s*\d")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.i = 0

    def error(self, message: str, expected: str | None = None, at: int | None = None) -> ParseError:
        at = self.i if at is None else at
        return ParseError(message, len(self.text[:at].encode("utf-8")), expected)

    def skip(self) -> None:
        while self.i < len(self.text) and self.text[self.i].isspace():
            self.i += 1

    def peek(self, s: str) -> bool:
        self.skip()
        return self.text.startswith(s, self.i)

    def eat(self, s: str) -> bool:
        if self.peek(s):
            self.i += len(s)
            return True
        return False

    def expect(self, s: str) -> None:
        if not self.eat(s):
            raise self.error("unexpected input" if self.i < len(self.text) else "unexpected end of input", repr(s))

    def parse(self) -> Node:
        node = self.expr()
        self.skip()
        if self.i < len(self.text):
            raise self.error("trailing input", "';', '⊗', 'ox' or end of input")
        return node

    def expr(self) -> Node:
        node = self.tensored()
        while self.eat(";"):
            node = ComposeNode(node, self.tensored())
        return node

    def _tensor_op(self) -> bool:
        if self.eat("⊗"):
            return True
        self.skip()
        m = _IDENT.match(self.text, self.i)
        if m and m.group() == "ox":
            self.i = m.end()
            return True
        return False

    def tensored(self) -> Node:
        node = self.postfix()
        while self._tensor_op():
            node = TensorNode(node, self.postfix())
        return node

    def postfix(self) -> Node:
        node = self.primary()
        while True:
            if self.eat("*"):
                node = Unary("*", node)
            elif self.eat("~"):
                node = Unary("~", node)
            else:
                return node

    def primary(self) -> Node:
        self.skip()
        start = self.i
        if self.i >= len(self.text):
            raise self.error("unexpected end of input", "a partition")
        if self.eat("("):
            node = self.expr()
            self.expect(")")
            return node
        if _LITERAL_START.match(self.text, self.i):
            try:
                p, end = pc.parse_partition(self.text, self.i)
            except ParseError as exc:
                raise self.error(str(exc).split(" at offset")[0], exc.expected, exc.position) from exc
            self.i = end
            return Literal(p, start)
        m = _INT.match(self.text, self.i)
        if m:
            self.i = m.end()
            return Int(int(m.group()), start)
        m = _IDENT.match(self.text, self.i)
        if not m:
            raise self.error("unexpected input", "a partition")
        self.i = m.end()
        name = m.group()
        if self.eat("("):
            args = [self.expr()]
            while self.eat(","):
                args.append(self.expr())
            self.expect(")")
            return Call(name, tuple(args), start)
        return Name(name, start)


def parse(text: str) -> Node:
    return _Parser(text).parse()


@dataclass(frozen=True)
class Value:
    p: Partition
    loops: int = 0


def _byte_pos(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


# construction name -> (argument kinds, builder)
_CONSTRUCTIONS: dict[str, tuple[str, Callable[..., cons.Construction]]] = {
    "nest": ("ppi", cons.nest),
    "mult": ("pii", cons.multi_nest),
    "pdouble": ("pi", cons.partial_doubling),
    "sdouble": ("pi", cons.shifted_doubling),
    "rot": ("pp", cons.line_rotate),
    "wrot": ("pp", cons.weak_line_rotate),
}


class _Evaluator:
    def __init__(self, text: str):
        self.text = text

    def error(self, message: str, pos: int, expected: str | None = None) -> ParseError:
        return ParseError(message, _byte_pos(self.text, pos), expected)

    def partition(self, node: Node) -> Value:
        if isinstance(node, Int):
            raise self.error("expected a partition, found an integer", node.pos)
        return self.eval(node)

    def integer(self, node: Node) -> int:
        if not isinstance(node, Int):
            raise self.error("expected an integer argument", getattr(node, "pos", 0))
        return node.value

    def eval(self, node: Node) -> Value:
        if isinstance(node, Literal):
            return Value(node.p)
        if isinstance(node, Name):
            if node.name in pc.NAMED_CONSTANTS:
                return Value(pc.NAMED_CONSTANTS[node.name])
            raise self.error(f"unknown name {node.name!r}", node.pos, "a named partition")
        if isinstance(node, Int):
            raise self.error("expected a partition, found an integer", node.pos)
        if isinstance(node, TensorNode):
            a, b = self.partition(node.left), self.partition(node.right)
            return Value(pc.tensor(a.p, b.p), a.loops + b.loops)
        if isinstance(node, ComposeNode):
            top, bottom = self.partition(node.top), self.partition(node.bottom)
            out = pc.compose(bottom.p, top.p)
            return Value(out.result, top.loops + bottom.loops + out.removed_loops)
        if isinstance(node, Unary):
            a = self.partition(node.arg)
            op = pc.involute if node.op == "*" else pc.reflect
            return Value(op(a.p), a.loops)
        return self.call(node)

    def call(self, node: Call) -> Value:
        if node.name in pc.NAMED_FAMILIES:
            if len(node.args) != 1:
                raise self.error(f"{node.name} takes one integer", node.pos)
            return Value(pc.NAMED_FAMILIES[node.name](self.integer(node.args[0])))
        if node.name not in _CONSTRUCTIONS:
            raise self.error(f"unknown function {node.name!r}", node.pos, "a family or construction name")
        kinds, build = _CONSTRUCTIONS[node.name]
        if len(node.args) != len(kinds):
            raise self.error(f"{node.name} takes {len(kinds)} arguments, got {len(node.args)}", node.pos)
        args, loops = [], 0
        for kind, arg in zip(kinds, node.args):
            if kind == "p":
                v = self.partition(arg)
                loops += v.loops
                args.append(v.p)
            else:
                args.append(self.integer(arg))
        return Value(build(*args).result, loops)


def evaluate(text: str) -> Value:
    """Parse and evaluate; partition-calculus errors propagate unchanged."""
    return _Evaluator(text).eval(parse(text))
