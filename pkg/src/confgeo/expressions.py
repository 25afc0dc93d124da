"""Minimal arithmetic grammar for scalar field expressions.

Supported: ``+ - * / ^``, parentheses, numeric literals, coordinate names,
``sin cos exp log sqrt``, and ``norm2(...)`` (sum of squares; with no
arguments it squares every coordinate).  Parsing produces a closure that
evaluates on Jet or ndarray coordinates alike.
"""

from __future__ import annotations

import re

from . import jets
from .errors import ConfigParseError

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[()+\-*/^,]))"
)

_FUNCTIONS = {
    "sin": jets.sin,
    "cos": jets.cos,
    "exp": jets.exp,
    "log": jets.log,
    "sqrt": jets.sqrt,
}

_CONSTANTS = {"pi": 3.141592653589793}


def tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            if text[pos:].strip() == "":
                break
            raise ConfigParseError(f"unexpected character {text[pos]!r} in expression")
        pos = m.end()
        if m.lastgroup == "num":
            tokens.append(("num", float(m.group("num"))))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group("name")))
        else:
            op = m.group("op")
            tokens.append(("op", "^" if op == "**" else op))
    tokens.append(("end", None))
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None, value=None):
        tok = self.tokens[self.pos]
        if kind and tok[0] != kind or value is not None and tok[1] != value:
            raise ConfigParseError(f"unexpected token {tok[1]!r}")
        self.pos += 1
        return tok

    def parse(self):
        node = self.expr()
        if self.peek()[0] != "end":
            raise ConfigParseError(f"trailing input near {self.peek()[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            op = self.take()[1]
            rhs = self.term()
            node = ("add" if op == "+" else "sub", node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek() == ("op", "*") or self.peek() == ("op", "/"):
            op = self.take()[1]
            rhs = self.unary()
            node = ("mul" if op == "*" else "div", node, rhs)
        return node

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            return ("neg", self.unary())
        if self.peek() == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek() == ("op", "^"):
            self.take()
            return ("pow", base, self.unary())
        return base

    def atom(self):
        kind, value = self.peek()
        if kind == "num":
            self.take()
            return ("const", value)
        if kind == "name":
            self.take()
            if self.peek() == ("op", "("):
                self.take()
                args = []
                if self.peek() != ("op", ")"):
                    args.append(self.expr())
                    while self.peek() == ("op", ","):
                        self.take()
                        args.append(self.expr())
                self.take("op", ")")
                return ("call", value, args)
            return ("var", value)
        if (kind, value) == ("op", "("):
            self.take()
            node = self.expr()
            self.take("op", ")")
            return node
        raise ConfigParseError(f"unexpected token {value!r}")


def _check_names(node, names):
    kind = node[0]
    if kind == "var":
        if node[1] not in names and node[1] not in _CONSTANTS:
            raise ConfigParseError(f"unknown coordinate or constant {node[1]!r}")
    elif kind == "call":
        if node[1] not in _FUNCTIONS and node[1] != "norm2":
            raise ConfigParseError(f"unknown function {node[1]!r}")
        for a in node[2]:
            _check_names(a, names)
    elif kind in ("add", "sub", "mul", "div", "pow"):
        _check_names(node[1], names)
        _check_names(node[2], names)
    elif kind == "neg":
        _check_names(node[1], names)


def compile_expression(text, names):
    """Compile an expression string into fn(coords) for the given axis names."""
    tree = _Parser(tokenize(text)).parse()
    _check_names(tree, names)
    index = {name: i for i, name in enumerate(names)}

    def run(node, coords):
        kind = node[0]
        if kind == "const":
            return node[1]
        if kind == "var":
            if node[1] in index:
                return coords[index[node[1]]]
            return _CONSTANTS[node[1]]
        if kind == "neg":
            return -run(node[1], coords)
        if kind == "add":
            return run(node[1], coords) + run(node[2], coords)
        if kind == "sub":
            return run(node[1], coords) - run(node[2], coords)
        if kind == "mul":
            return run(node[1], coords) * run(node[2], coords)
        if kind == "div":
            return run(node[1], coords) / run(node[2], coords)
        if kind == "pow":
            exponent = node[2]
            if exponent[0] == "const":
                return jets.power(run(node[1], coords), exponent[1])
            return jets.power(run(node[1], coords), run(exponent, coords))
        if kind == "call":
            name, args = node[1], node[2]
            if name == "norm2":
                vals = [run(a, coords) for a in args] if args else list(coords)
                total = vals[0] * vals[0]
                for v in vals[1:]:
                    total = total + v * v
                return total
            return _FUNCTIONS[name](run(args[0], coords))
        raise ConfigParseError(f"bad expression node {kind!r}")

    def fn(coords):
        return run(tree, coords)

    fn.source = text
    return fn
