"""Readers for derivation spec files, model files and element literals.

Spec file::

    derivation f
    summand g1 h1
    summand g2 h2
    commute g1 g2      # zero or more

Model file::

    ring matrix 3                      # or: ring polytrunc 6
    elem c = [[0,1,0],[0,0,1],[0,0,0]] # polytrunc: [c0,c1,...]
    map d = inner c
    map f = innergen b1 b2
    assign f g1 h1 g2 h2               # optional
    commute g1 g2                      # optional

Map kinds: ``identity``, ``left E``, ``right E``, ``inner E``,
``innergen E1 E2``, ``conj E``, ``diff`` and ``compose M1 M2 ...`` (M1 acts
last).  Without ``assign`` the spec's symbols bind to maps of the same name;
``assign F G1 H1 G2 H2`` binds the spec's f, g1, h1, g2, h2 to the named maps
in that order.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .expansions import DerivationSpec
from .models import (
    Compose,
    ConjEndo,
    FormalDiff,
    Identity,
    InnerDer,
    InnerGenDer,
    LeftMul,
    MapEnv,
    RationalMatrixRing,
    RightMul,
    TruncatedPolyRing,
)
from .op_algebra import IDENTITY, CommutationHypotheses


class ParseError(ValueError):
    def __init__(self, message: str, lineno: int | None = None, source: str | None = None):
        self.lineno = lineno
        self.source = source
        where = ""
        if source:
            where += f"{source}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)


class ArityError(ParseError):
    """A spec file does not declare exactly two summands."""


_NUMBER = re.compile(r"-?\d+(?:/\d+)?")


def parse_literal(text: str):
    """Parse ``[[1,-2/3],[0,1]]`` or ``[1,0,2]`` into nested lists of Fractions."""
    quoted = _NUMBER.sub(lambda m: f'"{m.group(0)}"', text.strip())
    try:
        data = json.loads(quoted)
    except json.JSONDecodeError as exc:
        raise ValueError(f"bad element literal {text!r}") from exc

    def convert(x):
        if isinstance(x, list):
            return [convert(y) for y in x]
        if isinstance(x, str):
            try:
                return Fraction(x)
            except ZeroDivisionError as exc:
                raise ValueError(f"zero denominator in {x!r}") from exc
        raise ValueError(f"bad element literal {text!r}")

    if not isinstance(data, list):
        raise ValueError(f"element literal must be a list: {text!r}")
    return convert(data)


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _identifier(token: str, lineno: int, source) -> str:
    if not token.isidentifier():
        raise ParseError(f"invalid identifier {token!r}", lineno, source)
    return token


def parse_spec_text(text: str, source: str | None = None) -> DerivationSpec:
    f_name = None
    summands = []
    pairs = []
    for lineno, line in _lines(text):
        words = line.split()
        head, args = words[0], words[1:]
        if head == "derivation" and len(args) == 1:
            if f_name is not None:
                raise ParseError("duplicate derivation line", lineno, source)
            f_name = _identifier(args[0], lineno, source)
        elif head == "summand" and len(args) == 2:
            summands.append(tuple(_identifier(a, lineno, source) for a in args))
            if len(summands) > 2:
                raise ArityError("more than two summands", lineno, source)
        elif head == "commute" and len(args) == 2:
            pairs.append(tuple(_identifier(a, lineno, source) for a in args))
        else:
            raise ParseError(f"cannot parse {line!r}", lineno, source)
    if f_name is None:
        raise ParseError("missing 'derivation' line", None, source)
    if f_name == IDENTITY:
        raise ParseError("the derived map cannot be the identity I", None, source)
    if len(summands) != 2:
        raise ArityError(f"expected exactly two summands, found {len(summands)}", None, source)
    return DerivationSpec(f_name, tuple(summands), CommutationHypotheses(pairs))


def parse_spec_file(path) -> DerivationSpec:
    path = Path(path)
    return parse_spec_text(path.read_text(encoding="utf-8"), str(path))


@dataclass
class Model:
    ring: object
    elements: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    assign: tuple | None = None
    hyp: CommutationHypotheses = field(default_factory=CommutationHypotheses)

    def element(self, literal: str):
        """Parse a command-line literal, or look up a named element."""
        if literal in self.elements:
            return self.elements[literal]
        return self.ring.element(parse_literal(literal))

    def env_for(self, spec: DerivationSpec) -> MapEnv:
        assignments = dict(self.maps)
        if self.assign is None:
            if spec.f_name not in assignments:
                raise ParseError(f"model has no map for {spec.f_name!r}")
            return MapEnv(self.ring, assignments, assignments[spec.f_name])

        def resolve(name):
            return Identity() if name == IDENTITY else self.maps[name]

        f_model, *slot_models = self.assign
        slots = (spec.g1, spec.h1, spec.g2, spec.h2)
        bound: dict[str, str] = {}
        for sym, model_name in zip(slots, slot_models):
            if sym == IDENTITY:
                continue
            if bound.setdefault(sym, model_name) != model_name:
                raise ParseError(f"assign binds spec symbol {sym!r} to both {bound[sym]!r} and {model_name!r}")
            assignments[sym] = resolve(model_name)
        f_map = resolve(f_model)
        # the summand slots decide what f's own symbol means inside words
        if spec.f_name not in slots:
            assignments[spec.f_name] = f_map
        return MapEnv(self.ring, assignments, f_map)


def _build_map(kind: str, args: list[str], model: Model, lineno: int, source):
    def elem(name):
        if name not in model.elements:
            raise ParseError(f"unknown element {name!r}", lineno, source)
        return model.elements[name]

    def arity(k):
        if len(args) != k:
            raise ParseError(f"map kind {kind!r} takes {k} argument(s)", lineno, source)

    try:
        if kind == "identity":
            arity(0)
            return Identity()
        if kind == "left":
            arity(1)
            return LeftMul(elem(args[0]))
        if kind == "right":
            arity(1)
            return RightMul(elem(args[0]))
        if kind == "inner":
            arity(1)
            return InnerDer(elem(args[0]))
        if kind == "innergen":
            arity(2)
            return InnerGenDer(elem(args[0]), elem(args[1]))
        if kind == "conj":
            arity(1)
            return ConjEndo(elem(args[0]))
        if kind == "diff":
            arity(0)
            if not isinstance(model.ring, TruncatedPolyRing):
                raise ParseError("diff needs a polytrunc ring", lineno, source)
            return FormalDiff()
        if kind == "compose":
            if not args:
                raise ParseError("compose needs at least one map", lineno, source)
            parts = []
            for name in args:
                if name == IDENTITY:
                    parts.append(Identity())
                elif name in model.maps:
                    parts.append(model.maps[name])
                else:
                    raise ParseError(f"unknown map {name!r}", lineno, source)
            return Compose(parts)
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), lineno, source) from exc
    raise ParseError(f"unknown map kind {kind!r}", lineno, source)


def parse_model_text(text: str, source: str | None = None) -> Model:
    model = None
    for lineno, line in _lines(text):
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "ring":
            if model is not None:
                raise ParseError("duplicate ring line", lineno, source)
            parts = rest.split()
            if len(parts) != 2 or not parts[1].isdigit():
                raise ParseError("expected 'ring matrix N' or 'ring polytrunc M'", lineno, source)
            try:
                if parts[0] == "matrix":
                    ring = RationalMatrixRing(int(parts[1]))
                elif parts[0] == "polytrunc":
                    ring = TruncatedPolyRing(int(parts[1]))
                else:
                    raise ParseError(f"unknown ring kind {parts[0]!r}", lineno, source)
            except ParseError:
                raise
            except ValueError as exc:
                raise ParseError(str(exc), lineno, source) from exc
            model = Model(ring)
            continue
        if model is None:
            raise ParseError("the first statement must be a ring line", lineno, source)
        if head in ("elem", "map"):
            name, eq, value = rest.partition("=")
            name = name.strip()
            if not eq or not value.strip():
                raise ParseError(f"expected '{head} NAME = ...'", lineno, source)
            _identifier(name, lineno, source)
            if name == IDENTITY:
                raise ParseError("I is reserved for the identity map", lineno, source)
            if head == "elem":
                try:
                    model.elements[name] = model.ring.element(parse_literal(value))
                except ValueError as exc:
                    raise ParseError(str(exc), lineno, source) from exc
            else:
                kind, *args = value.split()
                model.maps[name] = _build_map(kind, args, model, lineno, source)
        elif head == "assign":
            names = rest.split()
            if len(names) != 5:
                raise ParseError("assign takes five map names: F G1 H1 G2 H2", lineno, source)
            for name in names:
                if name != IDENTITY and name not in model.maps:
                    raise ParseError(f"unknown map {name!r}", lineno, source)
            if names[0] == IDENTITY:
                raise ParseError("the derived map cannot be the identity I", lineno, source)
            model.assign = tuple(names)
        elif head == "commute":
            names = rest.split()
            if len(names) != 2:
                raise ParseError("commute takes two map names", lineno, source)
            for name in names:
                _identifier(name, lineno, source)
            model.hyp = model.hyp.union(CommutationHypotheses([names]))
        else:
            raise ParseError(f"cannot parse {line!r}", lineno, source)
    if model is None:
        raise ParseError("missing ring line", None, source)
    return model


def parse_model_file(path) -> Model:
    path = Path(path)
    return parse_model_text(path.read_text(encoding="utf-8"), str(path))
