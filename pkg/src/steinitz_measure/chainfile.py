"""Line-oriented chain files.

Explicit chain::

    chain unital=true st=1/1 * 2^inf
    stage 1 weights=1/2,1/2
    stage 2 standard=4
    embed 1 0->{0,1},1->{2,3}

``st=`` (optional) is the Steinitz invariant of the stage-1 top and
``standard=n`` abbreviates ``n`` equal weights.  Symbolic model::

    model S(3/2;5^inf) b=5^i depth=8

Blank lines and ``#`` comments are ignored.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Union

from .chains import ChainPresentation, SymbolicChain, construct_model
from .literals import ParseError, parse_descriptor, parse_rule, parse_scaled, parse_weights, resolve_rule
from .measure import AtomMap, FiniteMeasureAlgebra, iter_bits

_KV = re.compile(r"(\w+)=")


def _fields(line: str, offset: int) -> dict:
    """``key=value`` pairs; a value runs until the next `` key=``."""
    out = {}
    marks = [m for m in _KV.finditer(line)]
    for k, m in enumerate(marks):
        end = marks[k + 1].start() if k + 1 < len(marks) else len(line)
        out[m.group(1)] = (line[m.end():end].strip(), offset + m.end())
    return out


def _reraise(e: ParseError, base: int, lineno: int):
    raise ParseError(f"line {lineno}: {str(e).split(': ', 1)[1]}", base + e.position) from None


def load_chain(text: str) -> Union[ChainPresentation, SymbolicChain]:
    offset = 0
    header = None
    stages: dict[int, FiniteMeasureAlgebra] = {}
    embeds: dict[int, tuple] = {}
    for lineno, raw in enumerate(text.splitlines(keepends=True), start=1):
        line = raw.split("#", 1)[0].rstrip()
        base = offset
        offset += len(raw)
        if not line.strip():
            continue
        word = line.split()[0]
        if header is None:
            if word == "model":
                return _load_model(line, base, lineno)
            if word != "chain":
                raise ParseError(f"line {lineno}: expected 'chain' or 'model' header", base)
            header = _fields(line, base)
            continue
        if word == "stage":
            m = re.match(r"\s*stage\s+(\d+)\s+", line)
            if not m:
                raise ParseError(f"line {lineno}: expected 'stage <i> weights=...'", base)
            i = int(m.group(1))
            f = _fields(line, base)
            try:
                if "standard" in f:
                    stages[i] = FiniteMeasureAlgebra.standard(int(f["standard"][0]))
                elif "weights" in f:
                    val, pos = f["weights"]
                    try:
                        stages[i] = FiniteMeasureAlgebra(tuple(parse_weights(val)))
                    except ParseError as e:
                        _reraise(e, pos, lineno)
                else:
                    raise ParseError(f"line {lineno}: stage needs weights= or standard=", base)
            except ValueError as e:
                if isinstance(e, ParseError):
                    raise
                raise ParseError(f"line {lineno}: {e}", base)
        elif word == "embed":
            m = re.match(r"\s*embed\s+(\d+)\s+(.*)$", line)
            if not m:
                raise ParseError(f"line {lineno}: expected 'embed <i> <atom>->{{set}},...'", base)
            embeds[int(m.group(1))] = _parse_images(m.group(2), base + m.start(2), lineno)
        else:
            raise ParseError(f"line {lineno}: unknown directive {word!r}", base)
    if header is None:
        raise ParseError("empty chain file", 0)
    n = len(stages)
    if sorted(stages) != list(range(1, n + 1)) or sorted(embeds) != list(range(1, n)):
        raise ParseError("stages must be numbered 1..N with embeddings 1..N-1", 0)
    unital_txt, pos = header.get("unital", ("", 0))
    if unital_txt not in ("true", "false"):
        raise ParseError("line 1: unital=<true|false> required", pos)
    st = None
    if "st" in header:
        val, pos = header["st"]
        try:
            st = parse_scaled(val)
        except ParseError as e:
            _reraise(e, pos, 1)
    st_list = [stages[i] for i in range(1, n + 1)]
    maps = []
    for i in range(1, n):
        img = embeds[i]
        images = [0] * st_list[i - 1].n
        for atom, targets in img:
            if atom >= len(images):
                raise ParseError(f"embedding {i}: atom {atom} outside stage {i}", 0)
            images[atom] = sum(1 << t for t in targets)
        maps.append(AtomMap(st_list[i - 1], st_list[i], tuple(images)))
    return ChainPresentation(tuple(st_list), tuple(maps), unital_txt == "true", st)


def _parse_images(text: str, base: int, lineno: int):
    out = []
    for m in re.finditer(r"\s*(\d+)\s*->\s*\{([\d,\s]*)\}\s*(,|$)", text):
        targets = [int(t) for t in m.group(2).replace(" ", "").split(",") if t]
        out.append((int(m.group(1)), targets))
    consumed = sum(len(m.group(0)) for m in re.finditer(r"\s*(\d+)\s*->\s*\{([\d,\s]*)\}\s*(,|$)", text))
    if consumed != len(text):
        raise ParseError(f"line {lineno}: malformed atom image list", base + consumed)
    return out


def _load_model(line: str, base: int, lineno: int) -> SymbolicChain:
    rest = line.split(None, 1)[1] if len(line.split(None, 1)) > 1 else ""
    f = _fields(rest, base + line.index(rest) if rest else base)
    first = _KV.search(rest)
    dtext = rest[: first.start()] if first else rest
    dpos = base + line.index(rest) if rest else base
    try:
        d = parse_descriptor(dtext)
    except ParseError as e:
        _reraise(e, dpos, lineno)
    rule = None
    if "b" in f:
        val, pos = f["b"]
        try:
            rule = parse_rule(val)
        except ParseError as e:
            _reraise(e, pos, lineno)
    depth = 8
    if "depth" in f:
        val, pos = f["depth"]
        if not val.isdigit():
            raise ParseError(f"line {lineno}: depth must be a positive integer", pos)
        depth = int(val)
    s = getattr(d, "s", None)
    return construct_model(d, depth, resolve_rule(rule, s) if s is not None else None)


def dump_chain(c: ChainPresentation) -> str:
    lines = [f"chain unital={'true' if c.unital else 'false'}" + (f" st={c.st}" if c.st else "")]
    for i, A in enumerate(c.stages, start=1):
        if A.is_standard and A.total == 1:
            lines.append(f"stage {i} standard={A.n}")
        else:
            lines.append(f"stage {i} weights=" + ",".join(str(Fraction(w)) for w in A.weights))
    for i, e in enumerate(c.embeddings, start=1):
        parts = [f"{a}->{{{','.join(map(str, iter_bits(img)))}}}" for a, img in enumerate(e.images)]
        lines.append(f"embed {i} " + ",".join(parts))
    return "\n".join(lines) + "\n"


def dump_model(sc: SymbolicChain) -> str:
    return f"model {sc.target} b={sc.b_rule} depth={sc.depth}\n"
