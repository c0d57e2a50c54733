"""Command line: ``steinitz-measure <verb> ...``.

Exit codes: 0 success, 1 domain error, 2 parse error.  Errors are printed
as a single ``error: ...`` line on stderr.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .chainfile import dump_chain, dump_model, load_chain
from .chains import (
    ChainError,
    ChainPresentation,
    SymbolicChain,
    back_and_forth_chains,
    construct_model,
    realize,
    symbolic_spectrum,
    validate_chain,
)
from .literals import ParseError, parse_descriptor, parse_element, parse_rule, parse_scaled, parse_steinitz, resolve_rule
from .spectra import canonicalize, member, separating_witness, spectra_equal
from .steinitz import rationally_connected, st_div_by_nat, st_lcm, st_leq


class DomainError(Exception):
    pass


def _frac(q) -> str:
    if q is None:
        return "-"
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _bool(b: bool) -> str:
    return "true" if b else "false"


def table(header, rows) -> str:
    cells = [list(map(str, header))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)).rstrip() for r in cells)


# ---------------------------------------------------------------------------
# st


def cmd_st(a) -> str:
    args = a.args
    need = {"eval": 1, "lcm": 2, "div": 2, "leq": 2, "connected": 2}[a.op]
    if len(args) != need:
        raise DomainError(f"st {a.op} takes {need} argument(s)")
    if a.op == "eval":
        t = parse_scaled(args[0])
        return str(t.base) if t.scale == 1 else str(t)
    s1 = parse_steinitz(args[0])
    if a.op == "div":
        try:
            b = int(args[1])
        except ValueError:
            raise ParseError("expected a positive integer", 0, args[1])
        if b < 1:
            raise DomainError("divisor must be positive")
        try:
            return str(st_div_by_nat(s1, b))
        except ValueError as e:
            raise DomainError(str(e))
    s2 = parse_steinitz(args[1])
    if a.op == "lcm":
        return str(st_lcm(s1, s2))
    if a.op == "leq":
        return _bool(st_leq(s1, s2))
    q = rationally_connected(s1, s2)
    return "false" if q is None else f"true q={_frac(q)}"


# ---------------------------------------------------------------------------
# spec


def cmd_spec(a) -> str:
    if a.op == "member":
        if len(a.args) != 2:
            raise DomainError("spec member takes <scaled> <descriptor>")
        return _bool(member(parse_scaled(a.args[0]), parse_descriptor(a.args[1])))
    if a.op == "equal":
        if len(a.args) != 2:
            raise DomainError("spec equal takes <d1> <d2>")
        d1, d2 = parse_descriptor(a.args[0]), parse_descriptor(a.args[1])
        eq = spectra_equal(d1, d2)
        if eq:
            return "true"
        try:
            w = separating_witness(d1, d2)
        except ValueError:
            w = None  # different classes or kinds; no single value to show
        return "false" + (f" witness={w}" if w is not None else "")
    if a.op == "canon":
        if len(a.args) != 1:
            raise DomainError("spec canon takes <descriptor>")
        inv = canonicalize(parse_descriptor(a.args[0]))
        out = [str(inv), f"descriptor {inv.as_descriptor()}"]
        pp = inv.rescaled_pair()
        if pp:
            out.append(f"pair s={pp[0]} r={_frac(pp[1])}")
        return "\n".join(out)
    raise DomainError(f"unknown spec operation {a.op}")


# ---------------------------------------------------------------------------
# chain


def _read_chain(path: str):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise DomainError(f"cannot read {path}: {e.strerror}")
    return load_chain(text)


def cmd_chain(a) -> str:
    if a.op == "build":
        if len(a.args) != 1:
            raise DomainError("chain build takes <descriptor>")
        d = parse_descriptor(a.args[0])
        rule = parse_rule(a.b) if a.b else None
        s = getattr(d, "s", None)
        sc = construct_model(d, a.depth, resolve_rule(rule, s) if s is not None else None)
        if a.explicit:
            return dump_chain(realize(sc)).rstrip("\n")
        rows = []
        for i, b, m in sc.prefix():
            corner = m * (sc.b(i + 1) // b) if i < sc.depth else "-"
            rows.append((i, b, m, corner, _frac(Fraction(m, b))))
        return dump_model(sc).rstrip("\n") + "\n" + table(("i", "b_i", "m_i", "corner", "m_i/b_i"), rows)
    if a.op == "classify":
        if len(a.args) != 1:
            raise DomainError("chain classify takes <file>")
        c = _read_chain(a.args[0])
        if isinstance(c, SymbolicChain):
            return f"spectrum {symbolic_spectrum(c)}"
        rep = validate_chain(c)
        if not rep.ok:
            raise DomainError(f"invalid chain at stage {rep.stage}: {rep.reason}")
        rows = [(i, c.n_atoms(i), _frac(c.alphas[i - 1]), _frac(c.lambdas[i - 1]) if i < c.depth else "-",
                 _frac(c.chain_measure(c.top(i)))) for i in range(1, c.depth + 1)]
        out = ["valid", f"unital {_bool(c.unital)}",
               table(("stage", "atoms", "alpha_i", "lambda_i", "mu(top_i)"), rows)]
        if c.st is not None:
            out.append(f"st(top_{c.depth}) = {c.st_of(c.top(c.depth))}")
        out.append("prefix facts only; no limit is inferred from a bare prefix")
        return "\n".join(out)
    if a.op == "measure":
        if len(a.args) != 2:
            raise DomainError("chain measure takes <file> <element>")
        c = _read_chain(a.args[0])
        if isinstance(c, SymbolicChain):
            c = realize(c)
        e = parse_element(a.args[1])
        if not 1 <= e.stage <= c.depth or e.mask >> c.n_atoms(e.stage):
            raise DomainError(f"element {a.args[1]} is not in the realized prefix")
        out = [f"mu = {_frac(c.chain_measure(e))}"]
        if c.st is not None and e.mask:
            out.append(f"st = {c.st_of(e)}")
        return "\n".join(out)
    raise DomainError(f"unknown chain operation {a.op}")


def _source(path: str):
    c = _read_chain(path)
    if isinstance(c, ChainPresentation):
        rep = validate_chain(c)
        if not rep.ok:
            raise DomainError(f"{path}: invalid chain at stage {rep.stage}: {rep.reason}")
    return c


def cmd_equiv(a) -> str:
    A, B = _source(a.file_a), _source(a.file_b)
    pi, cA, cB = back_and_forth_chains(A, B, a.steps, max_depth=a.depth)
    rows = [(n, x, y, _frac(ma), _frac(mb), _frac(r)) for n, x, y, ma, mb, r in pi.table(cA, cB)]
    return table(("step", "a_i", "b_i", "mu'(a_i)", "mu''(b_i)", "ratio"), rows) + f"\nalpha = {_frac(pi.alpha)}"


def cmd_selftest(a) -> str:
    from .selfcheck import run_all

    results = run_all(lambda line: print(line, flush=True))
    failed = [r for r in results if not r.ok]
    if failed:
        raise DomainError(f"{len(failed)} acceptance check(s) failed")
    return f"all {len(results)} acceptance checks passed"


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="steinitz-measure", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True)
    st = sub.add_parser("st", help="Steinitz number arithmetic")
    st.add_argument("op", choices=["eval", "lcm", "div", "leq", "connected"])
    st.add_argument("args", nargs="*")
    st.set_defaults(fn=cmd_st)
    sp = sub.add_parser("spec", help="spectrum descriptors")
    sp.add_argument("op", choices=["member", "equal", "canon"])
    sp.add_argument("args", nargs="*")
    sp.set_defaults(fn=cmd_spec)
    ch = sub.add_parser("chain", help="chain presentations")
    ch.add_argument("op", choices=["build", "classify", "measure"])
    ch.add_argument("args", nargs="*")
    ch.add_argument("--depth", type=int, default=8)
    ch.add_argument("--b", default=None, help="divisor rule, e.g. 5^i, 5^2i, 2^i*3^i")
    ch.add_argument("--explicit", action="store_true", help="print the realized chain file")
    ch.set_defaults(fn=cmd_chain)
    eq = sub.add_parser("equiv", help="back-and-forth scalar equivalence")
    eq.add_argument("file_a")
    eq.add_argument("file_b")
    eq.add_argument("--steps", type=int, default=5)
    eq.add_argument("--depth", type=int, default=8, help="deepest stage realized for model files")
    eq.set_defaults(fn=cmd_equiv)
    sub.add_parser("selftest", help="run the acceptance checks").set_defaults(fn=cmd_selftest)
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out = args.fn(args)
    except ParseError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (DomainError, ChainError, ValueError, ArithmeticError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    print(out)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
