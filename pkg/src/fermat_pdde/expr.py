"""Immutable complex expression trees over variables z1..zn.

The node set is deliberately small: constants, variables, sums, products,
negation, quotients, integer powers, exp/sin/cos, and the Weierstrass pair
wp/wpd.  Trees are frozen dataclasses, so structural equality and hashing
come for free and values can be shared across threads.

Exact symbolic differentiation (`partial`), argument shifting (`shift`),
light constant folding (`fold_constants`), scalar evaluation (`evaluate`),
and a central-difference oracle (`fd_partial`) live here.  Batched
evaluation over many sample points is in `tape`/`backends`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DimensionError,
    EvalError,
    MissingEllipticContextError,
    PoleHitError,
)

__all__ = [
    "Expr",
    "Const",
    "Var",
    "Add",
    "Mul",
    "Neg",
    "Div",
    "Pow",
    "Exp",
    "Sin",
    "Cos",
    "Wp",
    "WpPrime",
    "as_expr",
    "const",
    "var",
    "variables",
    "free_variables",
    "max_var_index",
    "uses_wp",
    "fold_constants",
    "partial",
    "directional_derivative",
    "shift",
    "evaluate",
    "fd_partial",
    "to_string",
    "DEFAULT_POLE_EPS",
]

#: |denominator| below this is treated as a pole hit in scalar evaluation.
DEFAULT_POLE_EPS = 1e-12

ZERO = None  # assigned after Const is defined
ONE = None


@dataclass(frozen=True)
class Expr:
    """Base node.  All concrete nodes are frozen dataclasses."""

    def __add__(self, other) -> Expr:
        return _add(self, as_expr(other))

    def __radd__(self, other) -> Expr:
        return _add(as_expr(other), self)

    def __sub__(self, other) -> Expr:
        return _add(self, Neg(as_expr(other)))

    def __rsub__(self, other) -> Expr:
        return _add(as_expr(other), Neg(self))

    def __mul__(self, other) -> Expr:
        return _mul(self, as_expr(other))

    def __rmul__(self, other) -> Expr:
        return _mul(as_expr(other), self)

    def __truediv__(self, other) -> Expr:
        return Div(self, as_expr(other))

    def __rtruediv__(self, other) -> Expr:
        return Div(as_expr(other), self)

    def __pow__(self, exponent) -> Expr:
        return Pow(self, exponent)

    def __neg__(self) -> Expr:
        return Neg(self)

    def __str__(self) -> str:
        return to_string(self)


@dataclass(frozen=True)
class Const(Expr):
    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))


@dataclass(frozen=True)
class Var(Expr):
    index: int  # 1-based

    def __post_init__(self):
        if not isinstance(self.index, int) or self.index < 1:
            raise DimensionError(f"variable index must be a positive integer, got {self.index!r}")


@dataclass(frozen=True)
class Add(Expr):
    terms: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))


@dataclass(frozen=True)
class Mul(Expr):
    factors: tuple[Expr, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Div(Expr):
    num: Expr
    den: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int

    def __post_init__(self):
        if isinstance(self.exponent, bool) or not isinstance(self.exponent, int):
            raise EvalError(f"Pow exponent must be an integer, got {self.exponent!r}")


@dataclass(frozen=True)
class Exp(Expr):
    arg: Expr


@dataclass(frozen=True)
class Sin(Expr):
    arg: Expr


@dataclass(frozen=True)
class Cos(Expr):
    arg: Expr


@dataclass(frozen=True)
class Wp(Expr):
    arg: Expr


@dataclass(frozen=True)
class WpPrime(Expr):
    arg: Expr


ZERO = Const(0.0)
ONE = Const(1.0)


def as_expr(x) -> Expr:
    """Coerce a scalar to Const; pass expressions through."""
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, float, complex)):
        return Const(complex(x))
    raise TypeError(f"cannot interpret {x!r} as an expression")


def const(value) -> Const:
    return Const(complex(value))


def var(index: int) -> Var:
    return Var(index)


def variables(n: int) -> tuple[Var, ...]:
    """The tuple (z1, ..., zn)."""
    return tuple(Var(j) for j in range(1, n + 1))


def _add(a: Expr, b: Expr) -> Expr:
    # flatten one level so chained + stays shallow
    terms: list[Expr] = []
    for x in (a, b):
        if isinstance(x, Add):
            terms.extend(x.terms)
        else:
            terms.append(x)
    return Add(tuple(terms))


def _mul(a: Expr, b: Expr) -> Expr:
    factors: list[Expr] = []
    for x in (a, b):
        if isinstance(x, Mul):
            factors.extend(x.factors)
        else:
            factors.append(x)
    return Mul(tuple(factors))


def _children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, Add):
        return e.terms
    if isinstance(e, Mul):
        return e.factors
    if isinstance(e, Div):
        return (e.num, e.den)
    if isinstance(e, Pow):
        return (e.base,)
    if isinstance(e, (Neg, Exp, Sin, Cos, Wp, WpPrime)):
        return (e.arg,)
    return ()


def free_variables(e: Expr) -> frozenset[int]:
    """Set of 1-based variable indices occurring in the tree."""
    if isinstance(e, Var):
        return frozenset((e.index,))
    out: set[int] = set()
    for child in _children(e):
        out |= free_variables(child)
    return frozenset(out)


def max_var_index(e: Expr) -> int:
    """Largest variable index used; 0 for constant expressions."""
    return max(free_variables(e), default=0)


def uses_wp(e: Expr) -> bool:
    if isinstance(e, (Wp, WpPrime)):
        return True
    return any(uses_wp(c) for c in _children(e))


# ---------------------------------------------------------------------------
# constant folding

def _is_const(e: Expr, value=None) -> bool:
    if not isinstance(e, Const):
        return False
    return value is None or e.value == value


def fold_constants(e: Expr) -> Expr:
    """Collapse constant subtrees, drop zero terms and unit factors.

    The result evaluates identically to the input wherever the input is
    defined.  This is deliberately *not* a canonical form: no expansion,
    no term collection beyond constants.
    """
    if isinstance(e, (Const, Var)):
        return e
    if isinstance(e, Add):
        terms: list[Expr] = []
        csum = 0j
        for t in e.terms:
            t = fold_constants(t)
            if isinstance(t, Add):
                inner = list(t.terms)
            else:
                inner = [t]
            for x in inner:
                if isinstance(x, Const):
                    csum += x.value
                else:
                    terms.append(x)
        if csum != 0:
            terms.insert(0, Const(csum))
        if not terms:
            return Const(0.0)
        if len(terms) == 1:
            return terms[0]
        return Add(tuple(terms))
    if isinstance(e, Mul):
        factors: list[Expr] = []
        cprod = 1 + 0j
        for f in e.factors:
            f = fold_constants(f)
            if isinstance(f, Mul):
                inner = list(f.factors)
            else:
                inner = [f]
            for x in inner:
                if isinstance(x, Const):
                    cprod *= x.value
                else:
                    factors.append(x)
        if cprod == 0:
            return Const(0.0)
        if cprod != 1:
            factors.insert(0, Const(cprod))
        if not factors:
            return Const(1.0)
        if len(factors) == 1:
            return factors[0]
        return Mul(tuple(factors))
    if isinstance(e, Neg):
        arg = fold_constants(e.arg)
        if isinstance(arg, Const):
            return Const(-arg.value)
        if isinstance(arg, Neg):
            return arg.arg
        return Neg(arg)
    if isinstance(e, Div):
        num = fold_constants(e.num)
        den = fold_constants(e.den)
        if isinstance(den, Const) and den.value != 0:
            if isinstance(num, Const):
                return Const(num.value / den.value)
            if den.value == 1:
                return num
        return Div(num, den)
    if isinstance(e, Pow):
        base = fold_constants(e.base)
        if e.exponent == 0:
            return Const(1.0)
        if e.exponent == 1:
            return base
        if isinstance(base, Const) and not (base.value == 0 and e.exponent < 0):
            try:
                return Const(base.value ** e.exponent)
            except (OverflowError, ZeroDivisionError):
                # extreme magnitudes stay unfolded (overflow, or a negative
                # power whose intermediate underflows to zero); evaluation
                # reports inf or a pole hit there instead
                return Pow(base, e.exponent)
        return Pow(base, e.exponent)
    if isinstance(e, (Exp, Sin, Cos)):
        arg = fold_constants(e.arg)
        if isinstance(arg, Const):
            fn = {Exp: np.exp, Sin: np.sin, Cos: np.cos}[type(e)]
            with np.errstate(all="ignore"):
                return Const(complex(fn(arg.value)))
        return type(e)(arg)
    if isinstance(e, (Wp, WpPrime)):
        # wp of a constant needs the elliptic context, so never folded
        return type(e)(fold_constants(e.arg))
    raise TypeError(f"unknown node {e!r}")


# ---------------------------------------------------------------------------
# differentiation

def _ddir(e: Expr, w: tuple[complex, ...]) -> Expr:
    """Unfolded derivative along the constant direction w: sum_j w_j d/dz_j."""
    if isinstance(e, Const):
        return ZERO
    if isinstance(e, Var):
        return Const(w[e.index - 1])
    if isinstance(e, Add):
        return Add(tuple(_ddir(t, w) for t in e.terms))
    if isinstance(e, Mul):
        terms = []
        fs = e.factors
        for i in range(len(fs)):
            terms.append(Mul(fs[:i] + (_ddir(fs[i], w),) + fs[i + 1:]))
        return Add(tuple(terms))
    if isinstance(e, Neg):
        return Neg(_ddir(e.arg, w))
    if isinstance(e, Div):
        u, v = e.num, e.den
        return Div(Add((Mul((_ddir(u, w), v)), Neg(Mul((u, _ddir(v, w)))))), Pow(v, 2))
    if isinstance(e, Pow):
        k = e.exponent
        if k == 0:
            return ZERO
        return Mul((Const(k), Pow(e.base, k - 1), _ddir(e.base, w)))
    if isinstance(e, Exp):
        return Mul((e, _ddir(e.arg, w)))
    if isinstance(e, Sin):
        return Mul((Cos(e.arg), _ddir(e.arg, w)))
    if isinstance(e, Cos):
        return Neg(Mul((Sin(e.arg), _ddir(e.arg, w))))
    if isinstance(e, Wp):
        return Mul((WpPrime(e.arg), _ddir(e.arg, w)))
    if isinstance(e, WpPrime):
        # (wp')^2 = 4 wp^3 - 1  =>  wp'' = 6 wp^2
        return Mul((Const(6.0), Pow(Wp(e.arg), 2), _ddir(e.arg, w)))
    raise TypeError(f"unknown node {e!r}")


def _unit(j: int, n: int) -> tuple[complex, ...]:
    return tuple(1 + 0j if i == j else 0j for i in range(1, n + 1))


def directional_derivative(e: Expr, weights: Sequence[complex]) -> Expr:
    """sum_j w_j * de/dz_j in one chain-rule pass.

    Equal to adding the individual partials, but arguments killed by the
    direction (such as z2 - z1 under w = (1, 1, 0, ...)) fold to zero
    structurally, which keeps the result well conditioned where the
    termwise sum would cancel catastrophically.
    """
    w = tuple(complex(x) for x in weights)
    if max_var_index(e) > len(w):
        raise DimensionError(
            f"direction has {len(w)} components but the expression uses z{max_var_index(e)}"
        )
    return fold_constants(_ddir(e, w))


def partial(e: Expr, multi_index: Sequence[int]) -> Expr:
    """Exact mixed partial derivative for a multi-index (i1, ..., in).

    Each entry counts repeated differentiation in that variable; the
    all-zero index returns the expression unchanged.  The result is folded
    but otherwise unsimplified: compare derivatives numerically, not
    structurally.
    """
    idx = tuple(multi_index)
    if any((not isinstance(i, int)) or i < 0 for i in idx):
        raise DimensionError(f"multi-index entries must be non-negative integers: {idx!r}")
    if max_var_index(e) > len(idx):
        raise DimensionError(
            f"multi-index has {len(idx)} components but the expression uses z{max_var_index(e)}"
        )
    out = e
    for j, count in enumerate(idx, start=1):
        w = _unit(j, len(idx))
        for _ in range(count):
            out = fold_constants(_ddir(out, w))
    return out


def shift(e: Expr, c: Sequence[complex]) -> Expr:
    """Replace every z_j by z_j + c_j (the shifted function z -> z + c)."""
    cs = tuple(complex(x) for x in c)
    if max_var_index(e) > len(cs):
        raise DimensionError(
            f"shift vector has {len(cs)} components but the expression uses z{max_var_index(e)}"
        )

    def sub(node: Expr) -> Expr:
        if isinstance(node, Const):
            return node
        if isinstance(node, Var):
            cj = cs[node.index - 1]
            if cj == 0:
                return node
            return Add((node, Const(cj)))
        if isinstance(node, Add):
            return Add(tuple(sub(t) for t in node.terms))
        if isinstance(node, Mul):
            return Mul(tuple(sub(f) for f in node.factors))
        if isinstance(node, Neg):
            return Neg(sub(node.arg))
        if isinstance(node, Div):
            return Div(sub(node.num), sub(node.den))
        if isinstance(node, Pow):
            return Pow(sub(node.base), node.exponent)
        if isinstance(node, (Exp, Sin, Cos, Wp, WpPrime)):
            return type(node)(sub(node.arg))
        raise TypeError(f"unknown node {node!r}")

    return fold_constants(sub(e))


# ---------------------------------------------------------------------------
# scalar evaluation

def _ipow(base: complex, k: int, pole_eps: float) -> complex:
    if k < 0:
        v = _ipow(base, -k, pole_eps)
        if abs(v) < pole_eps:
            raise PoleHitError(f"near-zero base raised to negative power {k}")
        return 1.0 / v
    out = 1 + 0j
    b = base
    while k:
        if k & 1:
            out *= b
        b *= b
        k >>= 1
    return out


def evaluate(e: Expr, point: Sequence[complex], ell=None, pole_eps: float = DEFAULT_POLE_EPS) -> complex:
    """Value of the expression at one point of C^n.

    `ell` is an EllipticContext and is required exactly when the tree
    contains wp/wpd nodes.  Near-zero denominators (|den| < pole_eps) and
    lattice-point arguments of wp raise PoleHitError.
    """
    pt = tuple(complex(x) for x in point)
    if max_var_index(e) > len(pt):
        raise DimensionError(
            f"point has {len(pt)} coordinates but the expression uses z{max_var_index(e)}"
        )
    if ell is None and uses_wp(e):
        raise MissingEllipticContextError("expression contains wp/wpd: pass an elliptic context")

    def ev(node: Expr) -> complex:
        if isinstance(node, Const):
            return node.value
        if isinstance(node, Var):
            return pt[node.index - 1]
        if isinstance(node, Add):
            return sum((ev(t) for t in node.terms), 0j)
        if isinstance(node, Mul):
            out = 1 + 0j
            for f in node.factors:
                out *= ev(f)
            return out
        if isinstance(node, Neg):
            return -ev(node.arg)
        if isinstance(node, Div):
            den = ev(node.den)
            if abs(den) < pole_eps:
                raise PoleHitError(f"denominator {den!r} below pole threshold {pole_eps}")
            return ev(node.num) / den
        if isinstance(node, Pow):
            return _ipow(ev(node.base), node.exponent, pole_eps)
        if isinstance(node, Exp):
            return complex(np.exp(np.complex128(ev(node.arg))))
        if isinstance(node, Sin):
            return complex(np.sin(np.complex128(ev(node.arg))))
        if isinstance(node, Cos):
            return complex(np.cos(np.complex128(ev(node.arg))))
        if isinstance(node, Wp):
            return ell.wp_pair(ev(node.arg))[0]
        if isinstance(node, WpPrime):
            return ell.wp_pair(ev(node.arg))[1]
        raise TypeError(f"unknown node {node!r}")

    with np.errstate(all="ignore"):
        return complex(ev(e))


def fd_partial(e: Expr, j: int, point: Sequence[complex], step: float = 1e-5, ell=None) -> complex:
    """Central-difference estimate of d e / d z_j at a point.

    Independent numeric oracle for `partial`; the step is taken along the
    real axis of the complex coordinate z_j.
    """
    if step <= 0:
        raise EvalError("fd_partial step must be positive")
    pt = list(complex(x) for x in point)
    if j < 1 or j > len(pt):
        raise DimensionError(f"variable index {j} out of range for point of length {len(pt)}")
    up = list(pt)
    dn = list(pt)
    up[j - 1] += step
    dn[j - 1] -= step
    return (evaluate(e, up, ell=ell) - evaluate(e, dn, ell=ell)) / (2.0 * step)


# ---------------------------------------------------------------------------
# printing (inverse of the parser's grammar)

_PREC_ADD, _PREC_MUL, _PREC_UNARY, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


def _fmt_float(x: float) -> str:
    if math.isfinite(x) and x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def _fmt_const(v: complex) -> tuple[str, int]:
    re, im = v.real, v.imag
    if im == 0:
        if re < 0:
            return f"-{_fmt_float(-re)}", _PREC_UNARY
        return _fmt_float(re), _PREC_ATOM
    if re == 0:
        if im == 1:
            return "i", _PREC_ATOM
        if im == -1:
            return "-i", _PREC_UNARY
        # the 'b*i' forms contain a top-level '*', so they embed at MUL
        # precedence: as a denominator they need parentheses
        if im < 0:
            return f"-{_fmt_float(-im)}*i", _PREC_MUL
        return f"{_fmt_float(im)}*i", _PREC_MUL
    sign = "+" if im >= 0 else "-"
    return f"({_fmt_float(re)}{sign}{_fmt_float(abs(im))}*i)", _PREC_ATOM


def to_string(e: Expr) -> str:
    """Render in the expression grammar; parse(to_string(e)) evaluates equal to e."""

    def render(node: Expr) -> tuple[str, int]:
        if isinstance(node, Const):
            return _fmt_const(node.value)
        if isinstance(node, Var):
            return f"z{node.index}", _PREC_ATOM
        if isinstance(node, Add):
            parts = []
            for k, t in enumerate(node.terms):
                s, p = render(t)
                if k == 0:
                    parts.append(s)
                elif s.startswith("-"):
                    parts.append(" - " + s[1:])
                else:
                    parts.append(" + " + s)
            return "".join(parts), _PREC_ADD
        if isinstance(node, Mul):
            parts = []
            for f in node.factors:
                s, p = render(f)
                if p < _PREC_MUL:
                    s = f"({s})"
                parts.append(s)
            return "*".join(parts), _PREC_MUL
        if isinstance(node, Neg):
            s, p = render(node.arg)
            # '^' binds after unary minus in this grammar, so "-x^2" would
            # re-parse as (-x)^2; parenthesize Pow arguments.
            if p < _PREC_UNARY or isinstance(node.arg, Pow):
                s = f"({s})"
            return f"-{s}", _PREC_UNARY
        if isinstance(node, Div):
            ns, npr = render(node.num)
            ds, dpr = render(node.den)
            if npr < _PREC_MUL:
                ns = f"({ns})"
            if dpr <= _PREC_MUL:
                ds = f"({ds})"
            return f"{ns}/{ds}", _PREC_MUL
        if isinstance(node, Pow):
            bs, bp = render(node.base)
            if bp != _PREC_ATOM:
                bs = f"({bs})"
            return f"{bs}^{node.exponent}", _PREC_POW
        if isinstance(node, (Exp, Sin, Cos, Wp, WpPrime)):
            name = {Exp: "exp", Sin: "sin", Cos: "cos", Wp: "wp", WpPrime: "wpd"}[type(node)]
            s, _ = render(node.arg)
            return f"{name}({s})", _PREC_ATOM
        raise TypeError(f"unknown node {node!r}")

    return render(e)[0]
