"""Flat instruction tapes for batched expression evaluation.

An expression tree compiles to a postfix program over a small value
stack.  Both execution backends (vectorized numpy and the numba kernel)
interpret the same tape, so they cannot drift apart structurally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import expr as ex
from .errors import DimensionError

__all__ = ["Tape", "compile_expr"]

OP_CONST = 0
OP_VAR = 1
OP_ADD = 2
OP_MUL = 3
OP_NEG = 4
OP_DIV = 5
OP_POWI = 6
OP_EXP = 7
OP_SIN = 8
OP_COS = 9
OP_WP = 10
OP_WPP = 11



@dataclass(frozen=True, eq=False)
class Tape:
    ops: np.ndarray  # int64[m]
    args: np.ndarray  # int64[m]: const index, 0-based var index, or pow exponent
    consts: np.ndarray  # complex128
    stack_size: int
    n_min: int  # largest variable index used
    has_wp: bool


def compile_expr(e: ex.Expr, n: int | None = None) -> Tape:
    """Compile to a postfix tape; `n`, when given, validates variable indices."""
    ops: list[int] = []
    args: list[int] = []
    consts: list[complex] = []
    const_index: dict[complex, int] = {}
    state = {"depth": 0, "max_depth": 0, "n_min": 0, "has_wp": False}

    def push_depth(delta: int) -> None:
        state["depth"] += delta
        if state["depth"] > state["max_depth"]:
            state["max_depth"] = state["depth"]

    def emit(op: int, arg: int = 0, delta: int = 0) -> None:
        ops.append(op)
        args.append(arg)
        push_depth(delta)

    def walk(node: ex.Expr) -> None:
        if isinstance(node, ex.Const):
            idx = const_index.setdefault(node.value, len(consts))
            if idx == len(consts):
                consts.append(node.value)
            emit(OP_CONST, idx, +1)
        elif isinstance(node, ex.Var):
            if node.index > state["n_min"]:
                state["n_min"] = node.index
            emit(OP_VAR, node.index - 1, +1)
        elif isinstance(node, ex.Add):
            if not node.terms:
                emit(OP_CONST, const_index.setdefault(0j, len(consts)), +1)
                if const_index[0j] == len(consts):
                    consts.append(0j)
                return
            walk(node.terms[0])
            for t in node.terms[1:]:
                walk(t)
                emit(OP_ADD, 0, -1)
        elif isinstance(node, ex.Mul):
            if not node.factors:
                idx = const_index.setdefault(1 + 0j, len(consts))
                if idx == len(consts):
                    consts.append(1 + 0j)
                emit(OP_CONST, idx, +1)
                return
            walk(node.factors[0])
            for f in node.factors[1:]:
                walk(f)
                emit(OP_MUL, 0, -1)
        elif isinstance(node, ex.Neg):
            walk(node.arg)
            emit(OP_NEG)
        elif isinstance(node, ex.Div):
            walk(node.num)
            walk(node.den)
            emit(OP_DIV, 0, -1)
        elif isinstance(node, ex.Pow):
            walk(node.base)
            emit(OP_POWI, node.exponent)
        elif isinstance(node, ex.Exp):
            walk(node.arg)
            emit(OP_EXP)
        elif isinstance(node, ex.Sin):
            walk(node.arg)
            emit(OP_SIN)
        elif isinstance(node, ex.Cos):
            walk(node.arg)
            emit(OP_COS)
        elif isinstance(node, ex.Wp):
            state["has_wp"] = True
            walk(node.arg)
            emit(OP_WP)
        elif isinstance(node, ex.WpPrime):
            state["has_wp"] = True
            walk(node.arg)
            emit(OP_WPP)
        else:
            raise TypeError(f"unknown node {node!r}")

    walk(e)
    if n is not None and state["n_min"] > n:
        raise DimensionError(f"expression uses z{state['n_min']} but dimension is {n}")
    return Tape(
        ops=np.asarray(ops, dtype=np.int64),
        args=np.asarray(args, dtype=np.int64),
        consts=np.asarray(consts if consts else [0j], dtype=np.complex128),
        stack_size=max(state["max_depth"], 1),
        n_min=state["n_min"],
        has_wp=state["has_wp"],
    )
