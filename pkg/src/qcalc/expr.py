"""A small arithmetic expression language for integrands given on the command line.

Only numbers, the variable ``x``, the base ``q``, ``+ - * / **`` and a few
math functions are allowed; anything else is rejected before evaluation.
In exact mode numeric literals become Fractions.
"""

from __future__ import annotations

import ast
import math
import operator
from fractions import Fraction
from typing import Callable

from qcalc.calculus import QPolynomial
from qcalc.context import QContext, as_integer, rpow

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: operator.truediv}
_FUNCS = {"exp": math.exp, "log": math.log, "sqrt": math.sqrt, "sin": math.sin, "cos": math.cos}


class ExpressionError(ValueError):
    pass


def compile_expression(ctx: QContext, text: str) -> Callable:
    """Turn ``text`` (an expression in x and q) into a callable f(x)."""
    try:
        tree = ast.parse(text, mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}") from exc
    _check(tree.body, ctx)
    if ctx.exact:
        coeffs = _polynomial(tree.body, ctx)
        if coeffs is not None:
            return QPolynomial(coeffs)
    return lambda x: _eval(tree.body, ctx, ctx.num(x))


def _polynomial(node, ctx: QContext) -> list | None:
    """Coefficients if ``node`` is a polynomial in x, else None."""
    if isinstance(node, ast.Constant):
        return [Fraction(repr(node.value))]
    if isinstance(node, ast.Name):
        return [Fraction(0), Fraction(1)] if node.id == "x" else [ctx.q]
    if isinstance(node, ast.UnaryOp):
        inner = _polynomial(node.operand, ctx)
        return None if inner is None else [-c if isinstance(node.op, ast.USub) else c for c in inner]
    if not isinstance(node, ast.BinOp):
        return None
    left, right = _polynomial(node.left, ctx), _polynomial(node.right, ctx)
    if left is None or right is None:
        return None
    if isinstance(node.op, (ast.Add, ast.Sub)):
        sign = 1 if isinstance(node.op, ast.Add) else -1
        n = max(len(left), len(right))
        left, right = left + [0] * (n - len(left)), right + [0] * (n - len(right))
        return [a + sign * b for a, b in zip(left, right)]
    if isinstance(node.op, ast.Mult):
        return list((QPolynomial(left) * QPolynomial(right)).coeffs)
    if isinstance(node.op, ast.Div):
        if len(right) != 1 or right[0] == 0:
            return None
        return [c / right[0] for c in left]
    if isinstance(node.op, ast.Pow) and len(right) == 1:
        n = as_integer(right[0])
        if n is None or n < 0:
            return None
        out = QPolynomial([1])
        for _ in range(n):
            out = out * QPolynomial(left)
        return list(out.coeffs)
    return None


def _check(node, ctx) -> None:
    if isinstance(node, ast.BinOp) and (type(node.op) in _BINOPS or isinstance(node.op, ast.Pow)):
        _check(node.left, ctx)
        _check(node.right, ctx)
    elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.UAdd, ast.USub)):
        _check(node.operand, ctx)
    elif isinstance(node, ast.Constant) and type(node.value) in (int, float):
        pass
    elif isinstance(node, ast.Name) and node.id in ("x", "q"):
        pass
    elif (isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS
          and len(node.args) == 1 and not node.keywords):
        if ctx.exact:
            raise ExpressionError(f"{node.func.id}() has no exact value; use float mode")
        _check(node.args[0], ctx)
    else:
        raise ExpressionError(f"unsupported syntax in integrand: {ast.dump(node)[:60]}")


def _eval(node, ctx: QContext, x):
    if isinstance(node, ast.BinOp):
        left, right = _eval(node.left, ctx, x), _eval(node.right, ctx, x)
        if isinstance(node.op, ast.Pow):
            return rpow(ctx, left, right)
        return _BINOPS[type(node.op)](left, right)
    if isinstance(node, ast.UnaryOp):
        value = _eval(node.operand, ctx, x)
        return -value if isinstance(node.op, ast.USub) else value
    if isinstance(node, ast.Constant):
        return Fraction(repr(node.value)) if ctx.exact else float(node.value)
    if isinstance(node, ast.Name):
        return x if node.id == "x" else ctx.q
    return _FUNCS[node.func.id](float(_eval(node.args[0], ctx, x)))
