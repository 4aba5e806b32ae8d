"""Small math helpers: exact length expressions and scalar specials.

Surface files may give curve lengths as expression strings such as
"2*acosh(1+sqrt(2))"; these are evaluated in extended precision with mpmath
and rounded once to float64.
"""

from __future__ import annotations

import ast
import math

import mpmath as mp

_ALLOWED_FUNCS = {
    "acosh", "asinh", "atanh", "cosh", "sinh", "tanh", "sqrt", "exp", "log",
    "arccosh", "arcsinh", "cos", "sin", "atan", "acos", "asin",
}
_ALLOWED_NAMES = {"pi", "e"}


def _eval_node(node, dps):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body, dps)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, (int, float)):
            return mp.mpf(node.value)
        raise ValueError(f"bad constant {node.value!r}")
    if isinstance(node, ast.BinOp):
        a = _eval_node(node.left, dps)
        b = _eval_node(node.right, dps)
        if isinstance(node.op, ast.Add):
            return a + b
        if isinstance(node.op, ast.Sub):
            return a - b
        if isinstance(node.op, ast.Mult):
            return a * b
        if isinstance(node.op, ast.Div):
            return a / b
        if isinstance(node.op, ast.Pow):
            return a ** b
        raise ValueError(f"operator {node.op!r} not allowed")
    if isinstance(node, ast.UnaryOp):
        v = _eval_node(node.operand, dps)
        if isinstance(node.op, ast.USub):
            return -v
        if isinstance(node.op, ast.UAdd):
            return v
        raise ValueError("unary operator not allowed")
    if isinstance(node, ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id not in _ALLOWED_FUNCS:
            raise ValueError(f"function not allowed in length expression: {ast.dump(node.func)}")
        name = node.func.id
        name = {"arccosh": "acosh", "arcsinh": "asinh"}.get(name, name)
        args = [_eval_node(a, dps) for a in node.args]
        return getattr(mp, name)(*args)
    if isinstance(node, ast.Name):
        if node.id in _ALLOWED_NAMES:
            return getattr(mp, node.id)
        raise ValueError(f"name not allowed: {node.id}")
    raise ValueError(f"unsupported syntax in length expression: {ast.dump(node)}")


def parse_length_expr(expr, dps: int = 40) -> float:
    """Evaluate a float or an arithmetic expression string to float64."""
    if isinstance(expr, (int, float)):
        return float(expr)
    tree = ast.parse(str(expr), mode="eval")
    with mp.workdps(dps):
        return float(_eval_node(tree, dps))


def acosh_root(x: float) -> float:
    """arccosh via the logarithm form, used as an independent oracle in tests."""
    return math.log(x + math.sqrt(x * x - 1.0))
