"""Mini-language for scalar functions of (x, t).

Expressions are parsed from infix source, differentiated symbolically,
simplified, and compiled to a flat postfix tape for fast grid sampling.
The function set {sin, cos, exp, tanh, integer powers} is closed under
differentiation, so derivatives never leave the language.

Grammar (tightest binding first; no implicit multiplication):

    atom   := number | 'x' | 't' | 'pi' | name '(' expr ')' | '(' expr ')'
    name   := 'sin' | 'cos' | 'exp' | 'tanh'
    power  := atom ['^' ['-'] integer]
    unary  := '-' unary | power
    term   := unary (('*' | '/') unary)*
    expr   := term (('+' | '-') term)*

Printed form (``to_source`` / ``str``) uses minimal parentheses and
round-trips: ``parse(to_source(e))`` is structurally equal to ``e`` for
every tree built through the public constructors.

Evaluation accepts floats or numpy arrays and is deterministic: the tape
executes the same primitive operations in the same order as the tree
walk, so the two agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Expr",
    "EvalPlan",
    "ParseError",
    "UnknownIdentifierError",
    "parse",
    "to_source",
    "differentiate",
    "simplify",
    "compile_plan",
    "evaluate",
    "const",
    "var",
    "X",
    "T",
    "PI",
]

_FUNCTIONS = ("sin", "cos", "exp", "tanh")
_VARIABLES = ("x", "t")


class ParseError(ValueError):
    """Syntax error, with byte offset and the token kinds that were legal."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f"{message} at byte {offset}"
        if expected:
            detail += f" (expected one of: {', '.join(expected)})"
        super().__init__(detail)


class UnknownIdentifierError(ParseError):
    """An identifier that is not a variable, constant, or known function."""

    def __init__(self, name: str, offset: int):
        self.name = name
        super().__init__(
            f"unknown identifier {name!r}", offset,
            expected=_VARIABLES + ("pi",) + _FUNCTIONS,
        )


@dataclass(frozen=True)
class Expr:
    """Immutable expression node.

    ``op`` is one of: 'const', 'x', 't', 'pi', 'add', 'sub', 'mul', 'div',
    'neg', 'pow', 'sin', 'cos', 'exp', 'tanh'.  ``value`` is meaningful
    for 'const' only, ``exponent`` for 'pow' only.
    """

    op: str
    args: tuple["Expr", ...] = ()
    value: float = 0.0
    exponent: int = 0

    def __add__(self, other):
        return add(self, _coerce(other))

    def __radd__(self, other):
        return add(_coerce(other), self)

    def __sub__(self, other):
        return sub(self, _coerce(other))

    def __rsub__(self, other):
        return sub(_coerce(other), self)

    def __mul__(self, other):
        return mul(self, _coerce(other))

    def __rmul__(self, other):
        return mul(_coerce(other), self)

    def __truediv__(self, other):
        return div(self, _coerce(other))

    def __rtruediv__(self, other):
        return div(_coerce(other), self)

    def __pow__(self, n: int):
        return pow_i(self, n)

    def __neg__(self):
        return neg(self)

    def __str__(self) -> str:
        return to_source(self)

    def __call__(self, x, t):
        return evaluate(self, x, t)


def _coerce(v) -> Expr:
    if isinstance(v, Expr):
        return v
    return const(float(v))


# Primitive numeric kernels.  Tree walk, tape execution, and constant
# folding all go through this single table, which keeps every evaluation
# path bit-identical (scalars and arrays use the same numpy ufuncs).
_UNARY_KERNELS = {
    "neg": np.negative,
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "tanh": np.tanh,
}
_BINARY_KERNELS = {
    "add": np.add,
    "sub": np.subtract,
    "mul": np.multiply,
    "div": np.divide,
}


def const(value: float) -> Expr:
    return Expr("const", value=float(value))


def var(name: str) -> Expr:
    if name not in _VARIABLES:
        raise ValueError(f"variable must be 'x' or 't', got {name!r}")
    return Expr(name)


X = var("x")
T = var("t")
PI = Expr("pi")

_ZERO = const(0.0)
_ONE = const(1.0)


def _fold_binary(op: str, a: float, b: float) -> float | None:
    with np.errstate(all="ignore"):
        r = float(_BINARY_KERNELS[op](a, b))
    return r if math.isfinite(r) else None


def add(a: Expr, b: Expr) -> Expr:
    if a.op == "const" and b.op == "const":
        folded = _fold_binary("add", a.value, b.value)
        if folded is not None:
            return const(folded)
    if a == _ZERO:
        return b
    if b == _ZERO:
        return a
    return Expr("add", (a, b))


def sub(a: Expr, b: Expr) -> Expr:
    if a.op == "const" and b.op == "const":
        folded = _fold_binary("sub", a.value, b.value)
        if folded is not None:
            return const(folded)
    if b == _ZERO:
        return a
    if a == _ZERO:
        return neg(b)
    return Expr("sub", (a, b))


def mul(a: Expr, b: Expr) -> Expr:
    if a.op == "const" and b.op == "const":
        folded = _fold_binary("mul", a.value, b.value)
        if folded is not None:
            return const(folded)
    if a == _ZERO or b == _ZERO:
        return _ZERO
    if a == _ONE:
        return b
    if b == _ONE:
        return a
    return Expr("mul", (a, b))


def div(a: Expr, b: Expr) -> Expr:
    if a.op == "const" and b.op == "const" and b.value != 0.0:
        folded = _fold_binary("div", a.value, b.value)
        if folded is not None:
            return const(folded)
    if b == _ONE:
        return a
    return Expr("div", (a, b))


def neg(a: Expr) -> Expr:
    if a.op == "const":
        return const(-a.value)
    return Expr("neg", (a,))


def pow_i(base: Expr, n: int) -> Expr:
    """Integer power.  Compiles the spec operation named ``pow``."""
    n = int(n)
    if n == 1:
        return base
    if n == 0:
        # IEEE convention 0^0 == 1, so folding is value-preserving.
        return _ONE
    if base.op == "const":
        with np.errstate(all="ignore"):
            r = float(np.power(base.value, float(n)))
        if math.isfinite(r):
            return const(r)
    return Expr("pow", (base,), exponent=n)


def _func(name: str, a: Expr) -> Expr:
    if a.op == "const":
        r = float(_UNARY_KERNELS[name](a.value))
        if math.isfinite(r):
            return const(r)
    return Expr(name, (a,))


def sin(a: Expr) -> Expr:
    return _func("sin", a)


def cos(a: Expr) -> Expr:
    return _func("cos", a)


def exp(a: Expr) -> Expr:
    return _func("exp", a)


def tanh(a: Expr) -> Expr:
    return _func("tanh", a)


_CONSTRUCTORS = {
    "add": add,
    "sub": sub,
    "mul": mul,
    "div": div,
    "sin": sin,
    "cos": cos,
    "exp": exp,
    "tanh": tanh,
}


# ---------------------------------------------------------------------------
# Tokenizer / parser
# ---------------------------------------------------------------------------

_ATOM_EXPECTED = ("number", "x", "t", "pi", "function name", "(", "-")


def _tokenize(source: str) -> list[tuple[str, str, int]]:
    """Return (kind, text, byte_offset) triples.  kinds: num, ident, op, end."""
    tokens = []
    i = 0
    offset = 0  # byte offset into the UTF-8 encoding of source
    n = len(source)
    while i < n:
        ch = source[i]
        if ch in " \t\r\n":
            offset += len(ch.encode("utf-8"))
            i += 1
            continue
        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            j = i
            while j < n and source[j].isdigit():
                j += 1
            if j < n and source[j] == ".":
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    j = k
                    while j < n and source[j].isdigit():
                        j += 1
            text = source[i:j]
            tokens.append(("num", text, offset))
            offset += len(text)  # digits are ASCII
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            tokens.append(("ident", text, offset))
            offset += len(text.encode("utf-8"))
            i = j
            continue
        if ch in "+-*/^()":
            tokens.append(("op", ch, offset))
            offset += 1
            i += 1
            continue
        raise ParseError(f"unexpected character {ch!r}", offset)
    tokens.append(("end", "", offset))
    return tokens


class _Parser:
    def __init__(self, tokens: list[tuple[str, str, int]]):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_op(self, text: str):
        kind, tok, off = self.peek()
        if kind == "op" and tok == text:
            return self.advance()
        raise ParseError(f"expected {text!r}", off, expected=(text,))

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while True:
            kind, tok, _ = self.peek()
            if kind == "op" and tok in "+-":
                self.advance()
                rhs = self.parse_term()
                node = add(node, rhs) if tok == "+" else sub(node, rhs)
            else:
                return node

    def parse_term(self) -> Expr:
        node = self.parse_unary()
        while True:
            kind, tok, _ = self.peek()
            if kind == "op" and tok in "*/":
                self.advance()
                rhs = self.parse_unary()
                node = mul(node, rhs) if tok == "*" else div(node, rhs)
            else:
                return node

    def parse_unary(self) -> Expr:
        kind, tok, _ = self.peek()
        if kind == "op" and tok == "-":
            self.advance()
            return neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        kind, tok, _ = self.peek()
        if kind == "op" and tok == "^":
            self.advance()
            return pow_i(base, self.parse_int_exponent())
        return base

    def parse_int_exponent(self) -> int:
        sign = 1
        kind, tok, off = self.peek()
        if kind == "op" and tok == "-":
            self.advance()
            sign = -1
            kind, tok, off = self.peek()
        if kind != "num":
            raise ParseError("expected integer exponent", off, expected=("integer",))
        if any(c in tok for c in ".eE"):
            raise ParseError(
                f"exponent must be an integer literal, got {tok!r}", off,
                expected=("integer",),
            )
        self.advance()
        return sign * int(tok)

    def parse_atom(self) -> Expr:
        kind, tok, off = self.advance()
        if kind == "num":
            return const(float(tok))
        if kind == "ident":
            if tok in _VARIABLES:
                return var(tok)
            if tok == "pi":
                return PI
            if tok in _FUNCTIONS:
                self.expect_op("(")
                arg = self.parse_expr()
                self.expect_op(")")
                return _CONSTRUCTORS[tok](arg)
            raise UnknownIdentifierError(tok, off)
        if kind == "op" and tok == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        shown = tok if tok else "end of input"
        raise ParseError(f"unexpected {shown!r}", off, expected=_ATOM_EXPECTED)


def parse(source: str) -> Expr:
    """Parse infix source into an expression tree."""
    parser = _Parser(_tokenize(source))
    node = parser.parse_expr()
    kind, tok, off = parser.peek()
    if kind != "end":
        raise ParseError(
            f"trailing input {tok!r}", off,
            expected=("+", "-", "*", "/", "^", ")", "end of input"),
        )
    return node


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

_PRECEDENCE = {
    "add": 1, "sub": 1,
    "mul": 2, "div": 2,
    "neg": 3,
    "pow": 4,
}
_ATOM_PRECEDENCE = 5
_INFIX = {"add": "+", "sub": "-", "mul": "*", "div": "/"}


def _prec(e: Expr) -> int:
    return _PRECEDENCE.get(e.op, _ATOM_PRECEDENCE)


def to_source(e: Expr) -> str:
    """Render with minimal parentheses; ``parse`` round-trips the result."""
    if e.op == "const":
        return repr(e.value)
    if e.op in _VARIABLES:
        return e.op
    if e.op == "pi":
        return "pi"
    if e.op in _FUNCTIONS:
        return f"{e.op}({to_source(e.args[0])})"
    if e.op == "neg":
        inner = to_source(e.args[0])
        if _prec(e.args[0]) < _PRECEDENCE["neg"]:
            inner = f"({inner})"
        return f"-{inner}"
    if e.op == "pow":
        base = to_source(e.args[0])
        if _prec(e.args[0]) < _ATOM_PRECEDENCE:
            base = f"({base})"
        return f"{base}^{e.exponent}"
    if e.op in _INFIX:
        p = _PRECEDENCE[e.op]
        left = to_source(e.args[0])
        if _prec(e.args[0]) < p:
            left = f"({left})"
        right = to_source(e.args[1])
        # parenthesize right operands at equal precedence: parsing is
        # left-associative, so "a - b - c" is (a-b)-c
        if _prec(e.args[1]) <= p:
            right = f"({right})"
        return f"{left} {_INFIX[e.op]} {right}"
    raise ValueError(f"malformed node {e.op!r}")


# ---------------------------------------------------------------------------
# Differentiation / simplification
# ---------------------------------------------------------------------------

def differentiate(e: Expr, variable: str) -> Expr:
    """Exact symbolic partial derivative with respect to 'x' or 't'."""
    if variable not in _VARIABLES:
        raise ValueError(f"variable must be 'x' or 't', got {variable!r}")
    return _diff(e, variable)


def _diff(e: Expr, v: str) -> Expr:
    op = e.op
    if op in ("const", "pi"):
        return _ZERO
    if op in _VARIABLES:
        return _ONE if op == v else _ZERO
    if op == "add":
        return add(_diff(e.args[0], v), _diff(e.args[1], v))
    if op == "sub":
        return sub(_diff(e.args[0], v), _diff(e.args[1], v))
    if op == "neg":
        return neg(_diff(e.args[0], v))
    if op == "mul":
        a, b = e.args
        return add(mul(_diff(a, v), b), mul(a, _diff(b, v)))
    if op == "div":
        a, b = e.args
        num = sub(mul(_diff(a, v), b), mul(a, _diff(b, v)))
        return div(num, pow_i(b, 2))
    if op == "pow":
        base = e.args[0]
        n = e.exponent
        return mul(mul(const(float(n)), pow_i(base, n - 1)), _diff(base, v))
    if op == "sin":
        u = e.args[0]
        return mul(cos(u), _diff(u, v))
    if op == "cos":
        u = e.args[0]
        return neg(mul(sin(u), _diff(u, v)))
    if op == "exp":
        u = e.args[0]
        return mul(exp(u), _diff(u, v))
    if op == "tanh":
        u = e.args[0]
        return mul(sub(_ONE, pow_i(tanh(u), 2)), _diff(u, v))
    raise ValueError(f"malformed node {op!r}")


def simplify(e: Expr) -> Expr:
    """Constant folding plus the identities 0+e, 1*e, 0*e, e^1, e/1."""
    if not e.args:
        return e
    args = tuple(simplify(a) for a in e.args)
    if e.op == "neg":
        return neg(args[0])
    if e.op == "pow":
        return pow_i(args[0], e.exponent)
    return _CONSTRUCTORS[e.op](*args)


def is_zero(e: Expr) -> bool:
    """True when the expression simplifies to the literal constant 0."""
    s = simplify(e)
    return s.op == "const" and s.value == 0.0


# ---------------------------------------------------------------------------
# Evaluation: tree walk and compiled tape
# ---------------------------------------------------------------------------

_OP_CONST = 0
_OP_LOAD_X = 1
_OP_LOAD_T = 2
_OP_PI = 3
_OP_UNARY = 4   # operand indexes _UNARY_NAMES
_OP_BINARY = 5  # operand indexes _BINARY_NAMES
_OP_POW = 6     # operand is the integer exponent

_UNARY_NAMES = ("neg", "sin", "cos", "exp", "tanh")
_BINARY_NAMES = ("add", "sub", "mul", "div")
_UNARY_FNS = tuple(_UNARY_KERNELS[n] for n in _UNARY_NAMES)
_BINARY_FNS = tuple(_BINARY_KERNELS[n] for n in _BINARY_NAMES)


@dataclass(frozen=True)
class EvalPlan:
    """Flattened postfix tape: (opcode, operand) pairs plus constant pool.

    ``slots`` is the stack depth needed to execute the tape.
    """

    code: tuple[tuple[int, int], ...]
    consts: tuple[float, ...]
    slots: int


def compile_plan(e: Expr) -> EvalPlan:
    """Flatten to postfix.  Compiles the spec operation named ``compile``."""
    code: list[tuple[int, int]] = []
    consts: list[float] = []
    depth = 0
    max_depth = 0

    def push():
        nonlocal depth, max_depth
        depth += 1
        max_depth = max(max_depth, depth)

    def emit(node: Expr):
        nonlocal depth
        op = node.op
        if op == "const":
            # no pool dedup: == would conflate 0.0 with -0.0
            idx = len(consts)
            consts.append(node.value)
            code.append((_OP_CONST, idx))
            push()
        elif op == "x":
            code.append((_OP_LOAD_X, 0))
            push()
        elif op == "t":
            code.append((_OP_LOAD_T, 0))
            push()
        elif op == "pi":
            code.append((_OP_PI, 0))
            push()
        elif op == "pow":
            emit(node.args[0])
            code.append((_OP_POW, node.exponent))
        elif op in _UNARY_NAMES:
            emit(node.args[0])
            code.append((_OP_UNARY, _UNARY_NAMES.index(op)))
        elif op in _BINARY_NAMES:
            emit(node.args[0])
            emit(node.args[1])
            code.append((_OP_BINARY, _BINARY_NAMES.index(op)))
            depth -= 1
        else:
            raise ValueError(f"malformed node {op!r}")

    emit(e)
    return EvalPlan(tuple(code), tuple(consts), max_depth)


def _eval_tree(e: Expr, x, t):
    op = e.op
    if op == "const":
        return e.value
    if op == "x":
        return x
    if op == "t":
        return t
    if op == "pi":
        return np.pi
    if op == "pow":
        return np.power(_eval_tree(e.args[0], x, t), float(e.exponent))
    if op in _UNARY_KERNELS:
        return _UNARY_KERNELS[op](_eval_tree(e.args[0], x, t))
    # binary: evaluate left before right, matching tape order
    a = _eval_tree(e.args[0], x, t)
    b = _eval_tree(e.args[1], x, t)
    return _BINARY_KERNELS[op](a, b)


def _eval_plan(plan: EvalPlan, x, t):
    stack = [None] * plan.slots
    sp = 0
    consts = plan.consts
    for opcode, operand in plan.code:
        if opcode == _OP_CONST:
            stack[sp] = consts[operand]
            sp += 1
        elif opcode == _OP_LOAD_X:
            stack[sp] = x
            sp += 1
        elif opcode == _OP_LOAD_T:
            stack[sp] = t
            sp += 1
        elif opcode == _OP_PI:
            stack[sp] = np.pi
            sp += 1
        elif opcode == _OP_POW:
            stack[sp - 1] = np.power(stack[sp - 1], float(operand))
        elif opcode == _OP_UNARY:
            stack[sp - 1] = _UNARY_FNS[operand](stack[sp - 1])
        else:
            sp -= 1
            stack[sp - 1] = _BINARY_FNS[operand](stack[sp - 1], stack[sp])
    return stack[0]


def evaluate(e: Expr | EvalPlan, x, t):
    """Evaluate at (x, t); accepts floats or numpy arrays.

    Non-finite results (division by zero, overflow) are returned as-is.
    Scalar inputs give a float back; array inputs give an ndarray.
    """
    with np.errstate(all="ignore"):
        if isinstance(e, EvalPlan):
            out = _eval_plan(e, x, t)
        else:
            out = _eval_tree(e, x, t)
    if isinstance(out, np.ndarray) and out.ndim > 0:
        return out
    if isinstance(x, np.ndarray) and x.ndim > 0:
        return np.broadcast_to(np.asarray(out, dtype=float), x.shape).copy()
    if isinstance(t, np.ndarray) and t.ndim > 0:
        return np.broadcast_to(np.asarray(out, dtype=float), t.shape).copy()
    return float(out)
