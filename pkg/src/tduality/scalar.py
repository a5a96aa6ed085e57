"""Exact symbolic scalars over named real variables.

Expression trees with rational constants, the named constant pi, and the
elementary functions sin, cos, exp, log, sqrt.  These carry every coefficient
function in the package.  There is no canonical simplification: equality of
scalars is decided numerically by sampling a domain box with a seeded RNG
(``equal_numeric``).  Construction applies only cheap local folding (rational
arithmetic, dropping zeros/ones, collecting like terms with rational
coefficients) so that exact cancellations such as ``g - g`` produce a
structural zero.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = [
    "Scalar", "CScalar", "Domain", "EvaluationError", "SamplingError",
    "rat", "const", "var", "sadd", "smul", "sdiv", "spow", "sneg", "ssub",
    "ssin", "scos", "sexp", "slog", "ssqrt", "as_scalar",
    "ZERO", "ONE", "PI",
    "diff", "evaluate", "equal_numeric",
    "scalar_to_text", "scalar_from_text",
    "solve_linear_symbolic", "sym_matrix_inverse", "sym_det",
]

_NAMED_CONSTANTS = {"pi": math.pi}

_LEAF_KINDS = ("rat", "const", "var")
_FUNC_KINDS = ("sin", "cos", "exp", "log", "sqrt")


class EvaluationError(ValueError):
    """Unbound variable or singular evaluation (zero division, bad log/sqrt)."""


class SamplingError(RuntimeError):
    """Domain sampling could not avoid the excluded sets."""


class Scalar:
    """Immutable expression node.

    kind is one of: rat, const, var, add, mul, div, pow, sin, cos, exp,
    log, sqrt.  ``value`` holds the Fraction for rat nodes and the integer
    exponent for pow nodes; ``name`` holds variable / named-constant names.
    """

    __slots__ = ("kind", "args", "value", "name", "_hash")

    def __init__(self, kind, args=(), value=None, name=None):
        self.kind = kind
        self.args = tuple(args)
        self.value = value
        self.name = name
        self._hash = None

    # Scalars are immutable by convention; hash/eq are structural.
    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.kind, self.value, self.name, self.args))
            self._hash = h
        return h

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Scalar):
            return NotImplemented
        return (self.kind == other.kind and self.value == other.value
                and self.name == other.name and self.args == other.args)

    def __ne__(self, other):
        res = self.__eq__(other)
        return res if res is NotImplemented else not res

    # -- arithmetic sugar ---------------------------------------------------
    def __add__(self, other):
        return sadd(self, as_scalar(other))

    def __radd__(self, other):
        return sadd(as_scalar(other), self)

    def __sub__(self, other):
        return ssub(self, as_scalar(other))

    def __rsub__(self, other):
        return ssub(as_scalar(other), self)

    def __mul__(self, other):
        return smul(self, as_scalar(other))

    def __rmul__(self, other):
        return smul(as_scalar(other), self)

    def __truediv__(self, other):
        return sdiv(self, as_scalar(other))

    def __rtruediv__(self, other):
        return sdiv(as_scalar(other), self)

    def __pow__(self, n):
        return spow(self, n)

    def __neg__(self):
        return sneg(self)

    def __repr__(self):
        return f"Scalar({scalar_to_text(self)})"

    # -- queries --------------------------------------------------------------
    def is_zero(self):
        return self.kind == "rat" and self.value == 0

    def is_one(self):
        return self.kind == "rat" and self.value == 1

    def is_rational(self):
        return self.kind == "rat"

    def variables(self):
        out = set()
        stack = [self]
        seen = set()
        while stack:
            node = stack.pop()
            if id(node) in seen:
                continue
            seen.add(id(node))
            if node.kind == "var":
                out.add(node.name)
            stack.extend(node.args)
        return out


def rat(p, q=1):
    return Scalar("rat", value=Fraction(p, q))


ZERO = rat(0)
ONE = rat(1)


def const(name):
    if name not in _NAMED_CONSTANTS:
        raise ValueError(f"unknown named constant {name!r}")
    return Scalar("const", name=name)


PI = const("pi")


def var(name):
    return Scalar("var", name=name)


def as_scalar(x):
    if isinstance(x, Scalar):
        return x
    if isinstance(x, (int, Fraction)):
        return rat(x)
    if isinstance(x, float):
        # floats enter only through user-supplied data; keep them exact
        return rat(Fraction(x).limit_denominator(10**12))
    raise TypeError(f"cannot coerce {type(x).__name__} to Scalar")


def _mul_split(term):
    """Split a term into (rational coefficient, non-rational factor tuple)."""
    if term.kind == "rat":
        return term.value, ()
    if term.kind == "mul":
        coeff = Fraction(1)
        rest = []
        for a in term.args:
            if a.kind == "rat":
                coeff *= a.value
            else:
                rest.append(a)
        return coeff, tuple(rest)
    return Fraction(1), (term,)


def _make_term(coeff, rest):
    if coeff == 0:
        return None
    if not rest:
        return rat(coeff)
    if coeff == 1 and len(rest) == 1:
        return rest[0]
    if coeff == 1:
        return Scalar("mul", rest)
    return Scalar("mul", (rat(coeff),) + rest)


def sadd(*terms):
    """Sum with rational folding and like-term collection."""
    flat = []
    for t in terms:
        if t.kind == "add":
            flat.extend(t.args)
        else:
            flat.append(t)
    collected: dict = {}
    const_part = Fraction(0)
    order = []
    for t in flat:
        coeff, rest = _mul_split(t)
        if not rest:
            const_part += coeff
            continue
        if rest not in collected:
            collected[rest] = coeff
            order.append(rest)
        else:
            collected[rest] += coeff
    out = []
    for rest in order:
        term = _make_term(collected[rest], rest)
        if term is not None:
            out.append(term)
    if const_part != 0:
        out.insert(0, rat(const_part))
    if not out:
        return ZERO
    if len(out) == 1:
        return out[0]
    return Scalar("add", out)


def ssub(a, b):
    return sadd(a, sneg(b))


def sneg(a):
    return smul(rat(-1), a)


def smul(*factors):
    flat = []
    for f in factors:
        if f.kind == "mul":
            flat.extend(f.args)
        else:
            flat.append(f)
    coeff = Fraction(1)
    rest = []
    for f in flat:
        if f.kind == "rat":
            coeff *= f.value
        else:
            rest.append(f)
    if coeff == 0:
        return ZERO
    term = _make_term(coeff, tuple(rest))
    return term if term is not None else ZERO


def sdiv(a, b):
    if b.is_zero():
        raise ZeroDivisionError("division by structural zero")
    if a.is_zero():
        return ZERO
    if b.kind == "rat":
        return smul(rat(1 / b.value), a)
    if a == b:
        return ONE
    return Scalar("div", (a, b))


def spow(base, n):
    n = int(n)
    if n == 0:
        return ONE
    if n == 1:
        return base
    if base.kind == "rat":
        return rat(base.value ** n)
    return Scalar("pow", (base,), value=n)


def _func(kind, x):
    if x.kind == "rat":
        v = x.value
        if kind == "sin" and v == 0:
            return ZERO
        if kind == "cos" and v == 0:
            return ONE
        if kind == "exp" and v == 0:
            return ONE
        if kind == "log" and v == 1:
            return ZERO
        if kind == "sqrt" and v >= 0:
            root = Fraction(math.isqrt(v.numerator), math.isqrt(v.denominator))
            if root * root == v:
                return rat(root)
    return Scalar(kind, (x,))


def ssin(x):
    return _func("sin", x)


def scos(x):
    return _func("cos", x)


def sexp(x):
    return _func("exp", x)


def slog(x):
    return _func("log", x)


def ssqrt(x):
    return _func("sqrt", x)


# -- evaluation -----------------------------------------------------------------

def evaluate(expr, point, memo=None):
    """Evaluate at a point assignment {var: float}.  IEEE double semantics.

    Raises EvaluationError for unbound variables and singular operations.
    """
    if memo is None:
        memo = {}
    return _eval(expr, point, memo)


def _eval(node, point, memo):
    got = memo.get(id(node))
    if got is not None:
        return got
    kind = node.kind
    if kind == "rat":
        val = float(node.value)
    elif kind == "const":
        val = _NAMED_CONSTANTS[node.name]
    elif kind == "var":
        try:
            val = float(point[node.name])
        except KeyError:
            raise EvaluationError(f"unbound variable {node.name!r}") from None
    elif kind == "add":
        val = 0.0
        for a in node.args:
            val += _eval(a, point, memo)
    elif kind == "mul":
        val = 1.0
        for a in node.args:
            val *= _eval(a, point, memo)
    elif kind == "div":
        num = _eval(node.args[0], point, memo)
        den = _eval(node.args[1], point, memo)
        if den == 0.0:
            raise EvaluationError("singular evaluation: division by zero")
        val = num / den
    elif kind == "pow":
        base = _eval(node.args[0], point, memo)
        n = node.value
        if base == 0.0 and n < 0:
            raise EvaluationError("singular evaluation: zero to negative power")
        val = base ** n
    elif kind == "sin":
        val = math.sin(_eval(node.args[0], point, memo))
    elif kind == "cos":
        val = math.cos(_eval(node.args[0], point, memo))
    elif kind == "exp":
        val = math.exp(_eval(node.args[0], point, memo))
    elif kind == "log":
        x = _eval(node.args[0], point, memo)
        if x <= 0.0:
            raise EvaluationError("singular evaluation: log of nonpositive value")
        val = math.log(x)
    elif kind == "sqrt":
        x = _eval(node.args[0], point, memo)
        if x < 0.0:
            raise EvaluationError("singular evaluation: sqrt of negative value")
        val = math.sqrt(x)
    else:  # pragma: no cover
        raise AssertionError(f"unknown node kind {kind}")
    if not math.isfinite(val):
        raise EvaluationError("evaluation overflowed to a non-finite value")
    memo[id(node)] = val
    return val


# -- differentiation -------------------------------------------------------------

def diff(expr, name, memo=None):
    """Symbolic partial derivative with respect to variable ``name``."""
    if memo is None:
        memo = {}
    return _diff(expr, name, memo)


def _diff(node, name, memo):
    got = memo.get(id(node))
    if got is not None:
        return got
    kind = node.kind
    if kind in ("rat", "const"):
        out = ZERO
    elif kind == "var":
        out = ONE if node.name == name else ZERO
    elif kind == "add":
        out = sadd(*[_diff(a, name, memo) for a in node.args])
    elif kind == "mul":
        terms = []
        for i, a in enumerate(node.args):
            da = _diff(a, name, memo)
            if da.is_zero():
                continue
            terms.append(smul(*(node.args[:i] + (da,) + node.args[i + 1:])))
        out = sadd(*terms) if terms else ZERO
    elif kind == "div":
        a, b = node.args
        da, db = _diff(a, name, memo), _diff(b, name, memo)
        out = sdiv(ssub(smul(da, b), smul(a, db)), spow(b, 2))
    elif kind == "pow":
        base, n = node.args[0], node.value
        out = smul(rat(n), spow(base, n - 1), _diff(base, name, memo))
    elif kind == "sin":
        out = smul(scos(node.args[0]), _diff(node.args[0], name, memo))
    elif kind == "cos":
        out = smul(rat(-1), ssin(node.args[0]), _diff(node.args[0], name, memo))
    elif kind == "exp":
        out = smul(node, _diff(node.args[0], name, memo))
    elif kind == "log":
        out = sdiv(_diff(node.args[0], name, memo), node.args[0])
    elif kind == "sqrt":
        out = sdiv(_diff(node.args[0], name, memo), smul(rat(2), node))
    else:  # pragma: no cover
        raise AssertionError(f"unknown node kind {kind}")
    memo[id(node)] = out
    return out


# -- sampling domain --------------------------------------------------------------

@dataclass(frozen=True)
class Domain:
    """Box of per-variable closed intervals, with excluded hyperplanes.

    ``exclusions`` is a tuple of (variable, value, radius): samples keep
    |x - value| > radius, which guards poles on coordinate hyperplanes.
    """

    intervals: dict
    exclusions: tuple = ()

    def __post_init__(self):
        for name, (lo, hi) in self.intervals.items():
            if not lo < hi:
                raise ValueError(f"empty interior for variable {name!r}")

    @property
    def variables(self):
        return tuple(self.intervals)

    def sample(self, rng, max_tries=200):
        """One interior point avoiding all exclusions."""
        point = {}
        for name, (lo, hi) in self.intervals.items():
            excl = [(v, r) for (n, v, r) in self.exclusions if n == name]
            for _ in range(max_tries):
                x = float(rng.uniform(lo, hi))
                if all(abs(x - v) > r for v, r in excl):
                    point[name] = x
                    break
            else:
                raise SamplingError(f"cannot sample variable {name!r} outside exclusions")
        return point

    def sample_many(self, rng, n):
        return [self.sample(rng) for _ in range(n)]

    def merge(self, other):
        both = dict(self.intervals)
        both.update(other.intervals)
        return Domain(both, tuple(self.exclusions) + tuple(other.exclusions))


def equal_numeric(a, b, domain, n=16, tol=1e-9, seed=0, rng=None):
    """Probabilistic equality: |a(p) - b(p)| <= tol * (1 + |a(p)|) at n samples."""
    if n < 1:
        raise ValueError("need at least one sample")
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    if rng is None:
        rng = np.random.default_rng(seed)
    for _ in range(n):
        p = domain.sample(rng)
        va = evaluate(a, p)
        vb = evaluate(b, p)
        if abs(va - vb) > tol * (1.0 + abs(va)):
            return False
    return True


# -- complex scalars --------------------------------------------------------------

@dataclass(frozen=True)
class CScalar:
    """Complex scalar with symbolic real and imaginary parts."""

    re: Scalar = field(default=ZERO)
    im: Scalar = field(default=ZERO)

    @staticmethod
    def of(x, y=0):
        if isinstance(x, CScalar):
            return x
        return CScalar(as_scalar(x), as_scalar(y))

    @staticmethod
    def one():
        return CScalar(ONE, ZERO)

    @staticmethod
    def i():
        return CScalar(ZERO, ONE)

    def is_zero(self):
        return self.re.is_zero() and self.im.is_zero()

    def is_real(self):
        return self.im.is_zero()

    def conj(self):
        return CScalar(self.re, sneg(self.im))

    def __add__(self, other):
        other = CScalar.of(other)
        return CScalar(sadd(self.re, other.re), sadd(self.im, other.im))

    __radd__ = __add__

    def __sub__(self, other):
        other = CScalar.of(other)
        return CScalar(ssub(self.re, other.re), ssub(self.im, other.im))

    def __neg__(self):
        return CScalar(sneg(self.re), sneg(self.im))

    def __mul__(self, other):
        other = CScalar.of(other)
        a, b, c, d = self.re, self.im, other.re, other.im
        return CScalar(ssub(smul(a, c), smul(b, d)), sadd(smul(a, d), smul(b, c)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = CScalar.of(other)
        if other.im.is_zero():
            return CScalar(sdiv(self.re, other.re), sdiv(self.im, other.re))
        mod2 = sadd(smul(other.re, other.re), smul(other.im, other.im))
        num = self * other.conj()
        return CScalar(sdiv(num.re, mod2), sdiv(num.im, mod2))

    def evaluate(self, point, memo=None):
        if memo is None:
            memo = {}
        return complex(_eval(self.re, point, memo), _eval(self.im, point, memo))

    def variables(self):
        return self.re.variables() | self.im.variables()


# -- text serialization (prefix notation) ------------------------------------------

def scalar_to_text(node):
    kind = node.kind
    if kind == "rat":
        v = node.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if kind == "const":
        return node.name
    if kind == "var":
        return node.name
    if kind == "add":
        return "(+ " + " ".join(scalar_to_text(a) for a in node.args) + ")"
    if kind == "mul":
        return "(* " + " ".join(scalar_to_text(a) for a in node.args) + ")"
    if kind == "div":
        return f"(/ {scalar_to_text(node.args[0])} {scalar_to_text(node.args[1])})"
    if kind == "pow":
        return f"(^ {scalar_to_text(node.args[0])} {node.value})"
    if kind in _FUNC_KINDS:
        return f"({kind} {scalar_to_text(node.args[0])})"
    raise AssertionError(f"unknown node kind {kind}")  # pragma: no cover


def _tokenize(text):
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _parse_tokens(tokens, pos):
    tok = tokens[pos]
    if tok == "(":
        head = tokens[pos + 1]
        args = []
        pos += 2
        while tokens[pos] != ")":
            node, pos = _parse_tokens(tokens, pos)
            args.append(node)
        pos += 1
        if head == "+":
            return sadd(*args), pos
        if head == "*":
            return smul(*args), pos
        if head == "/":
            return sdiv(*args), pos
        if head == "^":
            if args[1].kind != "rat" or args[1].value.denominator != 1:
                raise ValueError("power exponent must be an integer")
            return spow(args[0], int(args[1].value)), pos
        if head == "sin":
            return ssin(*args), pos
        if head == "cos":
            return scos(*args), pos
        if head == "exp":
            return sexp(*args), pos
        if head == "log":
            return slog(*args), pos
        if head == "sqrt":
            return ssqrt(*args), pos
        raise ValueError(f"unknown operator {head!r}")
    if tok == ")":
        raise ValueError("unbalanced parenthesis")
    # atom: rational, named constant, or variable
    if "/" in tok and tok not in ("/",):
        num, den = tok.split("/")
        return rat(int(num), int(den)), pos + 1
    try:
        return rat(int(tok)), pos + 1
    except ValueError:
        pass
    if tok in _NAMED_CONSTANTS:
        return const(tok), pos + 1
    return var(tok), pos + 1


def scalar_from_text(text):
    tokens = _tokenize(text)
    node, pos = _parse_tokens(tokens, 0)
    if pos != len(tokens):
        raise ValueError(f"trailing tokens in scalar text: {' '.join(tokens[pos:])}")
    return node


# -- small dense symbolic linear algebra -------------------------------------------
# Used for the fiber-block solve of the section transform and for rewriting
# transported metric graphs.  Sizes never exceed 4x4.

def _all_rational(matrix):
    return all(e.kind == "rat" for row in matrix for e in row)


def solve_linear_symbolic(matrix, rhs):
    """Solve A x = rhs for symbolic entries.

    Exact Gaussian elimination over the rationals when every entry of A is a
    rational constant (the common case: unimodular fiber blocks); Cramer's
    rule otherwise.
    """
    k = len(matrix)
    if k == 0:
        return []
    if _all_rational(matrix):
        a = [[e.value for e in row] for row in matrix]
        x = [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]
        # invert A exactly, then combine rhs terms symbolically
        for col in range(k):
            piv = next((r for r in range(col, k) if a[r][col] != 0), None)
            if piv is None:
                raise ValueError("fiber block is singular")
            a[col], a[piv] = a[piv], a[col]
            x[col], x[piv] = x[piv], x[col]
            inv = 1 / a[col][col]
            a[col] = [v * inv for v in a[col]]
            x[col] = [v * inv for v in x[col]]
            for r in range(k):
                if r != col and a[r][col] != 0:
                    f = a[r][col]
                    a[r] = [v - f * w for v, w in zip(a[r], a[col])]
                    x[r] = [v - f * w for v, w in zip(x[r], x[col])]
        return [sadd(*[smul(rat(x[i][j]), rhs[j]) for j in range(k)]) for i in range(k)]
    det = sym_det(matrix)
    out = []
    for i in range(k):
        replaced = [[rhs[r] if c == i else matrix[r][c] for c in range(k)] for r in range(k)]
        out.append(sdiv(sym_det(replaced), det))
    return out


def sym_det(matrix):
    n = len(matrix)
    if n == 1:
        return matrix[0][0]
    if n == 2:
        return ssub(smul(matrix[0][0], matrix[1][1]), smul(matrix[0][1], matrix[1][0]))
    terms = []
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        term = smul(matrix[0][j], sym_det(minor))
        terms.append(term if j % 2 == 0 else sneg(term))
    return sadd(*terms)


def sym_matrix_inverse(matrix):
    """Adjugate inverse; entries are Scalars, sizes <= 4."""
    n = len(matrix)
    det = sym_det(matrix)
    if n == 1:
        return [[sdiv(ONE, matrix[0][0])]]
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[matrix[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            cof = sym_det(minor)
            if (i + j) % 2 == 1:
                cof = sneg(cof)
            out[j][i] = sdiv(cof, det)
    return out
