"""Graded exterior algebra over a named coframe with complex symbolic coefficients.

Forms are sparse maps from generator-index bitmasks to CScalar coefficients.
Generators carry a tag (base / fiber / cofiber) so that fiber integration and
pullback along the two legs of a correspondence space are bitmask operations.
All operations are pure; forms are immutable by convention.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scalar import CScalar, rat

__all__ = [
    "Coframe", "Form", "FrameVector",
    "wedge", "contract", "clifford_act", "reversal", "mukai_pairing",
    "exp_form", "fiber_integrate",
    "form_to_text", "form_from_text",
]

TAGS = ("base", "fiber", "cofiber")


@dataclass(frozen=True)
class Coframe:
    """Ordered generator names with base/fiber/cofiber tags."""

    names: tuple
    tags: tuple

    def __post_init__(self):
        if len(self.names) != len(self.tags):
            raise ValueError("names and tags must align")
        if len(set(self.names)) != len(self.names):
            raise ValueError("generator names must be unique")
        for t in self.tags:
            if t not in TAGS:
                raise ValueError(f"unknown tag {t!r}")

    @property
    def dim(self):
        return len(self.names)

    def index(self, name):
        return self.names.index(name)

    def mask_of(self, names):
        m = 0
        for n in names:
            m |= 1 << self.index(n)
        return m

    def names_of(self, mask):
        return tuple(n for i, n in enumerate(self.names) if mask >> i & 1)

    def tag_mask(self, *tags):
        m = 0
        for i, t in enumerate(self.tags):
            if t in tags:
                m |= 1 << i
        return m

    def indices_with_tag(self, *tags):
        return tuple(i for i, t in enumerate(self.tags) if t in tags)


def _wedge_sign(a, b):
    """Sign of e_a ^ e_b -> e_{a|b} for disjoint sorted index masks."""
    sign = 1
    bits_b = b
    while bits_b:
        low = bits_b & -bits_b
        # count generators of a strictly above this generator of b
        above = a & ~(low | (low - 1))
        if bin(above).count("1") % 2:
            sign = -sign
        bits_b &= bits_b - 1
    return sign


def _contract_sign(mask, i):
    below = mask & ((1 << i) - 1)
    return -1 if bin(below).count("1") % 2 else 1


class Form:
    """Sparse multivector: {bitmask: CScalar}, structural zeros pruned."""

    __slots__ = ("coframe", "coeffs")

    def __init__(self, coframe, coeffs=None):
        self.coframe = coframe
        pruned = {}
        if coeffs:
            for mask, c in coeffs.items():
                if not c.is_zero():
                    pruned[mask] = c
        self.coeffs = pruned

    # -- constructors ------------------------------------------------------
    @staticmethod
    def zero(coframe):
        return Form(coframe)

    @staticmethod
    def scalar(coframe, c):
        return Form(coframe, {0: CScalar.of(c)})

    @staticmethod
    def monomial(coframe, names, coeff=1):
        """coeff * n1 ^ n2 ^ ... with names listed in wedge order."""
        mask = 0
        sign = 1
        for n in names:
            bit = 1 << coframe.index(n)
            if mask & bit:
                return Form(coframe)
            sign *= _wedge_sign(mask, bit)
            mask |= bit
        c = CScalar.of(coeff)
        if sign < 0:
            c = -c
        return Form(coframe, {mask: c})

    # -- linear structure ----------------------------------------------------
    def __add__(self, other):
        self._check(other)
        out = dict(self.coeffs)
        for mask, c in other.coeffs.items():
            out[mask] = out[mask] + c if mask in out else c
        return Form(self.coframe, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return Form(self.coframe, {m: -c for m, c in self.coeffs.items()})

    def scale(self, c):
        c = CScalar.of(c)
        return Form(self.coframe, {m: v * c for m, v in self.coeffs.items()})

    def conj(self):
        return Form(self.coframe, {m: v.conj() for m, v in self.coeffs.items()})

    def real_part(self):
        return Form(self.coframe, {m: CScalar(v.re) for m, v in self.coeffs.items()})

    def imag_part(self):
        return Form(self.coframe, {m: CScalar(v.im) for m, v in self.coeffs.items()})

    # -- queries ----------------------------------------------------------------
    def is_zero(self):
        return not self.coeffs

    def coeff(self, mask):
        return self.coeffs.get(mask, CScalar())

    def coeff_of(self, *names):
        return self.coeff(self.coframe.mask_of(names))

    def degrees(self):
        return sorted({bin(m).count("1") for m in self.coeffs})

    def max_degree(self):
        degs = self.degrees()
        return degs[-1] if degs else 0

    def component(self, degree):
        return Form(self.coframe,
                    {m: c for m, c in self.coeffs.items() if bin(m).count("1") == degree})

    def top_component(self):
        return self.component(self.coframe.dim)

    def variables(self):
        out = set()
        for c in self.coeffs.values():
            out |= c.variables()
        return out

    def __eq__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self.coframe == other.coframe and self.coeffs == other.coeffs

    def __repr__(self):
        return f"Form({form_to_text(self)})"

    # -- evaluation -----------------------------------------------------------
    def eval_coeffs(self, point, memo=None):
        """{mask: complex} at a point."""
        if memo is None:
            memo = {}
        return {m: c.evaluate(point, memo) for m, c in self.coeffs.items()}

    def eval_vector(self, point, memo=None):
        """Dense complex vector of length 2^dim indexed by bitmask."""
        v = np.zeros(1 << self.coframe.dim, dtype=complex)
        for m, c in self.eval_coeffs(point, memo).items():
            v[m] = c
        return v

    # -- moving between coframes --------------------------------------------------
    def map_to(self, coframe, rename=None):
        """Reinterpret on another coframe by generator name (pullback/pushdown).

        Every generator present in the form must map to a generator of the
        target coframe; relative order may change, signs follow.
        """
        rename = rename or {}
        out = {}
        for mask, c in self.coeffs.items():
            names = [rename.get(n, n) for n in self.coframe.names_of(mask)]
            mono = Form.monomial(coframe, names, c)
            for m2, c2 in mono.coeffs.items():
                out[m2] = out[m2] + c2 if m2 in out else c2
        return Form(coframe, out)

    def _check(self, other):
        if self.coframe != other.coframe:
            raise ValueError("coframe mismatch")


@dataclass(frozen=True)
class FrameVector:
    """Element of the frame dual to the coframe, with CScalar components."""

    coframe: Coframe
    components: tuple

    @staticmethod
    def basis(coframe, name):
        comps = [CScalar() for _ in coframe.names]
        comps[coframe.index(name)] = CScalar.one()
        return FrameVector(coframe, tuple(comps))

    @staticmethod
    def zero(coframe):
        return FrameVector(coframe, tuple(CScalar() for _ in coframe.names))

    @staticmethod
    def from_dict(coframe, comps):
        out = [CScalar() for _ in coframe.names]
        for name, c in comps.items():
            out[coframe.index(name)] = CScalar.of(c)
        return FrameVector(coframe, tuple(out))

    def __add__(self, other):
        return FrameVector(self.coframe,
                           tuple(a + b for a, b in zip(self.components, other.components)))

    def __neg__(self):
        return FrameVector(self.coframe, tuple(-a for a in self.components))

    def scale(self, c):
        c = CScalar.of(c)
        return FrameVector(self.coframe, tuple(a * c for a in self.components))

    def conj(self):
        return FrameVector(self.coframe, tuple(a.conj() for a in self.components))

    def is_zero(self):
        return all(c.is_zero() for c in self.components)

    def component(self, name):
        return self.components[self.coframe.index(name)]

    def variables(self):
        out = set()
        for c in self.components:
            out |= c.variables()
        return out

    def map_to(self, coframe, rename=None):
        rename = rename or {}
        out = [CScalar() for _ in coframe.names]
        for i, c in enumerate(self.components):
            if c.is_zero():
                continue
            out[coframe.index(rename.get(self.coframe.names[i], self.coframe.names[i]))] = c
        return FrameVector(coframe, tuple(out))

    def eval_vector(self, point, memo=None):
        if memo is None:
            memo = {}
        return np.array([c.evaluate(point, memo) for c in self.components])


# -- products and actions -----------------------------------------------------------

def wedge(a, b):
    """Graded anticommutative product."""
    a._check(b)
    out = {}
    for ma, ca in a.coeffs.items():
        for mb, cb in b.coeffs.items():
            if ma & mb:
                continue
            sign = _wedge_sign(ma, mb)
            m = ma | mb
            c = ca * cb
            if sign < 0:
                c = -c
            out[m] = out[m] + c if m in out else c
    return Form(a.coframe, out)


def wedge_all(*forms):
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def contract(x, form):
    """Interior product i_X, a degree -1 antiderivation."""
    if x.coframe != form.coframe:
        raise ValueError("coframe mismatch")
    out = {}
    for i, comp in enumerate(x.components):
        if comp.is_zero():
            continue
        bit = 1 << i
        for mask, c in form.coeffs.items():
            if not mask & bit:
                continue
            sign = _contract_sign(mask, i)
            m = mask & ~bit
            term = c * comp
            if sign < 0:
                term = -term
            out[m] = out[m] + term if m in out else term
    return Form(form.coframe, out)


def clifford_act(x, xi, rho):
    """(X + xi) . rho = i_X rho + xi ^ rho; parity-reversing Clifford action."""
    if not all(d <= 1 for d in xi.degrees()):
        raise ValueError("covector part must be of degree one")
    return contract(x, rho) + wedge(xi, rho)


def reversal(rho):
    """Reverse the order of factors: degree-k part picks up (-1)^(k(k-1)/2)."""
    out = {}
    for mask, c in rho.coeffs.items():
        k = bin(mask).count("1")
        out[mask] = -c if (k * (k - 1) // 2) % 2 else c
    return Form(rho.coframe, out)


def mukai_pairing(a, b):
    """Top-degree component of reversal(a) ^ b."""
    return wedge(reversal(a), b).top_component()


def exp_form(b, topdeg=None):
    """Truncated exponential of an even form of degree >= 2 (exact: nilpotent)."""
    for d in b.degrees():
        if d % 2 or d == 0:
            raise ValueError("exponent must be a sum of even-degree components of degree >= 2")
    if topdeg is None:
        topdeg = b.coframe.dim
    out = Form.scalar(b.coframe, 1)
    power = Form.scalar(b.coframe, 1)
    factorial = 1
    for j in range(1, topdeg // 2 + 1):
        power = wedge(power, b)
        if power.is_zero():
            break
        factorial *= j
        out = out + power.scale(rat(1, factorial))
    return out


def fiber_integrate(rho, coframe_tags=("fiber",)):
    """Integrate over the unit-volume torus fibers tagged by ``coframe_tags``.

    Convention: each term is rewritten as alpha ^ theta_1 ^ ... ^ theta_k with
    the full fiber volume rightmost and alpha free of fiber generators; the
    term integrates to alpha.  Terms missing any fiber generator integrate to
    zero.  Invariance of coefficients is implicit: coefficients are functions
    of base variables only.
    """
    vol = rho.coframe.tag_mask(*coframe_tags)
    out = {}
    for mask, c in rho.coeffs.items():
        if mask & vol != vol:
            continue
        rest = mask & ~vol
        sign = _wedge_sign(rest, vol)
        term = -c if sign < 0 else c
        out[rest] = out[rest] + term if rest in out else term
    return Form(rho.coframe, out)


# -- text serialization ---------------------------------------------------------------
# A form is a sum of terms "{sexpr} g1^g2^..." (degree 0 uses "1" for the
# generator list); complex coefficients use the (cplx re im) head.

def _cs_to_text(c):
    from .scalar import scalar_to_text
    if c.im.is_zero():
        return scalar_to_text(c.re)
    return f"(cplx {scalar_to_text(c.re)} {scalar_to_text(c.im)})"


def _cs_from_text(text):
    from .scalar import scalar_from_text, _tokenize
    toks = _tokenize(text)
    if len(toks) >= 2 and toks[0] == "(" and toks[1] == "cplx":
        inner = text.strip()[1:-1].strip()[4:].strip()
        depth = 0
        for i, ch in enumerate(inner):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == " " and depth == 0:
                return CScalar(scalar_from_text(inner[:i]), scalar_from_text(inner[i:]))
        raise ValueError(f"malformed complex coefficient: {text}")
    return CScalar(scalar_from_text(text))


def form_to_text(form):
    if form.is_zero():
        return "0 1"
    parts = []
    for mask in sorted(form.coeffs, key=lambda m: (bin(m).count("1"), m)):
        names = form.coframe.names_of(mask)
        gens = "^".join(names) if names else "1"
        parts.append(f"{_cs_to_text(form.coeffs[mask])} {gens}")
    return " + ".join(parts)


def _split_top_level(text, sep=" + "):
    parts = []
    depth = 0
    start = 0
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif depth == 0 and text.startswith(sep, i):
            parts.append(text[start:i])
            i += len(sep)
            start = i
            continue
        i += 1
    parts.append(text[start:])
    return parts


def form_from_text(coframe, text):
    total = Form.zero(coframe)
    for part in _split_top_level(text.strip()):
        part = part.strip()
        if not part:
            continue
        idx = len(part)
        depth = 0
        # coefficient is everything before the final whitespace-separated token
        for i, ch in enumerate(part):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == " " and depth == 0:
                idx = i
        coeff_text, gens_text = part[:idx].strip(), part[idx:].strip()
        coeff = _cs_from_text(coeff_text)
        if gens_text == "1":
            total = total + Form.scalar(coframe, coeff)
        else:
            total = total + Form.monomial(coframe, gens_text.split("^"), coeff)
    return total
