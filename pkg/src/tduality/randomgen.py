"""Seeded random geometric data for property checks and scenario suites.

Coefficients are small smooth expressions (polynomials plus sin/cos leaves)
in the chart base variables; everything is reproducible from the RNG handed
in, and callers record the seed.
"""
from __future__ import annotations

import itertools

import numpy as np

from .scalar import CScalar, Scalar, rat, var, ssin, scos, smul, sadd
from .exterior import Form, FrameVector
from .courant import Section
from .structures import GeneralizedMetric, PureSpinor, SymTensor, mukai_norm_at

__all__ = [
    "random_scalar", "random_cscalar", "random_form", "random_section",
    "random_metric", "random_pure_spinor",
]


def _coeff(rng):
    return rat(int(rng.integers(-3, 4)), int(rng.integers(1, 4)))


def random_scalar(rng, variables, terms=2):
    """Small random smooth expression in the given variables."""
    parts = [_coeff(rng)]
    for _ in range(terms):
        v = var(str(rng.choice(list(variables)))) if variables else None
        if v is None:
            break
        kind = rng.integers(0, 4)
        if kind == 0:
            parts.append(smul(_coeff(rng), v))
        elif kind == 1:
            parts.append(smul(_coeff(rng), v, v))
        elif kind == 2:
            parts.append(smul(_coeff(rng), ssin(v)))
        else:
            parts.append(smul(_coeff(rng), scos(v)))
    return sadd(*parts)


def random_cscalar(rng, variables, terms=2):
    return CScalar(random_scalar(rng, variables, terms),
                   random_scalar(rng, variables, terms))


def random_form(rng, coframe, variables, degrees=None, complex_coeffs=True,
                density=0.5):
    """Random invariant form with the given degrees (all by default)."""
    total = Form.zero(coframe)
    m = coframe.dim
    if degrees is None:
        degrees = range(m + 1)
    degrees = [d for d in degrees if d <= m]
    for d in degrees:
        for combo in itertools.combinations(range(m), d):
            if rng.random() > density:
                continue
            mask = 0
            for i in combo:
                mask |= 1 << i
            c = (random_cscalar(rng, variables, 1) if complex_coeffs
                 else CScalar(random_scalar(rng, variables, 1)))
            total = total + Form(coframe, {mask: c})
    if total.is_zero() and degrees:
        d = degrees[0]
        mask = (1 << d) - 1
        total = Form(coframe, {mask: CScalar.of(_coeff(rng))})
    return total


def random_section(rng, chart, complex_coeffs=False):
    cof = chart.coframe
    variables = chart.base_vars
    make = (lambda: random_cscalar(rng, variables, 1)) if complex_coeffs else \
        (lambda: CScalar(random_scalar(rng, variables, 1)))
    x = FrameVector(cof, tuple(make() for _ in cof.names))
    xi = Form.zero(cof)
    for n in cof.names:
        xi = xi + Form.monomial(cof, (n,), make())
    return Section(x, xi)


def random_metric(rng, chart, points=None):
    """Random invariant positive-definite metric plus 2-form.

    Built as delta + A^T A with small random A entries, so it stays positive
    definite; positivity is asserted on the provided sample points.
    """
    cof = chart.coframe
    m = cof.dim
    variables = chart.base_vars
    a = [[random_scalar(rng, variables, 1) for _ in range(m)] for _ in range(m)]
    entries = {}
    scale = rat(1, 8)
    for i in range(m):
        for j in range(i, m):
            s = sadd(*[smul(scale, a[k][i], a[k][j]) for k in range(m)])
            if i == j:
                s = sadd(rat(1), s)
            entries[(i, j)] = s
    g = SymTensor(cof, entries)
    b = random_form(rng, cof, variables, degrees=(2,), complex_coeffs=False)
    metric = GeneralizedMetric(g, b)
    if points:
        for p in points:
            w = np.linalg.eigvalsh(g.eval_matrix(p))
            if w.min() <= 0:
                raise AssertionError("random metric lost positivity")
    return metric


def random_pure_spinor(rng, chart, points, max_tries=40, omega_degrees=(2,)):
    """Random nondegenerate spinor with construction data.

    Rejection-samples (B, omega, Omega) until the pairing with the conjugate
    survives at every given point.
    """
    cof = chart.coframe
    variables = chart.base_vars
    m = cof.dim
    if m % 2:
        raise ValueError("chart dimension must be even")
    half = m // 2
    for _ in range(max_tries):
        b = random_form(rng, cof, variables, degrees=(2,), complex_coeffs=False,
                        density=0.4)
        omega = random_form(rng, cof, variables, degrees=(2,), complex_coeffs=False,
                            density=0.7)
        deg = int(rng.integers(0, half + 1))
        lowest = Form.scalar(cof, 1)
        for _ in range(deg):
            one = random_form(rng, cof, variables, degrees=(1,),
                              complex_coeffs=True, density=0.8)
            from .exterior import wedge
            lowest = wedge(lowest, one)
        if lowest.is_zero():
            continue
        spinor = PureSpinor.from_data(b, omega, lowest)
        try:
            norms = [mukai_norm_at(spinor, p) for p in points]
        except Exception:
            continue
        ref = max(max(abs(v) for v in spinor.form.eval_coeffs(p).values())
                  for p in points)
        if ref == 0:
            continue
        if min(norms) > 1e-3 * ref * ref:
            return spinor
    raise AssertionError("could not sample a nondegenerate spinor")
