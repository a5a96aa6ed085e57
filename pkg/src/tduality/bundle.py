"""Chart models of principal torus bundles with connection and invariant flux.

A chart is a coordinate box on the base together with a coframe
{dx^a, theta_i} obeying the structure equations d(dx^a) = 0 and
d(theta_i) = c_i for closed basic curvature 2-forms c_i.  The flux H is an
invariant closed 3-form with no component along two fiber directions
(zero holonomy), which is exactly the condition under which a dual chart
exists.  A correspondence chart glues a chart and its dual over the shared
base with the 2-form F realizing dF = H - Ht.

Frame conventions used throughout the package: the frame dual to the coframe
consists of horizontal lifts E_a of the base coordinate fields plus the fiber
generators E_theta; consistently with the structure equations this forces
[E_a, E_b] = -sum_i c_i(E_a, E_b) E_theta_i, while fiber generators are
central (see courant.lie_bracket).
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .scalar import CScalar, Domain, ZERO, diff, evaluate
from .exterior import Coframe, Form, wedge

__all__ = [
    "BundleChart", "CorrespondenceChart",
    "exterior_derivative", "twisted_derivative",
    "split_flux", "build_dual_chart", "make_correspondence",
    "validate_chart", "validate_pair", "ChartReport", "PairReport",
    "chart_to_text", "chart_from_text", "standard_correspondence_flux",
    "form_residual",
]


def base_generator(varname):
    return "d" + varname


@dataclass(frozen=True)
class BundleChart:
    """Single-box chart of a principal T^k bundle with connection and flux."""

    name: str
    base_vars: tuple
    domain: Domain
    coframe: Coframe
    curvature: dict          # fiber generator name -> basic closed 2-form
    flux: Form               # invariant 3-form H

    def __post_init__(self):
        expected = tuple(base_generator(v) for v in self.base_vars)
        base_names = tuple(n for n, t in zip(self.coframe.names, self.coframe.tags)
                           if t == "base")
        if base_names != expected:
            raise ValueError("base generators must be d<var> in base-variable order")
        for gen in self.curvature:
            if self.coframe.tags[self.coframe.index(gen)] == "base":
                raise ValueError("curvature is attached to fiber generators only")

    @property
    def k(self):
        return sum(1 for t in self.coframe.tags if t == "fiber")

    @property
    def fiber_names(self):
        return tuple(n for n, t in zip(self.coframe.names, self.coframe.tags) if t == "fiber")

    @property
    def dim(self):
        return self.coframe.dim

    def var_of_generator(self, name):
        i = self.coframe.index(name)
        if self.coframe.tags[i] != "base":
            raise ValueError(f"{name!r} is not a base generator")
        return self.base_vars[[base_generator(v) for v in self.base_vars].index(name)]

    def curvature_of(self, gen):
        return self.curvature.get(gen, Form.zero(self.coframe))

    def with_flux(self, flux):
        return dataclasses.replace(self, flux=flux)

    @staticmethod
    def build(name, bases, fibers, curvature=None, flux=None, exclusions=(),
              cofibers=()):
        """Assemble a chart; ``bases`` is a list of (var, lo, hi)."""
        base_names = tuple(base_generator(v) for v, _, _ in bases)
        names = base_names + tuple(fibers) + tuple(cofibers)
        tags = (("base",) * len(bases) + ("fiber",) * len(fibers)
                + ("cofiber",) * len(cofibers))
        cof = Coframe(names, tags)
        domain = Domain({v: (lo, hi) for v, lo, hi in bases}, tuple(exclusions))
        curv = {}
        if curvature:
            for gen, maker in curvature.items():
                curv[gen] = maker(cof) if callable(maker) else maker
        fl = flux(cof) if callable(flux) else flux
        return BundleChart(name, tuple(v for v, _, _ in bases), domain, cof,
                           curv, fl if fl is not None else Form.zero(cof))


# -- differential ------------------------------------------------------------------

def _d_coefficient(chart, c):
    """d of a CScalar coefficient as a 1-form sum over base generators."""
    out = Form.zero(chart.coframe)
    for v in chart.base_vars:
        dre = diff(c.re, v)
        dim = diff(c.im, v)
        if dre.is_zero() and dim.is_zero():
            continue
        out = out + Form.monomial(chart.coframe, (base_generator(v),), CScalar(dre, dim))
    return out


def exterior_derivative(rho, chart):
    """Structure-equation d: d(dx^a)=0, d(theta_i)=c_i, Leibniz on coefficients."""
    if rho.coframe != chart.coframe:
        raise ValueError("coframe mismatch")
    cof = chart.coframe
    out = Form.zero(cof)
    for mask, c in rho.coeffs.items():
        mono = Form(cof, {mask: CScalar.one()})
        out = out + wedge(_d_coefficient(chart, c), mono)
        # Leibniz over generators; d(gen) is even so it moves freely to the front
        for i in range(cof.dim):
            if not mask >> i & 1:
                continue
            dgen = chart.curvature.get(cof.names[i])
            if dgen is not None and not dgen.is_zero():
                lower = mask & ((1 << i) - 1)
                sign = -1 if bin(lower).count("1") % 2 else 1
                term = wedge(dgen, Form(cof, {mask & ~(1 << i): c}))
                out = out + (term if sign > 0 else -term)
    return out


def twisted_derivative(rho, chart):
    """d_H rho = d rho + H ^ rho."""
    return exterior_derivative(rho, chart) + wedge(chart.flux, rho)


# -- flux splitting and the dual chart ----------------------------------------------

def _check_zero_holonomy(chart):
    fiber_mask = chart.coframe.tag_mask("fiber")
    for mask in chart.flux.coeffs:
        if bin(mask & fiber_mask).count("1") >= 2:
            return False
    return True


def split_flux(chart):
    """Write H = sum_i ct_i ^ theta_i + h with ct_i, h basic.

    Returns ({fiber generator: ct_i}, h).  Requires zero holonomy.
    """
    if not _check_zero_holonomy(chart):
        raise ValueError("flux violates zero holonomy: a component has two fiber legs")
    cof = chart.coframe
    ct = {gen: Form.zero(cof) for gen in chart.fiber_names}
    h = Form.zero(cof)
    for mask, c in chart.flux.coeffs.items():
        fiber_bits = mask & cof.tag_mask("fiber")
        if fiber_bits == 0:
            h = h + Form(cof, {mask: c})
            continue
        i = fiber_bits.bit_length() - 1
        gen = cof.names[i]
        rest = mask & ~(1 << i)
        # coeff * e_mask = coeff' * e_rest ^ theta_i with the theta rightmost
        from .exterior import _wedge_sign
        sign = _wedge_sign(rest, 1 << i)
        term = Form(cof, {rest: -c if sign < 0 else c})
        ct[gen] = ct[gen] + term
    return ct, h


def dual_fiber_name(name):
    return name + "t"


def build_dual_chart(chart):
    """Construct the dual chart and the correspondence realizing the duality.

    The dual carries curvature ct_i from the flux splitting and flux
    Ht = sum_i c_i ^ thetat_i + h; the correspondence form is
    F = -sum_i theta_i ^ thetat_i, for which dF = H - Ht holds structurally.
    """
    ct, h = split_flux(chart)
    dual_fibers = tuple(dual_fiber_name(n) for n in chart.fiber_names)
    dual_cof = Coframe(
        tuple(base_generator(v) for v in chart.base_vars) + dual_fibers,
        ("base",) * len(chart.base_vars) + ("fiber",) * len(dual_fibers))
    rename = {}
    dual_curv = {dual_fiber_name(n): ct[n].map_to(dual_cof, rename)
                 for n in chart.fiber_names}
    flux_t = h.map_to(dual_cof, rename)
    for n in chart.fiber_names:
        c_n = chart.curvature_of(n).map_to(dual_cof, rename)
        flux_t = flux_t + wedge(c_n, Form.monomial(dual_cof, (dual_fiber_name(n),)))
    dual = BundleChart(chart.name + "~", chart.base_vars, chart.domain,
                       dual_cof, dual_curv, flux_t)
    corr = make_correspondence(chart, dual, standard_correspondence_flux)
    return dual, corr


def standard_correspondence_flux(total_coframe, chart, dual):
    """F = -sum_i theta_i ^ thetat_i on the correspondence coframe."""
    F = Form.zero(total_coframe)
    for n in chart.fiber_names:
        F = F - Form.monomial(total_coframe, (n, dual_fiber_name(n)))
    return F


@dataclass(frozen=True)
class CorrespondenceChart:
    """Fiber product of two charts over the shared base, carrying F."""

    chart_m: BundleChart
    chart_mt: BundleChart
    total: BundleChart         # combined coframe; flux is the pullback of H
    F: Form

    @property
    def fiber_names(self):
        return self.chart_m.fiber_names

    @property
    def dual_fiber_names(self):
        return self.chart_mt.fiber_names

    def pull_m(self, rho):
        return rho.map_to(self.total.coframe)

    def pull_mt(self, rho):
        return rho.map_to(self.total.coframe)

    def push_mt(self, rho):
        """Forms with no M-fiber legs descend to the dual chart."""
        return rho.map_to(self.chart_mt.coframe)

    def push_m(self, rho):
        return rho.map_to(self.chart_m.coframe)

    def flux_difference_residual(self):
        """p*H - pt*Ht - dF as a form on the correspondence."""
        lhs = self.pull_m(self.chart_m.flux) - self.pull_mt(self.chart_mt.flux)
        return lhs - exterior_derivative(self.F, self.total)

    def fiber_block(self):
        """k x k matrix of Scalars F(E_theta_i, E_thetat_j)."""
        k = len(self.fiber_names)
        block = [[ZERO] * k for _ in range(k)]
        cof = self.total.coframe
        for i, ni in enumerate(self.fiber_names):
            for j, nj in enumerate(self.dual_fiber_names):
                c = self.F.coeff(cof.mask_of((ni, nj)))
                if not c.im.is_zero():
                    raise ValueError("correspondence form must be real")
                block[i][j] = c.re
        return block


def make_correspondence(chart, dual, flux_maker):
    if chart.base_vars != dual.base_vars:
        raise ValueError("charts must share the base")
    base = tuple(base_generator(v) for v in chart.base_vars)
    names = base + chart.fiber_names + dual.fiber_names
    tags = (("base",) * len(base) + ("fiber",) * len(chart.fiber_names)
            + ("cofiber",) * len(dual.fiber_names))
    cof = Coframe(names, tags)
    curv = {n: chart.curvature_of(n).map_to(cof) for n in chart.fiber_names}
    curv.update({n: dual.curvature_of(n).map_to(cof) for n in dual.fiber_names})
    total = BundleChart(f"{chart.name}x{dual.name}", chart.base_vars,
                        chart.domain.merge(dual.domain), cof, curv,
                        chart.flux.map_to(cof))
    F = flux_maker(cof, chart, dual) if callable(flux_maker) else flux_maker.map_to(cof)
    return CorrespondenceChart(chart, dual, total, F)


# -- validation ---------------------------------------------------------------------

def form_residual(form, domain, points):
    """Max over points of the max absolute coefficient value."""
    worst = 0.0
    for p in points:
        memo = {}
        for c in form.coeffs.values():
            worst = max(worst, abs(c.evaluate(p, memo)))
    return worst


@dataclass
class ChartReport:
    name: str
    flux_closed_residual: float
    curvature_closed_residual: float
    zero_holonomy: bool
    invariant_coefficients: bool
    tol: float

    @property
    def ok(self):
        return (self.zero_holonomy and self.invariant_coefficients
                and self.flux_closed_residual <= self.tol
                and self.curvature_closed_residual <= self.tol)


def validate_chart(chart, n=8, tol=1e-9, seed=0):
    rng = np.random.default_rng(seed)
    points = chart.domain.sample_many(rng, n)
    dh = exterior_derivative(chart.flux, chart)
    curv_res = 0.0
    for gen, c in chart.curvature.items():
        curv_res = max(curv_res, form_residual(exterior_derivative(c, chart),
                                               chart.domain, points))
    allowed = set(chart.base_vars)
    invariant = chart.flux.variables() <= allowed and all(
        c.variables() <= allowed for c in chart.curvature.values())
    return ChartReport(
        name=chart.name,
        flux_closed_residual=form_residual(dh, chart.domain, points),
        curvature_closed_residual=curv_res,
        zero_holonomy=_check_zero_holonomy(chart),
        invariant_coefficients=invariant,
        tol=tol,
    )


@dataclass
class PairReport:
    chart_m: ChartReport
    chart_mt: ChartReport
    flux_difference_residual: float
    nondegenerate: bool
    unimodular: bool | None
    min_abs_det: float
    tol: float

    @property
    def ok(self):
        return (self.chart_m.ok and self.chart_mt.ok and self.nondegenerate
                and self.flux_difference_residual <= self.tol)


def validate_pair(corr, n=8, tol=1e-9, seed=0):
    """Residual of dF = H - Ht, fiber-block nondegeneracy, unimodularity."""
    rng = np.random.default_rng(seed)
    points = corr.total.domain.sample_many(rng, n)
    res = form_residual(corr.flux_difference_residual(), corr.total.domain, points)
    block = corr.fiber_block()
    k = len(block)
    min_det = float("inf")
    for p in points:
        memo = {}
        mat = np.array([[evaluate(block[i][j], p, memo) for j in range(k)]
                        for i in range(k)], dtype=float)
        min_det = min(min_det, abs(np.linalg.det(mat)))
    constant = all(e.is_rational() for row in block for e in row)
    unimodular = None
    if constant:
        vals = np.array([[float(e.value) for e in row] for row in block])
        is_int = np.allclose(vals, np.round(vals), atol=tol)
        unimodular = bool(is_int and abs(abs(np.linalg.det(np.round(vals))) - 1.0) <= tol)
    return PairReport(
        chart_m=validate_chart(corr.chart_m, n=n, tol=tol, seed=seed),
        chart_mt=validate_chart(corr.chart_mt, n=n, tol=tol, seed=seed + 1),
        flux_difference_residual=res,
        nondegenerate=min_det > tol,
        unimodular=unimodular,
        min_abs_det=min_det,
        tol=tol,
    )


# -- chart config serialization ------------------------------------------------------
# Line format:
#   chart <name>
#   var <v> = <lo> .. <hi>  [exclude <value> <radius>]
#   fiber <gen> [<gen> ...]
#   curv <gen> = <form text>
#   flux = <form text>

def chart_to_text(chart):
    from .exterior import form_to_text
    lines = [f"chart {chart.name}"]
    for v in chart.base_vars:
        lo, hi = chart.domain.intervals[v]
        line = f"var {v} = {lo!r} .. {hi!r}"
        for name, value, radius in chart.domain.exclusions:
            if name == v:
                line += f" exclude {value!r} {radius!r}"
        lines.append(line)
    if chart.fiber_names:
        lines.append("fiber " + " ".join(chart.fiber_names))
    for gen in chart.fiber_names:
        c = chart.curvature_of(gen)
        if not c.is_zero():
            lines.append(f"curv {gen} = {form_to_text(c)}")
    lines.append(f"flux = {form_to_text(chart.flux)}")
    return "\n".join(lines) + "\n"


def chart_from_text(text):
    from .exterior import form_from_text
    name = None
    bases = []
    exclusions = []
    fibers = []
    curv_lines = {}
    flux_line = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        if head == "chart":
            name = rest.strip()
        elif head == "var":
            vname, _, spec = rest.partition("=")
            vname = vname.strip()
            spec = spec.strip()
            if "exclude" in spec:
                spec, _, excl = spec.partition("exclude")
                value, radius = excl.split()
                exclusions.append((vname, float(value), float(radius)))
            lo, hi = (s.strip() for s in spec.split(".."))
            bases.append((vname, float(lo), float(hi)))
        elif head == "fiber":
            fibers.extend(rest.split())
        elif head == "curv":
            gen, _, form_text = rest.partition("=")
            curv_lines[gen.strip()] = form_text.strip()
        elif head == "flux":
            flux_line = rest.partition("=")[2].strip() if "=" in line else rest.strip()
        else:
            raise ValueError(f"unknown chart directive {head!r}")
    if name is None:
        raise ValueError("chart file must name the chart")
    chart = BundleChart.build(
        name, bases, fibers,
        curvature={g: (lambda cof, t=t: form_from_text(cof, t)) for g, t in curv_lines.items()},
        flux=(lambda cof: form_from_text(cof, flux_line)) if flux_line else None,
        exclusions=exclusions)
    return chart
