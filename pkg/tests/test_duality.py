import numpy as np
import pytest

from tduality.scalar import (CScalar, ONE, ZERO, equal_numeric, rat, sadd,
                             scos, sdiv, smul, sneg, ssin, var)
from tduality.exterior import Form, wedge
from tduality.bundle import form_residual, twisted_derivative
from tduality.courant import Section, courant_bracket, pairing
from tduality.structures import (PureSpinor, SymTensor, check_integrable,
                                 spinor_type_at)
from tduality.duality import (DualityPair, assemble_metric,
                              bihermitian_dual_at, buscher_rules,
                              compatibility_residual, dual_type_at,
                              dualize_form, dualize_form_reverse,
                              dualize_section, orientation_sign, reverse_sign,
                              split_metric, split_two_form,
                              transform_matrix_at, transport_metric,
                              transport_spinor, uk_transport_residual)
from tduality.randomgen import (random_form, random_metric, random_pure_spinor,
                                random_section)
from tduality.scenarios import twisted_rank_two_pair


def sec_residual(s, points):
    worst = 0.0
    for p in points:
        memo = {}
        for c in s.x.components:
            worst = max(worst, abs(c.evaluate(p, memo)))
        for c in s.xi.coeffs.values():
            worst = max(worst, abs(c.evaluate(p, memo)))
    return worst


def metric_residual(a, b, points):
    worst = 0.0
    for p in points:
        memo = {}
        worst = max(worst, float(np.abs(a.g.eval_matrix(p, memo)
                                        - b.g.eval_matrix(p, memo)).max()))
    diffb = a.b - b.b
    for p in points:
        memo = {}
        for c in diffb.coeffs.values():
            worst = max(worst, abs(c.evaluate(p, memo)))
    return worst


# -- the form transform -------------------------------------------------------

def test_transform_circle_generators(circle_pair):
    cof = circle_pair.chart.coframe
    dcof = circle_pair.dual.coframe
    assert dualize_form(Form.monomial(cof, ("th",)), circle_pair) == Form.scalar(dcof, 1)
    assert dualize_form(Form.scalar(cof, 1), circle_pair) == Form.monomial(dcof, ("tht",))


def test_transform_intertwines_on_pairs(rng, hopf_pair, torus_pair):
    for pair in (hopf_pair, torus_pair, twisted_rank_two_pair()):
        chart = pair.chart
        pts = chart.domain.sample_many(rng, 3)
        for _ in range(6):
            rho = random_form(rng, chart.coframe, chart.base_vars, density=0.35)
            lhs = dualize_form(twisted_derivative(rho, chart), pair)
            rhs = twisted_derivative(dualize_form(rho, pair), pair.dual)
            assert form_residual(lhs - rhs, pair.dual.domain, pts) <= 1e-8


def test_transform_reverse_sign(circle_pair, torus_pair, rng):
    assert reverse_sign(circle_pair) == pytest.approx(1.0)
    assert reverse_sign(torus_pair) == pytest.approx(-1.0)
    for pair in (circle_pair, torus_pair):
        chart = pair.chart
        pts = chart.domain.sample_many(rng, 3)
        sign = rat(round(reverse_sign(pair).real))
        for _ in range(4):
            rho = random_form(rng, chart.coframe, chart.base_vars, density=0.4)
            back = dualize_form_reverse(dualize_form(rho, pair), pair)
            assert form_residual(back - rho.scale(CScalar.of(sign)),
                                 chart.domain, pts) <= 1e-9


def test_transform_matrix_matches_symbolic(rng, hopf_pair):
    chart = hopf_pair.chart
    p = chart.domain.sample_many(rng, 1)[0]
    t = transform_matrix_at(hopf_pair, p)
    for _ in range(4):
        rho = random_form(rng, chart.coframe, chart.base_vars, density=0.4)
        lhs = t @ rho.eval_vector(p)
        rhs = dualize_form(rho, hopf_pair).eval_vector(p)
        assert np.abs(lhs - rhs).max() <= 1e-10


# -- the section transform -----------------------------------------------------

def test_section_transform_circle_formula(circle_pair):
    # the displayed swap of fiber velocity and fiber momentum, structurally
    cof = circle_pair.chart.coframe
    dcof = circle_pair.dual.coframe
    t = var("t")
    f, g = ssin(t), t ** 3
    v = Section.of(cof, vector={"dt": rat(2), "th": f},
                   covector={"dt": t, "th": g})
    expected = Section.of(dcof, vector={"dt": rat(2), "tht": g},
                          covector={"dt": t, "tht": f})
    assert dualize_section(v, circle_pair) == expected


def test_section_transform_fixes_basic(circle_pair):
    cof = circle_pair.chart.coframe
    t = var("t")
    v = Section.of(cof, vector={"dt": scos(t)}, covector={"dt": t * t})
    out = dualize_section(v, circle_pair)
    assert out == v.map_to(circle_pair.dual.coframe)


def test_section_transform_orthogonal(rng, hopf_pair):
    chart = hopf_pair.chart
    pts = chart.domain.sample_many(rng, 3)
    for _ in range(12):
        v = random_section(rng, chart)
        w = random_section(rng, chart)
        gap = (pairing(dualize_section(v, hopf_pair), dualize_section(w, hopf_pair))
               - pairing(v, w))
        for p in pts:
            assert abs(gap.evaluate(p)) <= 1e-9


def test_section_transform_bracket(rng, hopf_pair):
    chart = hopf_pair.chart
    pts = chart.domain.sample_many(rng, 3)
    for _ in range(8):
        v = random_section(rng, chart)
        w = random_section(rng, chart)
        lhs = dualize_section(courant_bracket(v, w, chart), hopf_pair)
        rhs = courant_bracket(dualize_section(v, hopf_pair),
                              dualize_section(w, hopf_pair), hopf_pair.dual)
        assert sec_residual(lhs - rhs, pts) <= 1e-8


def test_clifford_compatibility(rng, hopf_pair, torus_pair):
    for pair in (hopf_pair, torus_pair):
        chart = pair.chart
        pts = chart.domain.sample_many(rng, 3)
        for _ in range(6):
            v = random_section(rng, chart)
            rho = random_form(rng, chart.coframe, chart.base_vars, density=0.35)
            assert compatibility_residual(v, rho, pair, pts) <= 1e-8


def test_clifford_compatibility_fiber_generator(circle_pair):
    # v = E_theta, rho = theta: both sides give the dual fiber form exactly
    cof = circle_pair.chart.coframe
    v = Section.vector_basis(cof, "th")
    rho = Form.monomial(cof, ("th",))
    lhs = dualize_form(v.act(rho), circle_pair)
    rhs = dualize_section(v, circle_pair).act(dualize_form(rho, circle_pair))
    expected = Form.monomial(circle_pair.dual.coframe, ("tht",))
    assert lhs == rhs == expected


def test_clifford_compatibility_basic_data(circle_pair):
    # basic section on a basic form: the transform commutes with wedge and
    # contraction outright
    cof = circle_pair.chart.coframe
    t = var("t")
    v = Section.of(cof, vector={"dt": t}, covector={"dt": ssin(t)})
    rho = Form.monomial(cof, ("dt",), scos(t)) + Form.scalar(cof, t * t)
    lhs = dualize_form(v.act(rho), circle_pair)
    rhs = dualize_section(v, circle_pair).act(dualize_form(rho, circle_pair))
    assert lhs == rhs


# -- metric transport ------------------------------------------------------------

def test_buscher_round_sphere(circle_pair):
    chart = circle_pair.chart
    cof = chart.coframe
    t = var("t")
    g0 = sadd(ONE, sneg(smul(t, t)))
    g2 = SymTensor.from_names(cof, {("dt", "dt"): sdiv(ONE, g0)})
    zero = Form.zero(cof)
    out = buscher_rules(g0, zero, g2, zero, zero, circle_pair)
    inv = sdiv(ONE, g0)
    dom = chart.domain
    assert equal_numeric(out.g.entry_of("tht", "tht"), inv, dom)
    assert equal_numeric(out.g.entry_of("dt", "dt"), inv, dom)
    assert out.g.entry_of("dt", "tht").is_zero()
    assert out.b.is_zero()


def test_buscher_block_diagonal_specialization(circle_pair):
    chart = circle_pair.chart
    cof = chart.coframe
    t = var("t")
    g0 = sadd(rat(2), smul(t, t))
    g2 = SymTensor.from_names(cof, {("dt", "dt"): ONE})
    b2 = Form.zero(cof)
    zero = Form.zero(cof)
    out = buscher_rules(g0, zero, g2, zero, b2, circle_pair)
    assert out.g.entry_of("tht", "tht") == sdiv(ONE, g0)
    assert out.g.entry_of("dt", "dt") == ONE
    assert out.b.is_zero()


def test_buscher_vanishing_two_form_gives_connection_shear(circle_pair):
    # with b = 0 and a mixed metric term, the dual 2-form is the single
    # shear -(g1/g0) ^ thetat
    chart = circle_pair.chart
    cof = chart.coframe
    dcof = circle_pair.dual.coframe
    t = var("t")
    g0 = sadd(rat(2), smul(t, t))
    g1 = Form.monomial(cof, ("dt",), ssin(t))
    g2 = SymTensor.from_names(cof, {("dt", "dt"): ONE})
    zero = Form.zero(cof)
    out = buscher_rules(g0, g1, g2, zero, zero, circle_pair)
    expected = Form.monomial(dcof, ("dt", "tht"), sneg(sdiv(ssin(t), g0)))
    dom = chart.domain
    gap = out.b - expected
    assert all(equal_numeric(c.re, ZERO, dom) and equal_numeric(c.im, ZERO, dom)
               for c in gap.coeffs.values()) or gap.is_zero()
    # and the mixed dual metric entry vanishes when b1 = 0
    assert out.g.entry_of("dt", "tht").is_zero()


def test_buscher_fiber_inversion_structural(circle_pair):
    t = var("t")
    g0 = sadd(ONE, smul(t, t))
    cof = circle_pair.chart.coframe
    zero = Form.zero(cof)
    out = buscher_rules(g0, zero, SymTensor(cof, {}), zero, zero, circle_pair)
    assert out.g.entry_of("tht", "tht") == sdiv(ONE, g0)


def test_buscher_involution_random(rng):
    from tduality.bundle import BundleChart
    chart = BundleChart.build("c", [("t", -0.9, 0.9), ("u", 0.1, 0.9)], ["th"])
    pair = DualityPair.from_chart(chart)
    back_pair = pair.swap()
    pts = chart.domain.sample_many(rng, 4)
    for _ in range(6):
        met = random_metric(rng, chart, pts)
        g0, g1, g2 = split_metric(met.g, chart)
        b1, b2 = split_two_form(met.b, chart)
        first = buscher_rules(g0, g1, g2, b1, b2, pair)
        g0t, g1t, g2t = split_metric(first.g, pair.dual)
        b1t, b2t = split_two_form(first.b, pair.dual)
        back = buscher_rules(g0t, g1t, g2t, b1t, b2t, back_pair)
        assert metric_residual(back, met, pts) <= 1e-9


def test_transport_matches_buscher_random(rng, hopf_pair):
    chart = hopf_pair.chart
    pts = chart.domain.sample_many(rng, 4)
    for _ in range(6):
        met = random_metric(rng, chart, pts)
        g0, g1, g2 = split_metric(met.g, chart)
        b1, b2 = split_two_form(met.b, chart)
        closed = buscher_rules(g0, g1, g2, b1, b2, hopf_pair)
        transported = transport_metric(met, hopf_pair)
        assert metric_residual(transported, closed, pts) <= 1e-9


# -- type change ------------------------------------------------------------------

def test_dual_type_circle_basic_factor(circle_pair, rng):
    chart = circle_pair.chart
    cof = chart.coframe
    t = var("t")
    omega = Form.monomial(cof, ("dt", "th"), sadd(rat(1, 2), smul(t, t)))
    sp = PureSpinor.from_data(Form.zero(cof), omega, Form.scalar(cof, 1))
    p = chart.domain.sample_many(rng, 1)[0]
    assert dual_type_at(sp, circle_pair, p) == (1, 1)   # type 0 -> 1, basic factor


def test_dual_type_circle_fiber_factor(circle_pair, rng):
    chart = circle_pair.chart
    cof = chart.coframe
    lowest = Form.monomial(cof, ("th",)) + Form.monomial(cof, ("dt",), CScalar.i())
    sp = PureSpinor.from_data(Form.zero(cof), Form.zero(cof), lowest)
    p = chart.domain.sample_many(rng, 1)[0]
    assert dual_type_at(sp, circle_pair, p) == (0, 0)   # type 1 -> 0, fiber leg


def test_dual_type_matches_transported_type(rng, circle_pair, torus_pair):
    for pair in (circle_pair, torus_pair):
        chart = pair.chart
        pts = chart.domain.sample_many(rng, 2)
        for _ in range(8):
            sp = random_pure_spinor(rng, chart, pts)
            dual_sp = transport_spinor(sp, pair)
            for p in pts:
                tt, j = dual_type_at(sp, pair, p)
                assert tt == spinor_type_at(dual_sp, pair.dual, p)


def _table_pair():
    from tduality.bundle import BundleChart
    chart = BundleChart.build("t4", [("s1", 0.05, 0.65), ("s2", 0.08, 1.0)],
                              ["th1", "th2"])
    return DualityPair.from_chart(chart), chart


def test_type_change_table(rng):
    # the four fiber geometries of a rank-two duality with the standard form
    pair, chart = _table_pair()
    cof = chart.coframe
    p = chart.domain.sample_many(rng, 1)[0]
    i_unit = CScalar.i()
    zero = Form.zero(cof)

    # complex structure, complex fibers -> complex
    omega_fiber = wedge(Form.monomial(cof, ("th1",)) + Form.monomial(cof, ("th2",), i_unit),
                        Form.monomial(cof, ("ds1",)) + Form.monomial(cof, ("ds2",), i_unit))
    sp = PureSpinor.from_data(zero, zero, omega_fiber)
    assert dual_type_at(sp, pair, p) == (2, 1)

    # complex structure, real fibers -> symplectic
    omega_real = wedge(Form.monomial(cof, ("ds1",)) + Form.monomial(cof, ("th1",), i_unit),
                       Form.monomial(cof, ("ds2",)) + Form.monomial(cof, ("th2",), i_unit))
    sp = PureSpinor.from_data(zero, zero, omega_real)
    assert dual_type_at(sp, pair, p) == (0, 0)

    # symplectic structure, symplectic fibers -> symplectic
    omega = Form.monomial(cof, ("th1", "th2")) + Form.monomial(cof, ("ds1", "ds2"))
    sp = PureSpinor.from_data(zero, omega, Form.scalar(cof, 1))
    assert dual_type_at(sp, pair, p) == (0, 1)

    # symplectic structure, isotropic fibers -> complex
    omega = Form.monomial(cof, ("th1", "ds1")) + Form.monomial(cof, ("th2", "ds2"))
    sp = PureSpinor.from_data(zero, omega, Form.scalar(cof, 1))
    assert dual_type_at(sp, pair, p) == (2, 2)


def test_dual_type_degenerate_flagged(circle_pair):
    # with an invertible fiber block some power always survives for a
    # nonvanishing spinor; the flagged failure is a vanishing point
    chart = circle_pair.chart
    cof = chart.coframe
    t = var("t")
    lowest = Form.monomial(cof, ("dt",), t)
    sp = PureSpinor.from_data(Form.zero(cof), Form.zero(cof), lowest)
    with pytest.raises(ValueError):
        dual_type_at(sp, circle_pair, {"t": 0.0})


# -- integrability transport --------------------------------------------------------

def test_integrability_transported(rng, torus_pair):
    chart = torus_pair.chart
    cof = chart.coframe
    pts = chart.domain.sample_many(rng, 4)
    omega = Form.monomial(cof, ("ds1", "th1")) + Form.monomial(cof, ("ds2", "th2"))
    sp = PureSpinor.from_data(Form.zero(cof), omega, Form.scalar(cof, 1))
    assert check_integrable(sp, chart, pts).integrable
    dual_sp = transport_spinor(sp, torus_pair)
    assert check_integrable(dual_sp, torus_pair.dual, pts).integrable


def test_non_integrability_transported(rng, torus_pair):
    chart = torus_pair.chart
    cof = chart.coframe
    pts = chart.domain.sample_many(rng, 4)
    s2 = var("s2")
    omega = (Form.monomial(cof, ("ds1", "th1"), rat(1) + s2 * s2)
             + Form.monomial(cof, ("ds2", "th2")))
    sp = PureSpinor.from_data(Form.zero(cof), omega, Form.scalar(cof, 1))
    res = check_integrable(sp, chart, pts)
    assert not res.integrable and res.residual > 1e-4
    dual_res = check_integrable(transport_spinor(sp, torus_pair),
                                torus_pair.dual, pts)
    assert not dual_res.integrable and dual_res.residual > 1e-4


# -- eigenspace ladder and tangent-structure transport ---------------------------------

def test_uk_transport(rng, circle_pair, torus_pair):
    for pair in (circle_pair, torus_pair):
        chart = pair.chart
        pts = chart.domain.sample_many(rng, 2)
        for _ in range(3):
            sp = random_pure_spinor(rng, chart, pts)
            for p in pts:
                assert uk_transport_residual(sp, pair, p) <= 1e-8


def test_bihermitian_transport_properties(rng, circle_chart):
    from tduality.bundle import BundleChart
    chart = circle_chart
    cof = chart.coframe
    t = var("t")
    g0 = sadd(rat(2), smul(t, t))
    g2 = SymTensor.from_names(cof, {("dt", "dt"): sadd(ONE, smul(t, t))})
    zero = Form.zero(cof)
    met = assemble_metric(chart, g0, zero, g2, zero, zero)
    p = {"t": 0.4}
    gmat = met.g.eval_matrix(p)
    lam = np.sqrt(gmat[0, 0] / gmat[1, 1])
    i_mat = np.array([[0.0, -1.0 / lam], [lam, 0.0]])
    for side in (+1, -1):
        out = bihermitian_dual_at(i_mat, met, chart, p, side)
        assert np.abs(out @ out + np.eye(2)).max() <= 1e-9
    plus = bihermitian_dual_at(i_mat, met, chart, p, +1)
    minus = bihermitian_dual_at(i_mat, met, chart, p, -1)
    assert orientation_sign(plus) == orientation_sign(i_mat)
    assert orientation_sign(minus) == -orientation_sign(i_mat)


def test_bihermitian_unit_fiber_identification(circle_chart):
    cof = circle_chart.coframe
    zero = Form.zero(cof)
    g2 = SymTensor.from_names(cof, {("dt", "dt"): ONE})
    met = assemble_metric(circle_chart, ONE, zero, g2, zero, zero)
    i_mat = np.array([[0.0, -1.0], [1.0, 0.0]])
    out = bihermitian_dual_at(i_mat, met, circle_chart, {"t": 0.2}, +1)
    assert np.abs(out - i_mat).max() <= 1e-12


def test_bihermitian_requires_metric_connection(circle_chart):
    cof = circle_chart.coframe
    t = var("t")
    g2 = SymTensor.from_names(cof, {("dt", "dt"): ONE})
    g1 = Form.monomial(cof, ("dt",), t)   # mixed term: not the metric connection
    met = assemble_metric(circle_chart, rat(2), g1, g2, Form.zero(cof), Form.zero(cof))
    i_mat = np.array([[0.0, -1.0], [1.0, 0.0]])
    with pytest.raises(ValueError):
        bihermitian_dual_at(i_mat, met, circle_chart, {"t": 0.3}, +1)
