"""Scenario suites: end-to-end reproductions of the worked dual pairs.

Each scenario loads its chart from the packaged config directory, builds the
dual pair, runs its check list with a seeded RNG, and returns a Report.
Registered scenarios: s3-hopf, s3-selfdual, s2-annulus, hopf-surface,
gibbons-hawking, buscher-random, reduction-suite.
"""
from __future__ import annotations

import importlib.resources as resources
import math

import numpy as np
from scipy.integrate import quad

from .scalar import (CScalar, PI, ZERO, ONE, diff, equal_numeric, evaluate,
                     rat, sadd, scos, sdiv, smul, sneg, sexp, ssin, ssqrt, var)
from .exterior import (Coframe, Form, FrameVector, exp_form, fiber_integrate,
                       mukai_pairing, wedge)
from .bundle import (BundleChart, build_dual_chart, chart_from_text,
                     exterior_derivative, form_residual, split_flux,
                     twisted_derivative)
from .courant import (bracket_spinor_residual, courant_bracket,
                      check_lift_splitting, pairing)
from .structures import (GeneralizedMetric, PureSpinor, SymTensor,
                         check_integrable, commute_at, gcs_matrix_at,
                         is_decomposable_at, metric_matrix_at, mukai_norm_at,
                         spinor_type_at)
from .duality import (DualityPair, assemble_metric, bihermitian_dual_at,
                      buscher_rules, compatibility_residual, dual_type_at,
                      dualize_form, dualize_form_reverse, dualize_section,
                      orientation_sign, reverse_sign, split_metric,
                      split_two_form, transport_metric, transport_spinor,
                      uk_transport_residual)
from .reduction import (LiftedActionPoint, double_quotient_report,
                        duality_lift_sections, fourier_mukai_check,
                        pairing_constant_check, reduce_pointwise,
                        split_pairing_matrix, transversality_check)
from .randomgen import (random_form, random_metric, random_pure_spinor,
                        random_section)
from .report import Report

__all__ = ["SCENARIOS", "run_scenario", "load_chart", "twisted_rank_two_pair"]


def load_chart(name):
    text = resources.files("tduality.configs").joinpath(name).read_text()
    return chart_from_text(text)


def _metric_residual(a, b, domain, points):
    """Max coefficientwise deviation of two metric/2-form packages."""
    worst = 0.0
    m = a.g.coframe.dim
    for p in points:
        memo = {}
        ga = a.g.eval_matrix(p, memo)
        gb = b.g.eval_matrix(p, memo)
        worst = max(worst, float(np.abs(ga - gb).max()))
    worst = max(worst, form_residual(a.b - b.b, domain, points))
    return worst


def _section_residual(s, domain, points):
    worst = 0.0
    for p in points:
        memo = {}
        for c in s.x.components:
            worst = max(worst, abs(c.evaluate(p, memo)))
        for c in s.xi.coeffs.values():
            worst = max(worst, abs(c.evaluate(p, memo)))
    return worst


def _standard_pair_checks(report, pair, rng, points, samples, tol):
    """Shared suite: validation, transform identities, bracket transport."""
    chart = pair.chart
    rep = pair.validate(n=len(points), tol=tol, seed=int(rng.integers(2**31)))
    report.add("pair-validation", "dF equals the flux difference; fiber block invertible",
               residual=rep.flux_difference_residual, tol=tol,
               passed=rep.ok, notes=f"unimodular={rep.unimodular}")
    worst = 0.0
    for _ in range(samples):
        rho = random_form(rng, chart.coframe, chart.base_vars, density=0.35)
        lhs = dualize_form(twisted_derivative(rho, chart), pair)
        rhs = twisted_derivative(dualize_form(rho, pair), pair.dual)
        worst = max(worst, form_residual(lhs - rhs, pair.dual.domain, points))
    report.add("transform-intertwines-differentials",
               "form transform commutes with the twisted differentials",
               residual=worst, tol=1e-8)
    worst_pair = 0.0
    worst_bracket = 0.0
    for _ in range(samples):
        v = random_section(rng, chart)
        w = random_section(rng, chart)
        pv, pw = dualize_section(v, pair), dualize_section(w, pair)
        gap = pairing(pv, pw) - pairing(v, w)
        for p in points:
            worst_pair = max(worst_pair, abs(gap.evaluate(p)))
        lhs = dualize_section(courant_bracket(v, w, chart), pair)
        rhs = courant_bracket(pv, pw, pair.dual)
        worst_bracket = max(worst_bracket, _section_residual(lhs - rhs,
                                                             pair.dual.domain, points))
    report.add("section-transform-orthogonal",
               "section transform preserves the natural pairing",
               residual=worst_pair, tol=1e-9)
    report.add("section-transform-bracket",
               "section transform preserves the twisted bracket",
               residual=worst_bracket, tol=1e-8)
    worst_compat = 0.0
    worst_oracle = 0.0
    for _ in range(samples):
        v = random_section(rng, chart)
        w = random_section(rng, chart)
        rho = random_form(rng, chart.coframe, chart.base_vars, density=0.3)
        worst_compat = max(worst_compat,
                           compatibility_residual(v, rho, pair, points))
        worst_oracle = max(worst_oracle,
                           bracket_spinor_residual(v, w, rho, chart, points))
    report.add("clifford-compatibility",
               "transform of v.rho equals transformed v acting on transformed rho",
               residual=worst_compat, tol=1e-8)
    report.add("spinor-bracket-oracle",
               "bracket equals the derived commutator on the spinor module",
               residual=worst_oracle, tol=1e-8)
    probe = random_form(rng, chart.coframe, chart.base_vars, density=0.4)
    sign = reverse_sign(pair)
    back = dualize_form_reverse(dualize_form(probe, pair), pair)
    diffr = back - probe.scale(CScalar.of(rat(round(sign.real))))
    report.add("transform-invertible",
               "reverse transform returns the input up to the recorded sign",
               residual=form_residual(diffr, chart.domain, points), tol=1e-9,
               notes=f"global sign {sign.real:+.0f}")
    return report


def _dual_of_dual_check(report, pair, points, tol):
    chart = pair.chart
    ddual, _ = build_dual_chart(pair.dual)
    # dualization suffixes fiber names with "t"; strip two rounds of it
    rename = {gen: gen[:-2] for gen in ddual.fiber_names}
    res = form_residual(ddual.flux.map_to(chart.coframe, rename) - chart.flux,
                        chart.domain, points)
    for gen in chart.fiber_names:
        back = ddual.curvature_of(gen + "tt").map_to(chart.coframe, rename)
        res = max(res, form_residual(back - chart.curvature_of(gen),
                                     chart.domain, points))
    report.add("dual-of-dual", "double dualization returns the original data",
               residual=res, tol=tol)


def scenario_s3_hopf(seed, samples, tol):
    report = Report("s3-hopf", seed, samples, tol)
    rng = np.random.default_rng(seed)
    chart = load_chart("s3_hopf.cfg")
    pair = DualityPair.from_chart(chart)
    points = chart.domain.sample_many(rng, 6)
    dual = pair.dual
    sigma_tht = Form.monomial(dual.coframe, ("dt", "du", "tht"))
    report.add("dual-is-product-with-flux",
               "trivial-flux circle bundle dualizes to the product with flux "
               "curvature ^ dual fiber",
               residual=0.0 if dual.flux == sigma_tht and not dual.curvature_of("tht").coeffs
               else 1.0,
               tol=tol, notes="structural equality")
    _standard_pair_checks(report, pair, rng, points, samples, tol)
    _dual_of_dual_check(report, pair, points, tol)
    # metric transport against the closed form
    t, u = var("t"), var("u")
    g0 = sadd(ONE, smul(t, t))
    g1 = Form.monomial(chart.coframe, ("du",), smul(rat(1, 2), t))
    g2 = SymTensor.from_names(chart.coframe, {
        ("dt", "dt"): sadd(ONE, smul(u, u)),
        ("du", "du"): sadd(rat(2), scos(smul(rat(2), PI, u)))})
    b1 = Form.monomial(chart.coframe, ("dt",), smul(rat(1, 3), u))
    b2 = Form.monomial(chart.coframe, ("dt", "du"), t)
    met = assemble_metric(chart, g0, g1, g2, b1, b2)
    tm = transport_metric(met, pair)
    closed = buscher_rules(g0, g1, g2, b1, b2, pair)
    report.add("metric-transport-closed-form",
               "eigenspace transport of (g, b) matches the closed-form rules",
               residual=_metric_residual(tm, closed, pair.dual.domain, points),
               tol=1e-9)
    # reduction picture
    worst = 0.0
    for p in points:
        red = double_quotient_report(pair, p)
        worst = max(worst, red.isotropy_residual_k, red.isotropy_residual_kt,
                    red.isometry_defect_m, red.isometry_defect_mt)
        if not (red.split_signature_ok and red.rank_ok):
            worst = max(worst, 1.0)
    report.add("double-quotient", "correspondence reduces isometrically onto both sides",
               residual=worst, tol=1e-9)
    ok, spread = pairing_constant_check(duality_lift_sections(pair), pair.total,
                                        points)
    report.add("lift-pairing-constant",
               "the lifted torus action induces a constant split pairing",
               residual=spread, tol=1e-9, passed=ok)
    # lift splitting predicate on the flux chart
    x = FrameVector.basis(chart.coframe, "th")
    ok = check_lift_splitting(x, Form.zero(chart.coframe), chart, points, tol=tol)
    report.add("fiber-lift-splitting", "fiber generators satisfy i_X H = d xi with xi = 0",
               residual=0.0 if ok else 1.0, tol=tol, passed=ok)
    return report


def scenario_s3_selfdual(seed, samples, tol):
    report = Report("s3-selfdual", seed, samples, tol)
    rng = np.random.default_rng(seed)
    chart = load_chart("s3_flux.cfg")
    pair = DualityPair.from_chart(chart)
    points = chart.domain.sample_many(rng, 6)
    sigma = Form.monomial(chart.coframe, ("dt", "du"))
    ct, h = split_flux(chart)
    report.add("flux-splitting", "H = curvature-part ^ fiber + basic part",
               residual=0.0 if ct["th"] == sigma and h.is_zero() else 1.0, tol=tol,
               notes="dual curvature equals the original curvature (self-dual shape); "
                     "sign fixed by the curvature-first splitting convention")
    dual = pair.dual
    same_shape = (dual.curvature_of("tht") == sigma.map_to(dual.coframe)
                  and dual.flux == Form.monomial(dual.coframe, ("dt", "du", "tht")))
    report.add("self-dual-shape", "dual chart carries the same curvature and flux pattern",
               residual=0.0 if same_shape else 1.0, tol=tol,
               notes="structural equality")
    _standard_pair_checks(report, pair, rng, points, samples, tol)
    _dual_of_dual_check(report, pair, points, tol)
    return report


def _s2_setup():
    chart = load_chart("s2.cfg")
    cof = chart.coframe
    t = var("t")
    w = sadd(rat(1, 2), smul(t, t))
    b = smul(rat(1, 4), t)
    omega = Form.monomial(cof, ("dt", "th"), w)
    bfield = Form.monomial(cof, ("dt", "th"), b)
    spinor = PureSpinor.from_data(bfield, omega, Form.scalar(cof, 1))
    return chart, t, w, b, spinor


def scenario_s2_annulus(seed, samples, tol):
    report = Report("s2-annulus", seed, samples, tol)
    rng = np.random.default_rng(seed)
    chart, t, w, b, spinor = _s2_setup()
    pair = DualityPair.from_chart(chart)
    points = chart.domain.sample_many(rng, 8)
    dual = pair.dual
    dual_spinor = dualize_form(spinor.form, pair)
    expected = (Form.monomial(dual.coframe, ("tht",))
                + Form.monomial(dual.coframe, ("dt",), CScalar(b, w)))
    report.add("dual-spinor-formula",
               "the symplectic exponential dualizes to the fiber form plus "
               "(b + i w) dt",
               residual=0.0 if dual_spinor == expected else 1.0, tol=tol,
               notes="structural equality")
    types = {spinor_type_at(PureSpinor(dual_spinor), dual, p) for p in points}
    report.add("dual-type-one", "the dual structure has type one at every sample",
               residual=0.0 if types == {1} else 1.0, tol=tol)
    tj = [dual_type_at(spinor, pair, p) for p in points]
    report.add("type-shift", "type changes by 2j - k with j from the fiber integral",
               residual=0.0 if all(x == (1, 1) for x in tj) else 1.0, tol=tol,
               notes="j = 1 everywhere: the lowest factor is basic")
    # annulus radii: closed-form antiderivative vs quadrature
    quad_val, _ = quad(lambda x: evaluate(w, {"t": x}), -1.0, 1.0, epsabs=1e-10)
    anti = sadd(smul(rat(1, 2), t), smul(rat(1, 3), t, t, t))
    closed = evaluate(anti, {"t": 1.0}) - evaluate(anti, {"t": -1.0})
    radius_quad = math.exp(-quad_val)
    radius_closed = math.exp(-closed)
    report.add("annulus-radius",
               "exterior radius equals exp(-total symplectic volume), by quadrature",
               residual=abs(radius_quad - radius_closed), tol=1e-6,
               notes=f"radius {radius_closed:.6f}, interior radius 1")
    # holomorphic coordinate: d z is proportional to the dual spinor pointwise
    antib = smul(rat(1, 8), t, t)
    w_shift = sadd(anti, rat(5, 6))  # W(t) - W(-1) with W = t/2 + t^3/3
    tht = var("tht_angle")
    z_re = smul(sexp(sneg(w_shift)), scos(sadd(tht, antib)))
    z_im = smul(sexp(sneg(w_shift)), ssin(sadd(tht, antib)))
    dual_chart = pair.dual
    dcof = dual_chart.coframe
    worst = 0.0
    for p in points:
        for angle in (0.3, 2.1):
            env = dict(p)
            env["tht_angle"] = angle
            memo = {}
            z = complex(evaluate(z_re, env, memo), evaluate(z_im, env, memo))
            # dz = z (i thetat - (w - i b) dt)
            dz_dt = z * (-(evaluate(w, env) - 1j * evaluate(b, env)))
            dz_tht = z * 1j
            rho_dt = dual_spinor.coeff_of("dt").evaluate(p)
            rho_tht = dual_spinor.coeff_of("tht").evaluate(p)
            worst = max(worst, abs(dz_dt * rho_tht - dz_tht * rho_dt))
    report.add("holomorphic-coordinate",
               "the dual spinor line agrees with the differential of the "
               "annulus coordinate",
               residual=worst, tol=1e-9)
    # round metric and its dual
    g0 = sadd(ONE, sneg(smul(t, t)))
    g2 = SymTensor.from_names(chart.coframe, {("dt", "dt"): sdiv(ONE, g0)})
    zero1 = Form.zero(chart.coframe)
    dual_met = buscher_rules(g0, zero1, g2, zero1, zero1, pair)
    inv = sdiv(ONE, g0)
    ok = (equal_numeric(dual_met.g.entry_of("tht", "tht"), inv, chart.domain,
                        seed=seed)
          and equal_numeric(dual_met.g.entry_of("dt", "dt"), inv, chart.domain,
                            seed=seed)
          and dual_met.g.entry_of("dt", "tht").is_zero()
          and dual_met.b.is_zero())
    report.add("round-metric-dual",
               "round fiber radius inverts: dual metric is (1/(1-t^2))(dthetat^2 + dt^2)",
               residual=0.0 if ok else 1.0, tol=tol)
    tm = transport_metric(assemble_metric(chart, g0, zero1, g2, zero1, zero1), pair)
    report.add("metric-transport-matches",
               "eigenspace transport reproduces the closed-form dual metric",
               residual=_metric_residual(tm, dual_met, dual_chart.domain, points),
               tol=1e-9)
    res = check_integrable(spinor, chart, points)
    report.add("integrability", "the symplectic exponential is twisted-closed",
               residual=res.residual, tol=1e-8)
    res_dual = check_integrable(PureSpinor(dual_spinor), dual_chart, points)
    report.add("integrability-transported",
               "the dual structure is integrable (transport preserves integrability)",
               residual=res_dual.residual, tol=1e-8)
    worst = max(uk_transport_residual(spinor, pair, p) for p in points[:4])
    report.add("eigenspace-ladder-transport",
               "the form transform maps each eigenspace level onto its dual level",
               residual=worst, tol=1e-8)
    return report


def _hopf_surface_family(chart, eps):
    """Invariant complex-type family: (ds1 + 2 pi i th1) ^ (ds2 + 2 pi i eps th2)."""
    cof = chart.coframe
    two_pi_i = CScalar(ZERO, smul(rat(2), PI))
    alpha = Form.monomial(cof, ("ds1",)) + Form.monomial(cof, ("th1",), two_pi_i)
    beta = Form.monomial(cof, ("ds2",)) + Form.monomial(cof, ("th2",),
                                                        two_pi_i * CScalar.of(eps))
    return PureSpinor.from_data(Form.zero(cof), Form.zero(cof), wedge(alpha, beta))


def scenario_hopf_surface(seed, samples, tol):
    report = Report("hopf-surface", seed, samples, tol)
    rng = np.random.default_rng(seed)
    chart = load_chart("hopf_surface.cfg")
    pair = DualityPair.from_chart(chart)
    points = chart.domain.sample_many(rng, 6)
    s2v = var("s2")
    spinor = _hopf_surface_family(chart, s2v)
    rep = pair.validate(n=len(points), tol=tol, seed=seed)
    report.add("pair-validation", "dF equals the flux difference; fiber block invertible",
               residual=rep.flux_difference_residual, tol=tol, passed=rep.ok)
    worst = 0.0
    for p in points:
        if mukai_norm_at(spinor, p) < 1e-6:
            worst = 1.0
        if not is_decomposable_at(spinor.lowest, p):
            worst = 1.0
    report.add("family-validity",
               "the invariant family is nondegenerate and decomposable on the chart",
               residual=worst, tol=tol,
               notes="family a1 != a2; phases are real tori away from the "
                     "excluded loci at s2 = 0")
    res = check_integrable(spinor, chart, points)
    report.add("integrability", "the family is closed up to a fiber covector witness",
               residual=res.residual, tol=1e-8)
    dual_spinor = transport_spinor(spinor, pair)
    res_d = check_integrable(dual_spinor, pair.dual, points)
    report.add("integrability-transported",
               "the transported family stays integrable",
               residual=res_d.residual, tol=1e-8)
    types = []
    js = []
    for p in points:
        tt, j = dual_type_at(spinor, pair, p)
        types.append(tt)
        js.append(j)
        if spinor_type_at(dual_spinor, pair.dual, p) != tt:
            types.append(-99)
    report.add("generic-dual-type",
               "dual type is zero (symplectic) at every interior sample, and "
               "matches the transported spinor's type",
               residual=0.0 if set(types) == {0} else 1.0, tol=tol,
               notes=f"j per sample: {sorted(set(js))}")
    # continuation toward the excluded locus: the surviving integral decays
    # linearly and the limit member jumps to j = 1 (complex dual type 2)
    decay = []
    for s2val in (0.4, 0.2, 0.1):
        member = _hopf_surface_family(chart, rat(int(s2val * 100), 100))
        corr = pair.corr
        integrand = corr.pull_m(member.form)
        integral = fiber_integrate(integrand, ("fiber",))
        p = dict(points[0])
        vals = integral.eval_coeffs(p)
        decay.append(max(abs(v) for v in vals.values()) / (4 * math.pi ** 2))
    linear = all(abs(decay[i] / decay[i + 1] - 2.0) < 1e-9 for i in range(2))
    limit = _hopf_surface_family(chart, ZERO)
    tt_limit, j_limit = dual_type_at(limit, pair, points[0])
    degenerate = mukai_norm_at(limit, points[0]) < 1e-12
    report.add("type-jump-at-locus",
               "continuing the family to the excluded fibers flips the fiber "
               "integral order and the dual type jumps 0 -> 2",
               residual=0.0 if (linear and (tt_limit, j_limit) == (2, 1) and degenerate)
               else 1.0,
               tol=tol,
               notes=f"surviving integral decays linearly ({decay[0]:.3g}, "
                     f"{decay[1]:.3g}, {decay[2]:.3g}); limit member is "
                     f"degenerate with j = {j_limit}")
    worst = max(uk_transport_residual(spinor, pair, p) for p in points[:3])
    report.add("eigenspace-ladder-transport",
               "the form transform maps each eigenspace level onto its dual level",
               residual=worst, tol=1e-8)
    return report


def _gh_data(chart):
    cof = chart.coframe
    x1, x2, x3 = var("x1"), var("x2"), var("x3")
    r = ssqrt(sadd(smul(x1, x1), smul(x2, x2), smul(x3, x3)))
    v_pot = sadd(ONE, sdiv(rat(1, 2), r))
    axis = sadd(smul(x1, x1), smul(x2, x2))
    b1 = (Form.monomial(cof, ("dx2",), sdiv(smul(x3, x1), smul(rat(2), r, axis)))
          + Form.monomial(cof, ("dx1",), sneg(sdiv(smul(x3, x2), smul(rat(2), r, axis)))))
    return v_pot, b1


def scenario_gibbons_hawking(seed, samples, tol):
    report = Report("gibbons-hawking", seed, samples, tol)
    rng = np.random.default_rng(seed)
    chart = load_chart("gibbons_hawking.cfg")
    pair = DualityPair.from_chart(chart)
    cof = chart.coframe
    points = chart.domain.sample_many(rng, 6)
    v_pot, b1 = _gh_data(chart)
    lap = sadd(*[diff(diff(v_pot, n), n) for n in ("x1", "x2", "x3")])
    report.add("harmonic-potential", "the conformal factor is harmonic on the box",
               residual=max(abs(evaluate(lap, p)) for p in points), tol=1e-8)
    star_dv = (Form.monomial(cof, ("dx2", "dx3"), diff(v_pot, "x1"))
               + Form.monomial(cof, ("dx3", "dx1"), diff(v_pot, "x2"))
               + Form.monomial(cof, ("dx1", "dx2"), diff(v_pot, "x3")))
    db1 = exterior_derivative(b1, chart)
    report.add("monopole-potential", "d b1 equals the spatial star of d V",
               residual=form_residual(db1 - star_dv, chart.domain, points), tol=1e-8)
    # dual metric: conformally flat with flux potential dualizes to the
    # hyper-Kahler ansatz metric, sheared by b1
    zero1 = Form.zero(cof)
    g2 = SymTensor(cof, {(i, i): v_pot for i, n in enumerate(cof.names)
                         if cof.tags[i] == "base"})
    dual_met = buscher_rules(v_pot, zero1, g2, b1, zero1, pair)
    dcof = pair.dual.coframe
    inv_v = sdiv(ONE, v_pot)
    expected_entries = {}
    i_t = dcof.index("tht")
    for i, n in enumerate(dcof.names):
        if n == "tht":
            expected_entries[(i, i)] = inv_v
        else:
            expected_entries[(i, i)] = v_pot
    b1_dual = b1.map_to(dcof)
    for i in range(dcof.dim):
        c = b1_dual.coeff(1 << i)
        if not c.is_zero():
            key = (min(i, i_t), max(i, i_t))
            expected_entries[key] = sneg(sdiv(c.re, v_pot))
        for j in range(i, dcof.dim):
            ci, cj = b1_dual.coeff(1 << i).re, b1_dual.coeff(1 << j).re
            prod = sdiv(smul(ci, cj), v_pot)
            if not prod.is_zero():
                expected_entries[(i, j)] = sadd(expected_entries.get((i, j), ZERO), prod)
    expected = GeneralizedMetric(SymTensor(dcof, expected_entries), Form.zero(dcof))
    report.add("ansatz-metric",
               "dual metric is V (flat) + (1/V)(fiber form - b1)^2 with closed b1",
               residual=_metric_residual(dual_met, expected, pair.dual.domain, points),
               tol=1e-8, notes="dual 2-form vanishes (b2 = 0)")
    # the generalized Kahler pair behind the ansatz
    b_total = wedge(b1, Form.monomial(cof, ("th",)))
    rho1 = wedge(exp_form(b_total + Form.monomial(cof, ("dx1", "dx2"),
                                                  CScalar(ZERO, v_pot))),
                 Form.monomial(cof, ("th",)) + Form.monomial(cof, ("dx3",), CScalar.i()))
    rho2 = wedge(exp_form(b_total + Form.monomial(cof, ("dx3", "th"),
                                                  CScalar(ZERO, v_pot))),
                 Form.monomial(cof, ("dx2",)) + Form.monomial(cof, ("dx1",), CScalar.i()))
    res1 = form_residual(exterior_derivative(rho1, chart), chart.domain, points)
    res2 = form_residual(exterior_derivative(rho2, chart), chart.domain, points)
    report.add("closed-spinor-pair", "both canonical forms are closed",
               residual=max(res1, res2), tol=1e-8)
    m1 = mukai_pairing(rho1, rho1.conj())
    m2 = mukai_pairing(rho2, rho2.conj())
    report.add("volume-normalization",
               "the two canonical forms share the same pairing volume",
               residual=form_residual(m1 - m2, chart.domain, points), tol=1e-8)
    sp1, sp2 = PureSpinor(rho1), PureSpinor(rho2)
    met = GeneralizedMetric(SymTensor(cof, {(i, i): v_pot for i in range(cof.dim)}),
                            b_total)
    worst = 0.0
    for p in points[:3]:
        worst = max(worst, commute_at(sp1, sp2, chart, p))
        j1 = gcs_matrix_at(sp1, chart, p)
        j2 = gcs_matrix_at(sp2, chart, p)
        g_endo = -j1 @ j2
        worst = max(worst, float(np.abs(g_endo - metric_matrix_at(met, chart, p)).max()))
    report.add("kahler-pair",
               "the two structures commute and their product recovers the metric",
               residual=worst, tol=1e-7,
               notes="types (1, 1): the odd four-dimensional case")
    # bi-Hermitian transport at a point (metric connection: no mixed term)
    p = points[0]
    iplus = np.zeros((4, 4))
    ix = {n: i for i, n in enumerate(cof.names)}
    iplus[ix["dx3"], ix["th"]] = 1.0
    iplus[ix["th"], ix["dx3"]] = -1.0
    iplus[ix["dx1"], ix["dx2"]] = 1.0
    iplus[ix["dx2"], ix["dx1"]] = -1.0
    it_plus = bihermitian_dual_at(iplus, met, chart, p, +1)
    it_minus = bihermitian_dual_at(iplus, met, chart, p, -1)
    ok = (np.abs(it_plus @ it_plus + np.eye(4)).max() <= 1e-9
          and np.abs(it_minus @ it_minus + np.eye(4)).max() <= 1e-9
          and orientation_sign(it_plus) == orientation_sign(iplus)
          and orientation_sign(it_minus) == -orientation_sign(iplus))
    report.add("tangent-structure-transport",
               "dual tangent structures square to minus one; one side keeps "
               "the orientation, the other flips it",
               residual=0.0 if ok else 1.0, tol=tol)
    return report


def scenario_buscher_random(seed, samples, tol):
    report = Report("buscher-random", seed, samples, tol)
    rng = np.random.default_rng(seed)
    charts = [
        BundleChart.build("b1d", [("t", -0.9, 0.9)], ["th"]),
        BundleChart.build("b2d", [("t", -0.9, 0.9), ("u", 0.1, 0.9)], ["th"]),
    ]
    worst_match = 0.0
    worst_invol = 0.0
    structural = True
    count = max(16, samples)
    for trial in range(count):
        chart = charts[trial % 2]
        pair = DualityPair.from_chart(chart)
        points = chart.domain.sample_many(rng, 5)
        met = random_metric(rng, chart, points)
        g0, g1, g2 = split_metric(met.g, chart)
        b1, b2 = split_two_form(met.b, chart)
        closed = buscher_rules(g0, g1, g2, b1, b2, pair)
        tm = transport_metric(met, pair)
        worst_match = max(worst_match,
                          _metric_residual(tm, closed, pair.dual.domain, points))
        structural = structural and closed.g.entry_of("tht", "tht") == sdiv(ONE, g0)
        back_pair = pair.swap()
        g0t, g1t, g2t = split_metric(closed.g, pair.dual)
        b1t, b2t = split_two_form(closed.b, pair.dual)
        back = buscher_rules(g0t, g1t, g2t, b1t, b2t, back_pair)
        worst_invol = max(worst_invol,
                          _metric_residual(back, met, chart.domain, points))
    report.add("transport-matches-closed-form",
               "eigenspace transport equals the closed-form rules on random data",
               residual=worst_match, tol=1e-9, notes=f"{count} instances")
    report.add("fiber-coefficient-inversion",
               "the fiber metric coefficient inverts exactly",
               residual=0.0 if structural else 1.0, tol=tol,
               notes="structural: dual entry is the literal quotient 1/g0")
    report.add("involution", "applying the rules twice returns the original data",
               residual=worst_invol, tol=1e-9)
    return report


def twisted_rank_two_pair():
    """Rank-two pair with a mixed correspondence form (fiber-fiber term)."""
    chart = load_chart("t2_twisted.cfg")
    cof = chart.coframe
    c1 = chart.curvature_of("th1")
    c2 = chart.curvature_of("th2")
    dual_cof = Coframe(("du", "dv", "th1t", "th2t"), ("base", "base", "fiber", "fiber"))
    dual_curv = {"th1t": c1.map_to(dual_cof), "th2t": (-c2).map_to(dual_cof)}
    flux_t = (wedge(c1.map_to(dual_cof), Form.monomial(dual_cof, ("th2t",)))
              + wedge(c2.map_to(dual_cof), Form.monomial(dual_cof, ("th1t",))))
    dual = BundleChart("t2-twisted~", chart.base_vars, chart.domain, dual_cof,
                       dual_curv, flux_t)

    def flux_maker(cof_total, c, d):
        return -(Form.monomial(cof_total, ("th1", "th2t"))
                 + Form.monomial(cof_total, ("th2", "th1t"))
                 + Form.monomial(cof_total, ("th1", "th2")))

    return DualityPair.from_charts(chart, dual, flux_maker)


def scenario_reduction_suite(seed, samples, tol):
    report = Report("reduction-suite", seed, samples, tol)
    rng = np.random.default_rng(seed)
    hopf = DualityPair.from_chart(load_chart("s3_hopf.cfg"))
    s2 = DualityPair.from_chart(load_chart("s2.cfg"))
    mixed = twisted_rank_two_pair()
    rep = mixed.validate(n=5, tol=tol, seed=seed)
    report.add("mixed-pair-validation",
               "the twisted rank-two pair satisfies the duality identity with a "
               "mixed correspondence form",
               residual=rep.flux_difference_residual, tol=tol, passed=rep.ok,
               notes=f"fiber block [[0,-1],[-1,0]], unimodular={rep.unimodular}")
    worst = 0.0
    npts = max(4, samples // 4)
    for pair in (hopf, s2, mixed):
        points = pair.chart.domain.sample_many(rng, npts)
        for p in points:
            red = double_quotient_report(pair, p)
            worst = max(worst, red.isotropy_residual_k, red.isotropy_residual_kt,
                        red.isometry_defect_m, red.isometry_defect_mt)
            if not (red.split_signature_ok and red.rank_ok):
                worst = max(worst, 1.0)
    report.add("double-quotient",
               "correspondences reduce isometrically onto both sides at samples",
               residual=worst, tol=1e-9, notes="three pairs, incl. the mixed form")
    # scaled correspondence form: pointwise reduction still works
    def scaled_flux(cof_total, c, d):
        from .bundle import standard_correspondence_flux
        return standard_correspondence_flux(cof_total, c, d).scale(rat(2))
    scaled = DualityPair.from_charts(hopf.chart, hopf.dual, scaled_flux)
    p = scaled.chart.domain.sample_many(rng, 1)[0]
    red = double_quotient_report(scaled, p)
    ok = (red.split_signature_ok and red.rank_ok
          and max(red.isometry_defect_m, red.isometry_defect_mt) <= 1e-9)
    vrep = scaled.validate(n=4, tol=tol, seed=seed)
    report.add("scaled-form-reduces",
               "a non-unimodular correspondence form still reduces pointwise",
               residual=0.0 if ok else 1.0, tol=tol,
               passed=ok and vrep.unimodular is False,
               notes="unimodularity fails, nondegeneracy and isometry survive")
    # exactness iff isotropy on randomized pointwise actions
    agree = True
    for trial in range(32):
        n = int(rng.integers(2, 5))
        g = split_pairing_matrix(n)
        if trial % 2 == 0:
            vecs = np.zeros((2 * n, 2))
            vecs[:n, 0] = rng.standard_normal(n)
            vecs[:n, 1] = rng.standard_normal(n)
            bmat = rng.standard_normal((n, n))
            bmat = bmat - bmat.T
            shear = np.block([[np.eye(n), np.zeros((n, n))], [bmat, np.eye(n)]])
            vecs = shear @ vecs
        else:
            vecs = rng.standard_normal((2 * n, 2))
        red = reduce_pointwise(LiftedActionPoint(g, vecs))
        iso = bool(np.abs(vecs.T @ g @ vecs).max() <= 1e-9)
        agree = agree and (red.exact == iso)
        # the quotient pairing must kill the radical
        if red.radical.shape[1]:
            agree = agree and np.abs(red.radical.conj().T @ g @ red.perp).max() <= 1e-9
    report.add("exact-iff-isotropic",
               "pointwise reduction is exact precisely for isotropic actions",
               residual=0.0 if agree else 1.0, tol=tol, notes="32 randomized actions")
    # transversality of the correspondence tangent space
    pts2 = s2.chart.domain.sample_many(rng, 2)
    t_ok = True
    for p in pts2:
        a, b = transversality_check(s2, p)
        t_ok = t_ok and a and b
        a0, b0 = transversality_check(s2, p, f_scale=0.0)
        t_ok = t_ok and (not a0) and (not b0)
        scale = float(rng.uniform(0.5, 3.0))
        a1, b1_ = transversality_check(s2, p, f_scale=scale)
        t_ok = t_ok and a1 and b1_
    report.add("graph-transversality",
               "the correspondence tangent space meets either factor trivially "
               "iff the fiber block is invertible",
               residual=0.0 if t_ok else 1.0, tol=tol)
    # the two duality criteria agree, positive and negative instances
    agree = True
    positives = negatives = 0
    pairs_for_fm = (s2, DualityPair.from_chart(load_chart("hopf_surface.cfg")))
    for trial in range(32):
        pair = pairs_for_fm[trial % 2]
        points = pair.chart.domain.sample_many(rng, 1)
        p = points[0]
        sp = random_pure_spinor(rng, pair.chart, points)
        if trial % 2 == 0:
            other = transport_spinor(sp, pair)
            r1, r2, d1, d2 = fourier_mukai_check(sp, other, pair, p)
            agree = agree and r1 and r2
            positives += 1
        else:
            other = random_pure_spinor(rng, pair.dual, points)
            r1, r2, d1, d2 = fourier_mukai_check(sp, other, pair, p, tol=1e-8)
            if max(d1, d2) < 1e-4:
                continue  # accidental near-duality; skip rather than misjudge
            agree = agree and (not r1) and (not r2)
            negatives += 1
    report.add("product-criterion-equivalence",
               "invariance of the correspondence tangent space under the product "
               "structure agrees with conjugation by the section transform",
               residual=0.0 if agree else 1.0, tol=tol,
               notes=f"{positives} positive, {negatives} negative instances")
    return report


SCENARIOS = {
    "s3-hopf": scenario_s3_hopf,
    "s3-selfdual": scenario_s3_selfdual,
    "s2-annulus": scenario_s2_annulus,
    "hopf-surface": scenario_hopf_surface,
    "gibbons-hawking": scenario_gibbons_hawking,
    "buscher-random": scenario_buscher_random,
    "reduction-suite": scenario_reduction_suite,
}


def run_scenario(name, seed=0, samples=8, tol=1e-9):
    if name not in SCENARIOS:
        raise KeyError(f"unknown scenario {name!r}; known: {', '.join(sorted(SCENARIOS))}")
    return SCENARIOS[name](seed, samples, tol)
