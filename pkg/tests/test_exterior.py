import pytest

from tduality.scalar import CScalar, rat, ssin, var
from tduality.exterior import (Coframe, Form, FrameVector, clifford_act,
                               contract, exp_form, fiber_integrate,
                               form_from_text, form_to_text, mukai_pairing,
                               reversal, wedge)
from tduality.courant import Section, pairing
from tduality.randomgen import random_form


def vec(cof, name):
    return FrameVector.basis(cof, name)


def mono(cof, *names):
    return Form.monomial(cof, names)


def residual(form, points):
    worst = 0.0
    for p in points:
        memo = {}
        for c in form.coeffs.values():
            worst = max(worst, abs(c.evaluate(p, memo)))
    return worst


@pytest.fixture
def cof4():
    return Coframe(("dx", "dy", "dz", "dw"),
                   ("base", "base", "base", "base"))


def test_wedge_square_vanishes(cof4):
    dx = mono(cof4, "dx")
    assert wedge(dx, dx).is_zero()


def test_wedge_anticommutes(cof4):
    dx, dy = mono(cof4, "dx"), mono(cof4, "dy")
    assert wedge(dx, dy) == -wedge(dy, dx)


def test_exp_of_commuting_two_forms(cof4):
    b1 = mono(cof4, "dx", "dy").scale(rat(2))
    b2 = mono(cof4, "dz", "dw").scale(rat(-3))
    lhs = wedge(exp_form(b1), exp_form(b2))
    assert lhs == exp_form(b1 + b2)


def test_wedge_associative_random(rng, cof4):
    from tduality.scalar import Domain
    pts = Domain({"q": (-0.8, 0.8)}).sample_many(rng, 3)
    for _ in range(10):
        a = random_form(rng, cof4, ("q",), density=0.4)
        b = random_form(rng, cof4, ("q",), density=0.4)
        c = random_form(rng, cof4, ("q",), density=0.4)
        assert residual(wedge(wedge(a, b), c) - wedge(a, wedge(b, c)), pts) <= 1e-10


def test_graded_commutativity_random(rng, cof4):
    from tduality.scalar import Domain
    pts = Domain({"q": (-0.8, 0.8)}).sample_many(rng, 3)
    for _ in range(8):
        da = int(rng.integers(0, 4))
        db = int(rng.integers(0, 4))
        a = random_form(rng, cof4, ("q",), degrees=(da,), density=1.0)
        b = random_form(rng, cof4, ("q",), degrees=(db,), density=1.0)
        sign = rat(-1) if (da * db) % 2 else rat(1)
        assert residual(wedge(a, b) - wedge(b, a).scale(sign), pts) <= 1e-10


def test_contract_basis(cof4):
    assert contract(vec(cof4, "dx"), mono(cof4, "dx")) == Form.scalar(cof4, 1)
    assert contract(vec(cof4, "dx"), mono(cof4, "dx", "dy")) == mono(cof4, "dy")
    assert contract(vec(cof4, "dy"), mono(cof4, "dx", "dy")) == -mono(cof4, "dx")


def test_contract_squares_to_zero(rng, cof4):
    from tduality.scalar import Domain
    pts = Domain({"q": (-0.8, 0.8)}).sample_many(rng, 3)
    x = FrameVector(cof4, tuple(CScalar.of(rat(int(k))) for k in rng.integers(-3, 4, 4)))
    rho = random_form(rng, cof4, ("q",))
    assert residual(contract(x, contract(x, rho)), pts) <= 1e-12


def test_contract_antiderivation(rng, cof4):
    from tduality.scalar import Domain
    pts = Domain({"q": (-0.8, 0.8)}).sample_many(rng, 3)
    for _ in range(6):
        d = int(rng.integers(0, 4))
        a = random_form(rng, cof4, ("q",), degrees=(d,), density=1.0)
        b = random_form(rng, cof4, ("q",), density=0.5)
        x = FrameVector(cof4, tuple(CScalar.of(rat(int(k)))
                                    for k in rng.integers(-2, 3, 4)))
        lhs = contract(x, wedge(a, b))
        sign = rat(-1) if d % 2 else rat(1)
        rhs = wedge(contract(x, a), b) + wedge(a, contract(x, b)).scale(sign)
        assert residual(lhs - rhs, pts) <= 1e-10


def test_clifford_on_scalar(cof4):
    out = clifford_act(vec(cof4, "dx"), mono(cof4, "dx"), Form.scalar(cof4, 1))
    assert out == mono(cof4, "dx")


def test_clifford_square_is_pairing(cof4):
    v = Section(vec(cof4, "dx"), mono(cof4, "dx"))
    rho = mono(cof4, "dy")
    twice = v.act(v.act(rho))
    assert twice == rho  # <v, v> = 1 here
    assert pairing(v, v) == CScalar.of(rat(1))


def test_clifford_vector_contraction(cof4):
    out = clifford_act(vec(cof4, "dx"), Form.zero(cof4), mono(cof4, "dx", "dy"))
    assert out == mono(cof4, "dy")


def test_clifford_identity_random(rng):
    cof = Coframe(("dt", "du", "th"), ("base", "base", "fiber"))
    dom_vars = ("t", "u")
    worst = 0.0
    from tduality.scalar import Domain
    dom = Domain({"t": (-0.9, 0.9), "u": (0.1, 0.9)})
    pts = dom.sample_many(rng, 3)
    for _ in range(64):
        x = FrameVector(cof, tuple(CScalar.of(rat(int(k)))
                                   for k in rng.integers(-2, 3, 3)))
        xi = random_form(rng, cof, dom_vars, degrees=(1,), density=0.8)
        rho = random_form(rng, cof, dom_vars, density=0.4)
        v = Section(x, xi)
        lhs = v.act(v.act(rho))
        rhs = rho.scale(pairing(v, v))
        diff = lhs - rhs
        for p in pts:
            memo = {}
            for c in diff.coeffs.values():
                worst = max(worst, abs(c.evaluate(p, memo)))
    assert worst <= 1e-9


def test_reversal_signs(cof4):
    assert reversal(mono(cof4, "dx")) == mono(cof4, "dx")
    assert reversal(mono(cof4, "dx", "dy")) == -mono(cof4, "dx", "dy")
    assert reversal(mono(cof4, "dx", "dy", "dz")) == -mono(cof4, "dx", "dy", "dz")
    assert reversal(mono(cof4, "dx", "dy", "dz", "dw")) == mono(cof4, "dx", "dy", "dz", "dw")


def test_mukai_basic_values():
    cof = Coframe(("dx", "dy"), ("base", "base"))
    assert mukai_pairing(Form.scalar(cof, 1), mono(cof, "dx", "dy")) == mono(cof, "dx", "dy")
    assert mukai_pairing(mono(cof, "dx"), mono(cof, "dy")) == mono(cof, "dx", "dy")


def test_mukai_b_invariance_random(rng, cof4):
    from tduality.scalar import Domain
    dom = Domain({"q": (-0.8, 0.8)})
    pts = dom.sample_many(rng, 3)
    worst = 0.0
    for _ in range(64):
        b = random_form(rng, cof4, ("q",), degrees=(2,), complex_coeffs=False,
                        density=0.7)
        r1 = random_form(rng, cof4, ("q",), density=0.4)
        r2 = random_form(rng, cof4, ("q",), density=0.4)
        eb = exp_form(b)
        lhs = mukai_pairing(wedge(eb, r1), wedge(eb, r2))
        rhs = mukai_pairing(r1, r2)
        diff = lhs - rhs
        for p in pts:
            memo = {}
            for c in diff.coeffs.values():
                worst = max(worst, abs(c.evaluate(p, memo)))
    assert worst <= 1e-9


def test_mukai_clifford_compatibility(rng, cof4):
    from tduality.scalar import Domain
    dom = Domain({"q": (-0.8, 0.8)})
    pts = dom.sample_many(rng, 2)
    for _ in range(16):
        x = FrameVector(cof4, tuple(CScalar.of(rat(int(k)))
                                    for k in rng.integers(-2, 3, 4)))
        xi = random_form(rng, cof4, ("q",), degrees=(1,), density=0.8)
        v = Section(x, xi)
        r1 = random_form(rng, cof4, ("q",), density=0.4)
        r2 = random_form(rng, cof4, ("q",), density=0.4)
        lhs = mukai_pairing(v.act(r1), v.act(r2))
        rhs = mukai_pairing(r1, r2).scale(pairing(v, v))
        diff = lhs - rhs
        for p in pts:
            memo = {}
            for c in diff.coeffs.values():
                assert abs(c.evaluate(p, memo)) <= 1e-9


def test_exp_form_zero(cof4):
    assert exp_form(Form.zero(cof4)) == Form.scalar(cof4, 1)


def test_exp_form_nilpotent():
    cof = Coframe(("th", "tht"), ("fiber", "cofiber"))
    b = mono(cof, "th", "tht")
    assert exp_form(b) == Form.scalar(cof, 1) + b


def test_exp_form_degree_bound(rng, cof4):
    b = random_form(rng, cof4, ("q",), degrees=(2,), density=1.0)
    assert exp_form(b).max_degree() <= cof4.dim


def test_exp_form_rejects_odd(cof4):
    with pytest.raises(ValueError):
        exp_form(mono(cof4, "dx"))


def test_fiber_integrate_conventions():
    cof = Coframe(("dt", "th"), ("base", "fiber"))
    th, dt = mono(cof, "th"), mono(cof, "dt")
    assert fiber_integrate(th) == Form.scalar(cof, 1)
    assert fiber_integrate(Form.scalar(cof, 1)).is_zero()
    h = dt.scale(ssin(var("t")))
    assert fiber_integrate(wedge(h, th)) == h


def test_fiber_integrate_sign_two_fibers():
    cof = Coframe(("dt", "th1", "th2"), ("base", "fiber", "fiber"))
    vol = mono(cof, "th1", "th2")
    assert fiber_integrate(vol) == Form.scalar(cof, 1)
    # dt between the fiber legs picks up the reordering sign
    assert fiber_integrate(mono(cof, "th1", "dt", "th2")) == -mono(cof, "dt")


def test_form_text_roundtrip(rng, cof4):
    from tduality.scalar import Domain
    dom = Domain({"q": (-0.8, 0.8)})
    pts = dom.sample_many(rng, 3)
    for _ in range(5):
        f = random_form(rng, cof4, ("q",), density=0.4)
        back = form_from_text(cof4, form_to_text(f))
        diff = f - back
        for p in pts:
            memo = {}
            for c in diff.coeffs.values():
                assert abs(c.evaluate(p, memo)) <= 1e-12


def test_form_map_to_renames_and_signs():
    cof = Coframe(("dt", "th"), ("base", "fiber"))
    big = Coframe(("dt", "th", "tht"), ("base", "fiber", "cofiber"))
    f = mono(cof, "th", "dt")  # stored as -dt^th
    lifted = f.map_to(big)
    assert lifted == Form.monomial(big, ("th", "dt"))
