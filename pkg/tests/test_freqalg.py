import math

import numpy as np
import pytest

from crystalsum.freqalg import (
    BasisMismatchError,
    EvalRangeError,
    ExpSum,
    FreqBasis,
    constant,
    cosine,
    es_derivative,
    es_eval,
    es_mul,
    es_star,
    monomial,
    sine,
)

HALF = FreqBasis((0.5,))        # frequencies in (1/2)Z
UNIT = FreqBasis((1.0,))        # frequencies in Z


def test_basis_validation():
    with pytest.raises(ValueError):
        FreqBasis(())
    with pytest.raises(ValueError):
        FreqBasis((1.0, 1.0))
    with pytest.raises(ValueError):
        FreqBasis((-1.0,))
    with pytest.raises(ValueError):
        FreqBasis((1.0,), denominator=0)


def test_eval_constant_at_i():
    f = constant(UNIT, 1.0)
    assert es_eval(f, 1j) == 1.0


def test_eval_exponential_at_i():
    f = monomial(UNIT, (1,))
    assert es_eval(f, 1j) == pytest.approx(math.exp(-2 * math.pi), rel=1e-14)


def test_eval_sine_at_half():
    s = sine(HALF, (1,))  # sin(pi x)
    assert es_eval(s, 0.5) == pytest.approx(1.0, abs=1e-15)


def test_eval_vectorized_matches_scalar():
    f = sine(HALF, (1,)) + 0.25 * cosine(HALF, (2,))
    xs = np.linspace(-3, 3, 17) + 0.3j
    vec = f.eval(xs)
    for x, v in zip(xs, vec):
        assert f.eval(complex(x)) == pytest.approx(v, rel=1e-15)


def test_eval_overflow_is_an_error():
    f = monomial(UNIT, (1,))
    with pytest.raises(EvalRangeError):
        f.eval(-200j)  # e^{2 pi * 200} overflows


def test_mul_adds_frequencies():
    a = monomial(UNIT, (1,))
    b = monomial(UNIT, (2,))
    assert (a * b).terms == {(3,): 1 + 0j}


def test_mul_one_minus_q_times_one_plus_q():
    one = constant(UNIT, 1.0)
    q = monomial(UNIT, (1,))
    prod = (one + q) * (one - q)
    assert prod.terms == {(0,): 1 + 0j, (2,): -1 + 0j}


def test_mul_product_to_sum_identity():
    # sin(pi z) * 2cos(pi z) = sin(2 pi z), checked on exact term maps
    lhs = sine(HALF, (1,)) * (2.0 * cosine(HALF, (1,)))
    rhs = sine(HALF, (2,))
    assert lhs.terms == rhs.terms


def test_mul_basis_mismatch():
    with pytest.raises(BasisMismatchError):
        es_mul(monomial(UNIT, (1,)), monomial(HALF, (1,)))


def test_star_monomial_and_sine():
    q = monomial(UNIT, (1,))
    assert es_star(q).terms == {(-1,): 1 + 0j}
    s = sine(HALF, (1,))
    assert es_star(s).terms == s.terms  # real on R -> fixed point
    t = monomial(UNIT, (1,), 1j)
    assert es_star(t).terms == {(-1,): -1j}


def test_star_is_involution_exactly():
    rng = np.random.default_rng(7)
    basis = FreqBasis((1.0, math.sqrt(2)))
    terms = {(int(a), int(b)): complex(x, y)
             for a, b, x, y in rng.normal(size=(12, 4)) * 3}
    f = ExpSum(basis, terms)
    assert es_star(es_star(f)).terms == f.terms


def test_star_eval_reflection():
    rng = np.random.default_rng(11)
    basis = FreqBasis((1.0, math.sqrt(2)))
    f = ExpSum(basis, {(1, 0): 1 + 2j, (0, 1): -0.5j, (-2, 1): 0.25})
    zs = rng.normal(size=100) + 1j * rng.uniform(0.1, 2.0, size=100)
    for z in zs:
        lhs = f.star().eval(z)
        rhs = np.conj(f.eval(np.conj(z)))
        assert abs(lhs - rhs) <= 1e-13 * max(1.0, abs(rhs))


def test_mul_eval_consistency():
    rng = np.random.default_rng(3)
    basis = FreqBasis((1.0, math.sqrt(3)))
    f = ExpSum(basis, {(1, 0): 1.5, (0, 1): 2j, (-1, 1): 0.3 - 0.1j})
    g = ExpSum(basis, {(2, 0): -1.0, (0, -1): 0.7j})
    zs = rng.normal(size=50) + 1j * rng.uniform(-2.0, 2.0, size=50)
    for z in zs:
        lhs = (f * g).eval(z)
        rhs = f.eval(z) * g.eval(z)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(rhs))


def test_derivative_rules():
    assert not es_derivative(constant(UNIT, 5.0))          # constants die
    d = es_derivative(monomial(UNIT, (1,)))
    assert d.terms == {(1,): 2j * math.pi}
    # d/dz sin(pi z) = pi cos(pi z), via exact Euler-form term maps
    lhs = es_derivative(sine(HALF, (1,)))
    rhs = math.pi * cosine(HALF, (1,))
    for v, c in rhs.terms.items():
        assert lhs.terms[v] == pytest.approx(c, rel=1e-15)


def test_merging_is_exact_not_floating():
    # two irrational frequencies that collide numerically would still be
    # distinct vectors; identical vectors merge exactly
    basis = FreqBasis((1.0, 2.0**0.5))
    a = monomial(basis, (1, 1), 1.0)
    b = monomial(basis, (1, 1), -1.0)
    assert not (a + b)
    c = monomial(basis, (1, 1), 1e-30)
    assert len(a + c) == 1  # merged by vector equality despite scale gap


def test_json_round_trip():
    basis = FreqBasis((1.0, math.sqrt(2)), denominator=2)
    f = ExpSum(basis, {(1, 0): 1 + 2j, (0, -3): -0.5j})
    g = ExpSum.loads(f.dumps())
    assert g == f


def test_truncate():
    f = sum((monomial(UNIT, (k,)) for k in range(5)), constant(UNIT, 0.0))
    t = f.truncate(2.5)
    assert sorted(v[0] for v in t.terms) == [0, 1, 2]
