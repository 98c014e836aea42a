import math

import numpy as np
import pytest

from crystalsum.freqalg import FreqBasis, monomial, sine
from crystalsum.hermite import HermiteBiehler, ks_from_Q
from crystalsum.spectra import (
    SpectrumAtoms,
    SpectrumError,
    exact_spectrum,
    fejer_reconstruct,
    mean_value,
    mean_value_batch,
)

HALF = FreqBasis((0.5,))
UNIT = FreqBasis((1.0,))


def poisson_H():
    return ks_from_Q(sine(HALF, (1,)))


def plane_wave_H():
    return HermiteBiehler.validate(monomial(UNIT, (-1,)))


def icotangent(z):
    """Direct evaluator of i pi cot(pi z) (oracle, no shared code)."""
    z = np.asarray(z, dtype=complex)
    return 1j * np.pi * np.cos(np.pi * z) / np.sin(np.pi * z)


def test_exact_spectrum_poisson():
    spec = exact_spectrum(poisson_H(), 12.0)
    atoms = {val: c for _, val, c in spec.sorted_atoms()}
    assert atoms[0.0] == pytest.approx(math.pi, rel=1e-13)
    for n in range(1, 13):
        assert atoms[float(n)] == pytest.approx(2 * math.pi, rel=1e-12)
    assert len(atoms) == 13
    assert spec.y_valid == pytest.approx(0.15)


def test_exact_spectrum_plane_wave():
    spec = exact_spectrum(plane_wave_H(), 9.0)
    atoms = {val: c for _, val, c in spec.sorted_atoms()}
    assert atoms[0.0] == pytest.approx(1.0, rel=1e-13)
    for k in (2.0, 4.0, 6.0, 8.0):
        assert atoms[k] == pytest.approx(2.0, rel=1e-12)
    assert set(atoms) == {0.0, 2.0, 4.0, 6.0, 8.0}


def test_exact_spectrum_cutoff_zero():
    spec = exact_spectrum(poisson_H(), 0.0)
    assert len(spec.atoms) == 1
    assert spec.coefficient_at_zero() == pytest.approx(math.pi, rel=1e-13)


def test_exact_spectrum_min_freq_mismatch():
    H = poisson_H()
    bad = HermiteBiehler(H.E, math.pi * (monomial(HALF, (2,)) * 0.5
                                         + monomial(HALF, (-2,)) * 0.5),
                         H.B, H.certificate)
    with pytest.raises(SpectrumError):
        exact_spectrum(bad, 4.0)


def test_spectrum_rejects_negative_frequency():
    with pytest.raises(SpectrumError):
        SpectrumAtoms(UNIT, {(-1,): 1.0}, (0,), 1.0)


def test_mean_value_pure_exponential():
    f = lambda z: np.exp(2j * np.pi * np.asarray(z))
    for y in (0.5, 1.0, 2.0):
        assert mean_value(f, 1.0, y, 200.0) == pytest.approx(1.0, abs=1e-9)


def test_mean_value_constant_vanishes_off_zero():
    f = lambda z: np.full_like(np.asarray(z, dtype=complex), 3.0)
    v = mean_value(f, 0.7, 1.0, 500.0)
    assert abs(v) < 10 / 500.0
    assert mean_value(f, 0.0, 1.0, 500.0) == pytest.approx(3.0, rel=1e-12)


def test_mean_value_against_exact_atom():
    # lam = 1 coefficient of i pi cot(pi z) is 2 pi
    v = mean_value(icotangent, 1.0, 1.0, 10_000.0)
    assert abs(v - 2 * math.pi) <= 1e-3


def test_mean_value_y_independence():
    spec = exact_spectrum(poisson_H(), 4.0)
    y0 = spec.y_valid
    T = 200.0
    v1 = mean_value(icotangent, 1.0, y0 + 0.5, T)
    v2 = mean_value(icotangent, 1.0, y0 + 2.0, T)
    assert abs(v1 - v2) <= 10 / T


def test_oracle_equivalence_ten_lowest():
    # exact division vs tapered mean values on the 10 lowest frequencies;
    # the line height and panel width are chosen so that neither the
    # e^{2 pi lam y} noise amplification nor the oscillation rate exceeds
    # double precision (y-independence makes any valid height legitimate).
    H = poisson_H()
    spec = exact_spectrum(H, 10.0)
    lams = sorted(val for _, val, _ in spec.sorted_atoms())[:10]
    f = lambda z: 1j * H.A.eval(z) / H.B.eval(z)
    got = mean_value_batch(f, lams, 0.2, 2000.0, panel_width=1 / 32)
    for lam, g in zip(lams, got):
        expect = spec.atoms[(int(round(2 * lam)),)]
        assert abs(g - expect) <= 1e-3, f"lam={lam}"


def test_mean_value_rejects_poles():
    f = lambda z: np.full_like(np.asarray(z, dtype=complex), np.inf)
    with pytest.raises(SpectrumError):
        mean_value(f, 0.0, 1.0, 10.0)


def test_fejer_reconstruct_poisson():
    H = poisson_H()
    spec = exact_spectrum(H, 60.0)
    a0 = 2 * spec.coefficient_at_zero().real
    got = fejer_reconstruct(spec, a0, 50.0, 2j)
    direct = icotangent(2j)
    # fejer taper error at T=50 is (2 pi/T) e^{-4 pi} ~ 4.4e-7
    assert abs(got - direct) <= 1e-6


def test_fejer_reconstruct_degenerate_T():
    H = poisson_H()
    spec = exact_spectrum(H, 5.0)
    a0 = 2 * spec.coefficient_at_zero().real
    assert fejer_reconstruct(spec, a0, 0.5, 1j) == 0.5 * a0


def test_fejer_reconstruct_empty():
    empty = SpectrumAtoms(UNIT, {}, (0,), 0.0)
    assert fejer_reconstruct(empty, 0.0, 10.0, 1j) == 0.0


def test_fejer_convergence_monotone():
    H = poisson_H()
    spec = exact_spectrum(H, 250.0)
    a0 = 2 * spec.coefficient_at_zero().real
    zs = [1j, 0.3 + 1j, -0.7 + 1.5j, 2j, 0.1 + 2.5j]
    for z in zs:
        errs = [abs(fejer_reconstruct(spec, a0, T, z) - icotangent(z))
                for T in (25, 50, 100, 200)]
        for e1, e2 in zip(errs, errs[1:]):
            assert e2 <= 1.1 * e1


def test_spectrum_json():
    spec = exact_spectrum(poisson_H(), 3.0)
    d = spec.to_json_dict()
    assert d["yValid"] == spec.y_valid
    assert d["cutoff"] == [6]
    assert len(d["terms"]) == 4
