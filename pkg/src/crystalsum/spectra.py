"""Spectral coefficients of f = iA/B, by two independent routes.

The exact route expands iA/B as an exponential sum with nonnegative
frequencies using the geometric division  1/(1-g) = sum g^n,  where g is
built from B normalized by its lowest-frequency term.  Truncating every
power at a declared frequency cutoff keeps the loop finite without any
magnitude-based dropping: each retained frequency receives contributions
from finitely many powers, so the output frequencies are exact and the
coefficients are floating-exact.

The numeric route estimates the same coefficients as tapered mean values

    (1/2T) int_{-T}^{T} w(x/T) f(x+iy) e^{-2 pi i lambda (x+iy)} dx

along a horizontal line, with the Fejer taper w(u) = 1-|u| (rescaled by
its integral) as default: the taper improves the truncation error of an
isolated atom from O(1/T) to O(1/T^2).  The quadrature is composite
Gauss-Legendre with fixed-width panels.

The two routes share no code and serve as oracles for each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .freqalg import ExpSum, FreqBasis
from .hermite import HermiteBiehler


class SpectrumError(ValueError):
    pass


@dataclass
class SpectrumAtoms:
    """Nonnegative-frequency expansion of iA/B up to a cutoff.

    atoms maps frequency vectors to complex coefficients; y_valid is a
    height above which the defining geometric expansion was certified to
    converge (sup-norm bound of g below 1/2).
    """

    basis: FreqBasis
    atoms: dict
    cutoff: tuple              # largest retained frequency vector
    y_valid: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        for v in self.atoms:
            if self.basis.value(v) < -1e-12:
                raise SpectrumError("negative frequency in spectrum")

    def sorted_atoms(self):
        return sorted(((v, self.basis.value(v), c) for v, c in self.atoms.items()),
                      key=lambda t: (t[1], t[0]))

    def coefficient_at_zero(self) -> complex:
        return self.atoms.get(self.basis.zero_vec(), 0j)

    def to_json_dict(self):
        d = ExpSum(self.basis, self.atoms).to_json_dict()
        d["cutoff"] = list(self.cutoff)
        d["yValid"] = self.y_valid
        return d


def _sup_bound(g: ExpSum, y: float) -> float:
    """Triangle-inequality bound on sup_x |g(x+iy)| (all g-frequencies > 0)."""
    return sum(abs(c) * math.exp(-2 * math.pi * val * y)
               for _, val, c in g.sorted_terms())


def exact_spectrum(H: HermiteBiehler, cutoff) -> SpectrumAtoms:
    """Expansion of iA/B in nonnegative frequencies, exact up to `cutoff`.

    Writes B = b0 e^{2 pi i theta0 z}(1 - g) with theta0 the common minimum
    frequency of A and B, then multiplies iA e^{-2 pi i theta0 z}/b0 by the
    truncated geometric series.  The number of powers is ceil(cutoff/delta)
    with delta the least positive frequency of g, so every retained
    frequency is complete.  Records y_valid, the least ladder height where
    the sup-norm bound of g drops below 1/2.
    """
    A, B = H.A, H.B
    if not B:
        raise SpectrumError("B is identically zero")
    vb, theta0, b0 = B.min_freq()
    va, _, _ = A.min_freq()
    if va != vb:
        raise SpectrumError(
            "minimum frequencies of A and B differ; E is not normalized "
            "Hermite-Biehler (spectrum would not be one-sided)")
    cutoff_value = float(cutoff) if not isinstance(cutoff, tuple) \
        else H.E.basis.value(cutoff)
    if cutoff_value < 0:
        raise SpectrumError("cutoff must be nonnegative")

    neg = tuple(-k for k in vb)
    g = ExpSum(B.basis, {tuple(a - b for a, b in zip(v, vb)): -c / b0
                         for v, c in B.terms.items() if v != vb})
    prefactor = (A.shift(neg) * (1j / b0)).truncate(cutoff_value)

    if g:
        delta = min(val for _, val, _ in g.sorted_terms())
        if delta <= 0:
            raise SpectrumError("duplicate lowest frequency in B after purge")
        n_powers = int(math.ceil(cutoff_value / delta)) if cutoff_value > 0 else 0
        geom = ExpSum(B.basis, {B.basis.zero_vec(): 1.0})
        power = geom
        for _ in range(n_powers):
            power = (power * g).truncate(cutoff_value)
            if not power:
                break
            geom = geom + power
    else:
        delta = math.inf
        n_powers = 0
        geom = ExpSum(B.basis, {B.basis.zero_vec(): 1.0})

    out = (prefactor * geom).truncate(cutoff_value)

    y_valid = 0.0
    if g:
        y = 0.05
        while _sup_bound(g, y) >= 0.5:
            y += 0.05
            if y > 200.0:
                raise SpectrumError("could not certify convergence height")
        y_valid = y

    atoms = out.terms
    cutoff_vec = max(atoms, key=lambda v: B.basis.value(v)) if atoms \
        else B.basis.zero_vec()
    meta = {"requested_cutoff": cutoff_value, "n_powers": n_powers,
            "delta": delta if delta != math.inf else None}
    return SpectrumAtoms(B.basis, atoms, cutoff_vec, y_valid, meta)


def _fejer_weight(u):
    return 1.0 - np.abs(u)


def _panel_nodes(T: float, width: float, nodes: int):
    n_panels = max(int(math.ceil(2 * T / width)), 1)
    w_eff = 2 * T / n_panels
    xi, wi = np.polynomial.legendre.leggauss(nodes)
    mids = -T + w_eff * (np.arange(n_panels) + 0.5)
    X = (mids[:, None] + 0.5 * w_eff * xi[None, :]).ravel()
    W = np.broadcast_to(0.5 * w_eff * wi[None, :], (n_panels, nodes)).ravel()
    return X, W


def mean_value_batch(f, lambdas, y, T, taper="fejer",
                     panel_width=0.25, nodes=8, eval_y=None):
    """Tapered Bohr mean values at several frequencies, sharing f-samples.

    `f` is an evaluator (vectorized over ndarray input preferred).  When
    eval_y is given, the integration line is moved there; by Cauchy's
    theorem the mean of a function holomorphic and bounded between the two
    heights is unchanged, and a lower line avoids amplifying quadrature
    noise by e^{2 pi lambda y} at large lambda.
    """
    if taper not in ("none", "fejer"):
        raise ValueError("taper must be 'none' or 'fejer'")
    if T <= 0:
        raise ValueError("T must be positive")
    y_line = y if eval_y is None else eval_y
    X, W = _panel_nodes(float(T), panel_width, nodes)
    Z = X + 1j * y_line
    try:
        fv = np.asarray(f(Z), dtype=complex)
        if fv.shape != Z.shape:
            raise TypeError
    except TypeError:
        fv = np.array([f(z) for z in Z], dtype=complex)
    if not np.all(np.isfinite(fv)):
        raise SpectrumError("non-finite sample: a pole is too close to the line")
    if taper == "fejer":
        wts = W * _fejer_weight(X / T)
        norm = float(T)
    else:
        wts = W
        norm = 2.0 * float(T)
    base = wts * fv
    out = []
    for lam in lambdas:
        phase = np.exp(-2j * np.pi * lam * Z)
        out.append(complex(np.sum(base * phase)) / norm)
    return out


def mean_value(f, lam, y, T, taper="fejer", panel_width=0.25, nodes=8,
               eval_y=None) -> complex:
    """Single tapered Bohr mean value; see mean_value_batch."""
    return mean_value_batch(f, [lam], y, T, taper, panel_width, nodes, eval_y)[0]


def fejer_reconstruct(a: SpectrumAtoms, a0: float, T: float, z) -> complex:
    """Fejer partial sum (1/2) a0 + sum_{0<lambda<T} a(lambda)(1-lambda/T)e^{2 pi i lambda z}.

    Converges to iA/B as T grows, uniformly on compacts of the upper
    half-plane.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    total = 0.5 * complex(a0)
    for _, val, c in a.sorted_atoms():
        if 0.0 < val < T:
            total += c * (1.0 - val / T) * np.exp(2j * np.pi * val * complex(z))
    return complex(total)
