"""Discrete measures, summation pairs, and the Herglotz/Poisson evaluator.

A DiscreteMeasure is a finite, window-truncated list of weighted atoms on
the real line.  Atom positions are doubles, optionally tagged with an
exact symbolic radicand (sqrt(n/(b*sqrt(N)))) so that irrational positions
merge by provenance instead of by floating comparison.  A tail model
|w| <= C (1+|x|)^p with an atom density is fitted from the populated
window; it is used only to report truncation error bars, never to decide
correctness.

An FSPair couples an atom measure mu with a coefficient atom list a; for
the real-antipodal pairs built from a validated Hermite-Biehler sum, mu
sits at the roots of B with the residue weights 2 pi A(gamma)/B'(gamma)
and a is the one-sided spectrum of iA/B reflected by conjugation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .hermite import HermiteBiehler, RootFindingError, real_root_scan
from .spectra import exact_spectrum

MERGE_TOL = 1e-10


@dataclass(frozen=True)
class SqrtProvenance:
    """Exact tag for a position +-sqrt(n/(b*sqrt(N))), integers n, b, N."""

    n: int
    b: int
    N: int

    def radicand_key(self):
        return (Fraction(self.n, self.b), self.N)

    def value(self) -> float:
        return math.sqrt(self.n / (self.b * math.sqrt(self.N)))

    def to_json_dict(self):
        return {"form": "sqrt", "n": self.n, "b": self.b, "N": self.N}


@dataclass(frozen=True)
class Atom:
    x: float
    w: complex
    prov: SqrtProvenance | None = None


@dataclass(frozen=True)
class TailModel:
    """Power-law envelope |w| <= C (1+|x|)^p with atoms per unit `density`."""

    C: float
    p: float
    density: float

    def to_json_dict(self):
        return {"C": self.C, "p": self.p, "density": self.density}


def fit_tail_model(atoms) -> TailModel | None:
    """Least-squares power-law fit on the outer third of the window."""
    if len(atoms) < 4:
        return None
    xs = np.array([abs(a.x) for a in atoms])
    ws = np.array([abs(a.w) for a in atoms])
    xmax = xs.max()
    outer = (xs >= xmax / 3.0) & (ws > 0)
    if np.count_nonzero(outer) < 3 or xmax <= 1.0:
        outer = ws > 0
    if np.count_nonzero(outer) < 2:
        return None
    lx = np.log1p(xs[outer])
    lw = np.log(ws[outer])
    p = float(np.polyfit(lx, lw, 1)[0]) if np.ptp(lx) > 0 else 0.0
    C = float(np.max(ws[outer] / (1 + xs[outer]) ** p)) * 1.05
    span = xs[outer].max() - xs[outer].min()
    density = float(np.count_nonzero(outer) / span) if span > 0 else 1.0
    return TailModel(C, p, density)


class DiscreteMeasure:
    """Sorted atoms on a window, with duplicate merging and optional flags.

    Duplicates merge by exact provenance when both atoms carry it, else by
    a 1e-10 position tolerance (symbolic radicands like sqrt(n + 1/9)
    collide only symbolically).
    """

    def __init__(self, atoms, window, nonneg=False, dual_sign=None,
                 tail_model="fit"):
        norm = []
        for a in atoms:
            if not isinstance(a, Atom):
                a = Atom(float(a[0]), complex(a[1]),
                         a[2] if len(a) > 2 else None)
            norm.append(a)
        norm.sort(key=lambda a: a.x)
        merged: list[Atom] = []
        for a in norm:
            if merged:
                prev = merged[-1]
                same = False
                if a.prov is not None and prev.prov is not None:
                    same = (a.prov.radicand_key() == prev.prov.radicand_key()
                            and (a.x >= 0) == (prev.x >= 0))
                else:
                    same = abs(a.x - prev.x) <= MERGE_TOL
                if same:
                    merged[-1] = Atom(prev.x, prev.w + a.w, prev.prov or a.prov)
                    continue
            merged.append(a)
        merged = [a for a in merged if a.w != 0]
        self.atoms = merged
        self.window = (float(window[0]), float(window[1]))
        if merged and not (self.window[0] <= merged[0].x
                           and merged[-1].x <= self.window[1]):
            raise ValueError("window does not cover the atom support")
        for a, b in zip(merged, merged[1:]):
            if not a.x < b.x:
                raise ValueError("positions failed to sort strictly")
        self.nonneg = bool(nonneg)
        if self.nonneg:
            for a in merged:
                if abs(a.w.imag) > 1e-12 * (1 + abs(a.w)) or a.w.real < 0:
                    raise ValueError(f"atom at {a.x} violates the nonneg flag")
        self.dual_sign = dual_sign
        self.tail_model = fit_tail_model(merged) if tail_model == "fit" \
            else tail_model

    # -- views ----------------------------------------------------------

    def __len__(self):
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    def positions(self):
        return np.array([a.x for a in self.atoms])

    def weights(self):
        return np.array([a.w for a in self.atoms], dtype=complex)

    def total_variation(self) -> float:
        return float(np.sum(np.abs(self.weights()))) if self.atoms else 0.0

    def weight_at(self, x, tol=MERGE_TOL):
        for a in self.atoms:
            if abs(a.x - x) <= tol:
                return a.w
        return 0j

    def to_json_dict(self):
        out = {"atoms": [], "window": list(self.window), "nonneg": self.nonneg}
        for a in self.atoms:
            rec = {"x": a.x, "w": [a.w.real, a.w.imag]}
            if a.prov is not None:
                rec["prov"] = a.prov.to_json_dict()
            out["atoms"].append(rec)
        if self.dual_sign is not None:
            out["dual_sign"] = self.dual_sign
        if isinstance(self.tail_model, TailModel):
            out["tail_model"] = self.tail_model.to_json_dict()
        return out

    @classmethod
    def from_json_dict(cls, d):
        atoms = []
        for rec in d["atoms"]:
            prov = None
            if "prov" in rec:
                p = rec["prov"]
                prov = SqrtProvenance(p["n"], p["b"], p["N"])
            atoms.append(Atom(rec["x"], complex(rec["w"][0], rec["w"][1]), prov))
        tm = d.get("tail_model")
        return cls(atoms, d["window"], d.get("nonneg", False),
                   d.get("dual_sign"),
                   TailModel(**tm) if tm else None)


@dataclass
class FSPair:
    """Measure/coefficient pair with construction metadata.

    For real-antipodal pairs the mu weights are real and a(-lambda) equals
    conj(a(lambda)) exactly by construction.
    """

    mu: DiscreteMeasure
    a: DiscreteMeasure
    meta: dict = field(default_factory=dict)
    real_antipodal: bool = False

    def __post_init__(self):
        if self.real_antipodal:
            for at in self.mu:
                if at.w.imag != 0.0:
                    raise ValueError("real-antipodal pair needs real mu weights")

    def to_json_dict(self):
        return {"mu": self.mu.to_json_dict(), "a": self.a.to_json_dict(),
                "meta": self.meta}

    @classmethod
    def from_json_dict(cls, d):
        return cls(DiscreteMeasure.from_json_dict(d["mu"]),
                   DiscreteMeasure.from_json_dict(d["a"]),
                   d.get("meta", {}),
                   d.get("meta", {}).get("real_antipodal", False))


# -- construction from Hermite-Biehler data ----------------------------------

def measure_from_phase(H: HermiteBiehler, alpha: float, window) -> DiscreteMeasure:
    """Atoms 2 pi/phi'(gamma) at the real roots of B_alpha inside the window.

    phi is the phase of e^{i alpha}E; the weight at a root gamma equals
    2 pi A_alpha(gamma)/B_alpha'(gamma), which is strictly positive for a
    validated Hermite-Biehler input.
    """
    if not 0.0 <= alpha < math.pi:
        raise ValueError("alpha must lie in [0, pi)")
    A, B = H.rotated(alpha)
    scan = real_root_scan(B, window)
    if scan.double_roots:
        raise RootFindingError(
            f"degenerate (non-simple) root near {scan.double_roots[0]}")
    roots = np.array(scan.roots)
    if roots.size == 0:
        return DiscreteMeasure([], window, nonneg=True)
    av = A.eval(roots).real
    bpv = B.derivative().eval(roots).real
    if np.any(np.abs(bpv) < 1e-300):
        raise RootFindingError("B' vanished at a detected root")
    w = 2 * math.pi * av / bpv
    if np.any(w <= 0):
        bad = roots[np.argmin(w)]
        raise RootFindingError(f"nonpositive residue weight at {bad}")
    return DiscreteMeasure([(x, wi) for x, wi in zip(roots, w)],
                           window, nonneg=True)


def pair_from_hb(H: HermiteBiehler, cutoff, window) -> FSPair:
    """Real-antipodal pair: mu from phase data, a from the exact spectrum.

    a(lambda) = E(iA/B)(lambda) for lambda > 0, a(0) = 2 Re E(iA/B)(0),
    a(-lambda) = conj(a(lambda)).
    """
    mu = measure_from_phase(H, 0.0, window)
    spec = exact_spectrum(H, cutoff)
    cutoff_value = spec.meta["requested_cutoff"]
    atoms = []
    for _, val, c in spec.sorted_atoms():
        if val == 0.0:
            atoms.append((0.0, complex(2 * c.real)))
        else:
            atoms.append((val, c))
            atoms.append((-val, c.conjugate()))
    a = DiscreteMeasure(atoms, (-cutoff_value - 1e-9, cutoff_value + 1e-9))
    meta = {"source": "hermite-biehler", "cutoff": cutoff_value,
            "window": list(mu.window), "y_valid": spec.y_valid,
            "real_antipodal": True}
    return FSPair(mu, a, meta, real_antipodal=True)


# -- Herglotz representation -------------------------------------------------

def herglotz_eval(mu: DiscreteMeasure, h: float, z: complex) -> complex:
    """ih + (1/2 pi i) sum w (1+gamma z)/((gamma-z)(1+gamma^2)).

    The Poisson-type compensated kernel keeps the sum convergent for
    measures of quadratic growth; for nonnegative mu the real part is
    positive on the upper half-plane.
    """
    z = complex(z)
    if z.imag <= 0:
        raise ValueError("herglotz evaluation requires Im z > 0")
    g = mu.positions()
    if g.size and np.min(np.abs(g - z)) < 1e-9:
        raise ValueError("z is too close to an atom")
    w = mu.weights()
    s = np.sum(w * (1 + g * z) / ((g - z) * (1 + g * g))) if g.size else 0j
    return 1j * h + s / (2j * math.pi)


def fit_h(mu: DiscreteMeasure, f_at_i: complex) -> float:
    """Real constant making the compensated sum match f at z = i."""
    return float((f_at_i - herglotz_eval(mu, 0.0, 1j)).imag)


def herglotz_kernel_residual(mu: DiscreteMeasure, f, w: complex,
                             z: complex) -> float:
    """| (f(z)+conj(f(w)))/(z-conj w) - (1/2 pi i) sum w_g/((z-g)(conj w-g)) |.

    A small value certifies the kernel form of the Poisson representation
    of f by mu on the truncation window.
    """
    w = complex(w)
    z = complex(z)
    if w.imag <= 0 or z.imag <= 0:
        raise ValueError("both points must lie in the upper half-plane")
    g = mu.positions()
    if g.size and min(np.min(np.abs(g - z)), np.min(np.abs(g - w))) < 1e-9:
        raise ValueError("evaluation point too close to an atom")
    wt = mu.weights()
    wb = w.conjugate()
    lhs = (f(z) + complex(f(w)).conjugate()) / (z - wb)
    rhs = np.sum(wt / ((z - g) * (wb - g))) / (2j * math.pi) if g.size else 0j
    return abs(lhs - rhs)


def herglotz_tail_bound(mu: DiscreteMeasure, w: complex, z: complex) -> float:
    """Tail-model bound on the kernel sum truncated at the window edge."""
    tm = mu.tail_model
    if tm is None:
        return 0.0
    X = max(abs(mu.window[0]), abs(mu.window[1]))
    w = complex(w)
    z = complex(z)
    ts = X * np.exp(np.linspace(0.0, 25.0, 4000))
    total = 0.0
    for side in (+1.0, -1.0):
        t = side * ts
        integrand = tm.C * (1 + np.abs(t)) ** tm.p * tm.density \
            / (np.abs(t - z) * np.abs(t - w.conjugate()))
        total += float(np.trapezoid(integrand, ts))
    return total / (2 * math.pi)


# -- splittings ---------------------------------------------------------------

def signed_split(mu: DiscreteMeasure):
    """Positive/negative parts of a real measure: mu = plus - minus.

    Complex measures must first be separated into real and imaginary parts
    (see antipodal_split); complex weights are an error here.
    """
    plus, minus = [], []
    for a in mu.atoms:
        if abs(a.w.imag) > 1e-12 * (1 + abs(a.w)):
            raise ValueError("signed_split requires real weights")
        if a.w.real > 0:
            plus.append(Atom(a.x, complex(a.w.real), a.prov))
        elif a.w.real < 0:
            minus.append(Atom(a.x, complex(-a.w.real), a.prov))
    return (DiscreteMeasure(plus, mu.window, nonneg=True),
            DiscreteMeasure(minus, mu.window, nonneg=True))


def antipodal_split(mu: DiscreteMeasure, a: DiscreteMeasure):
    """Split a complex pair into two real-antipodal pairs.

    a1(l) = (a(l) + conj(a(-l)))/2,  a2(l) = (conj(a(-l)) - a(l))/(2i),
    mu1 = Re mu,  mu2 = -Im mu,  so that a = a1 - i a2 and mu = mu1 - i mu2.
    """
    support = sorted({round(at.x, 9) for at in a.atoms}
                     | {round(-at.x, 9) for at in a.atoms})
    a1_atoms, a2_atoms = [], []
    for x in support:
        ax = a.weight_at(x)
        amx = a.weight_at(-x)
        a1 = (ax + amx.conjugate()) / 2
        a2 = (amx.conjugate() - ax) / 2j
        if a1 != 0:
            a1_atoms.append((x, a1))
        if a2 != 0:
            a2_atoms.append((x, a2))
    win = (min(a.window[0], -a.window[1]), max(a.window[1], -a.window[0]))
    mu1 = DiscreteMeasure([Atom(at.x, complex(at.w.real), at.prov)
                           for at in mu.atoms if at.w.real != 0], mu.window)
    mu2 = DiscreteMeasure([Atom(at.x, complex(-at.w.imag), at.prov)
                           for at in mu.atoms if at.w.imag != 0], mu.window)
    return ((mu1, DiscreteMeasure(a1_atoms, win)),
            (mu2, DiscreteMeasure(a2_atoms, win)))


# -- degree probe -------------------------------------------------------------

def degree_probe(mu: DiscreteMeasure, n: int, stages: int = 8) -> dict:
    """Partial sums of sum |w|/(1+x^2)^{n/2} over expanding windows.

    A truncated window can only exhibit trends, so the verdict is either
    'convergent-at-window-scale' or 'divergent trend', with the staged
    sums included for inspection.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    xs = np.abs(mu.positions())
    ws = np.abs(mu.weights())
    X = max(xs.max() if xs.size else 0.0, 1.0)
    edges = np.linspace(X / stages, X, stages)
    sums = []
    for e in edges:
        sel = xs <= e
        sums.append(float(np.sum(ws[sel] / (1 + xs[sel] ** 2) ** (n / 2.0))))
    increments = np.diff([0.0] + sums)
    total = sums[-1] if sums else 0.0
    converged = bool(total == 0.0
                     or increments[-1] <= max(0.02 * total, 1e-12))
    if len(increments) >= 3 and increments[-1] > increments[-3] > 0:
        converged = False
    return {"verdict": "convergent-at-window-scale" if converged
            else "divergent trend",
            "exponent": n,
            "window_edges": [float(e) for e in edges],
            "partial_sums": sums}
