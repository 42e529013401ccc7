"""Momentum-space spectral densities and their structural properties.

The eigenstate (Lehmann-type) sum is evaluated on the occupation basis, in
which the free Hamiltonian and total momentum are diagonal:

    G_XY(p) = (1/V) sum_{n,m} e^{-beta E_n}/Z  <n|X(p)|m><m|Y(-p)|n>
              * [ |p0 - (E_m - E_n)| <= dw/2 ]

with X(p) the spatial Fourier transform over the box (exact Kronecker
selection by total lattice momentum) and the energy delta binned with width
dw.  The reported value is the bin sum, so isolated lattice lines are stable
under bin halving.

Structural consequences carried by this sum: at beta = inf and space-like p
no eigenstate pair satisfies the constraints (E >= |P| forbids it), so G
vanishes with zero contributing terms; at finite beta the dominant Boltzmann
weight obeys E_min >= (|p| - |p0|)/2, the exponential suppression bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .errors import BoxQFTError, OffLatticeMomentum
from .fields import QuadraticDensity
from .fock import FockSpace
from .spacetime import FourVector, minkowski_dot

NORM_TAG = "box: X(p)=int_V e^{-ip.x}X dx; G = binsum/(V); delta0=bin"


@dataclass(frozen=True)
class SpectralSample:
    p: Tuple[float, float, float, float]
    G: complex
    beta: float
    X: str
    Y: str
    norm_tag: str
    dominant_weight: float
    term_count: int
    delta_omega: float


def _momentum_block(space: FockSpace, density: QuadraticDensity,
                    lattice_target: Tuple[int, int, int]):
    """Fock operator of int_V e^{-ip.x} X(0,x) dx: keeps terms whose spatial
    transfer equals -p (lattice units), weighted by the volume."""
    V = space.volume

    def factor(t):
        return V if t.lattice == lattice_target else 0.0

    return density.map_terms(f"{density.label}(p)", factor).matrix()


def _lattice_of(space: FockSpace, p: FourVector) -> Tuple[int, int, int]:
    grid = space.channels[0][1]
    out = [0, 0, 0]
    ps = p.spatial
    for a in (1, 2, 3):
        if a in grid.axes:
            L = grid.lengths[grid.axes.index(a)]
            n = ps[a - 1] * L / (2 * math.pi)
            if abs(n - round(n)) > 1e-9:
                raise OffLatticeMomentum(f"momentum off lattice on axis {a}")
            out[a - 1] = int(round(n))
        elif abs(ps[a - 1]) > 1e-12:
            raise OffLatticeMomentum(f"momentum on inactive axis {a}")
    return tuple(out)


def default_delta_omega(space: FockSpace) -> float:
    """Bin width: smallest single-mode energy quantum / 8."""
    grid = space.channels[0][1]
    quantum = min(2 * math.pi * grid.v_c / L for L in grid.lengths)
    return quantum / 8.0


def lehmann_spectral_density(space: FockSpace, X: QuadraticDensity,
                             Y: QuadraticDensity, p: FourVector, beta: float,
                             delta_omega: Optional[float] = None) -> SpectralSample:
    """Box-normalized eigenstate double sum for G_XY(p).

    Returns the sample together with the dominant Boltzmann weight among
    contributing terms and the number of contributing (n, m) pairs; a zero
    term count at space-like p and beta = inf is the structural statement
    that no eigenstate pair satisfies the energy-momentum constraint.
    """
    if delta_omega is None:
        delta_omega = default_delta_omega(space)
    lat = _lattice_of(space, p)
    A = _momentum_block(space, X, tuple(-v for v in lat))
    B = _momentum_block(space, Y, lat)

    if math.isinf(beta):
        weights = np.zeros(space.dim)
        weights[int(np.argmin(space.energies))] = 1.0
    else:
        w = np.exp(-beta * (space.energies - space.energies.min()))
        weights = w / w.sum()

    prod = A.multiply(B.transpose())        # entries A[n,m] * B[m,n]
    prod = prod.tocoo()
    if prod.nnz == 0:
        return SpectralSample(tuple(p.as_array()), 0.0, beta, X.label, Y.label,
                              NORM_TAG, 0.0, 0, delta_omega)
    de = space.energies[prod.col] - space.energies[prod.row]
    mask = np.abs(p.t - de) <= delta_omega / 2.0
    mask &= weights[prod.row] > 0.0
    vals = prod.data[mask] * weights[prod.row[mask]]
    G = complex(vals.sum()) / space.volume
    dom = float(weights[prod.row[mask]].max()) if mask.any() else 0.0
    return SpectralSample(tuple(p.as_array()), G, beta, X.label, Y.label,
                          NORM_TAG, dom, int(mask.sum()), delta_omega)


def fdt_ratio(space: FockSpace, X: QuadraticDensity, p: FourVector,
              beta: float, delta_omega: Optional[float] = None):
    """(G(-p), e^{-beta p0} G(p)) for the detailed-balance check."""
    g_plus = lehmann_spectral_density(space, X, X, p, beta, delta_omega)
    g_minus = lehmann_spectral_density(space, X, X, -1.0 * p, beta, delta_omega)
    return g_minus.G, math.exp(-beta * p.t) * g_plus.G, g_plus


def suppression_slope(space: FockSpace, X: QuadraticDensity, p: FourVector,
                      betas: Sequence[float]) -> Tuple[float, float, List[Tuple[float, float]]]:
    """Least-squares beta-slope of log|G| at fixed space-like p.

    Returns (slope, bound, points) where bound = -(|p| - |p0|)/2 is the
    exponential suppression exponent the slope must not exceed.
    """
    pts = []
    for beta in betas:
        s = lehmann_spectral_density(space, X, X, p, beta)
        if abs(s.G) > 0:
            pts.append((float(beta), math.log(abs(s.G))))
    if len(pts) < 2:
        raise BoxQFTError("not enough nonzero samples for a slope fit")
    xs = np.array([b for b, _ in pts])
    ys = np.array([y for _, y in pts])
    slope = float(np.polyfit(xs, ys, 1)[0])
    bound = -(float(np.linalg.norm(p.spatial)) - abs(p.t)) / 2.0
    return slope, bound, pts


# ---------------------------------------------------------------------------
# massless current spectra and window-noise scaling


@dataclass(frozen=True)
class SpectrumDescriptor:
    """Closed-form massless spectrum: support function per dimension and a
    tensor prefactor, with proportionality constants fixed to 1.

    support: 'lightcone_delta' (D=1), 'inverse_sqrt' (D=2), 'step' (D=3).
    s_type 'current': prefactor (p^mu p^nu - g^{mu nu} p.p);
    s_type 'energy': prefactor |p_spatial|^4 (two more derivatives).
    Evaluation is identically zero for p.p < 0 in every dimension.
    """
    dimension: int
    s_type: str
    support: str

    def tensor_prefactor(self, p: FourVector, mu: int = 1, nu: int = 1) -> float:
        if self.s_type == "energy":
            r2 = float(p.spatial @ p.spatial)
            return r2 * r2
        pa = p.as_array()
        from .spacetime import METRIC
        return float(pa[mu] * pa[nu] - METRIC[mu, nu] * minkowski_dot(p, p))

    def support_value(self, p: FourVector) -> float:
        s = minkowski_dot(p, p)
        if s < 0:
            return 0.0
        if self.support == "lightcone_delta":
            # distributional; finite evaluation only through quadrature
            return math.inf if s == 0 else 0.0
        if self.support == "inverse_sqrt":
            return math.inf if s == 0 else 1.0 / math.sqrt(s)
        return 1.0

    def evaluate(self, p: FourVector, mu: int = 1, nu: int = 1) -> float:
        s = minkowski_dot(p, p)
        if s < 0:
            return 0.0
        return self.tensor_prefactor(p, mu, nu) * self.support_value(p)


_SUPPORTS = {1: "lightcone_delta", 2: "inverse_sqrt", 3: "step"}


def massless_current_spectrum(D: int, s_type: str = "current") -> SpectrumDescriptor:
    if D not in (1, 2, 3):
        raise BoxQFTError("D must be 1, 2 or 3")
    if s_type not in ("current", "energy"):
        raise BoxQFTError("s_type must be 'current' or 'energy'")
    return SpectrumDescriptor(dimension=D, s_type=s_type, support=_SUPPORTS[D])


def _time_window_sq(w: np.ndarray, tau: float, envelope: str) -> np.ndarray:
    """|time transform|^2 for a window of duration tau."""
    if envelope == "rect":
        return (tau * np.sinc(w * tau / (2 * math.pi))) ** 2
    sigma = tau / 2.0
    return 2 * math.pi * sigma ** 2 * np.exp(-(sigma * w) ** 2)


def _box_window_sq(p: np.ndarray, L: float) -> np.ndarray:
    return (L * np.sinc(p * L / (2 * math.pi))) ** 2


def windowed_noise(s_type: str, D: int, V: float, tau: float,
                   envelope: str = "gauss", n_grid: int = 48) -> float:
    """Vacuum noise <Sbar^2> of the box-and-duration windowed observable.

    Quadrature of the massless spectrum against the squared window
    transforms.  The sharp (rect) time envelope makes the integral dominated
    by high frequencies for D >= 2 (sharp switching excites arbitrarily hard
    modes), burying the infrared scaling law; the smooth Gaussian envelope of
    the same duration (default) exposes it.  Warned about, not rejected.
    """
    import warnings
    L = V ** (1.0 / D)
    if tau < 3 * L:
        warnings.warn("windowed_noise assumes tau >> V^(1/D)", stacklevel=2)
    if envelope == "rect" and D >= 2:
        warnings.warn("sharp time windows are UV-dominated; scaling exponents "
                      "require the smooth envelope", stacklevel=2)
    desc = massless_current_spectrum(D, s_type)
    meas = 1.0 / (2 * math.pi) ** (D + 1)

    if D == 1:
        # delta support: p0 = +-|p1|, Jacobian 1/(2|p1|), two branches
        grid, wts = np.polynomial.legendre.leggauss(max(n_grid * 8, 256))
        K = 40.0 / tau + 16.0 * math.pi / L
        pv = 0.5 * K * (grid + 1.0)
        jw = 0.5 * K * wts
        pref = pv ** 2 if s_type == "current" else pv ** 4
        integ = _box_window_sq(pv, L) * pref / pv * _time_window_sq(pv, tau, envelope)
        return float(2 * meas * np.sum(jw * integ))

    if envelope != "gauss":
        raise BoxQFTError("rect time envelopes are only supported in D=1; "
                          "use the Gaussian envelope for D >= 2")
    sigma = tau / 2.0
    ng, wg = np.polynomial.legendre.leggauss(n_grid)
    K = 12.0 / sigma
    pv = 0.5 * K * (ng + 1.0)
    pw = 0.5 * K * wg

    if D == 2:
        # substitute p0 = sqrt(s^2 + r^2): 2*int_0^inf ds f(w)/w * [pref]
        p1, p2, s = np.meshgrid(pv, pv, pv, indexing="ij")
        w1, w2, ws = np.meshgrid(pw, pw, pw, indexing="ij")
        r2 = p1 ** 2 + p2 ** 2
        w0 = np.sqrt(s ** 2 + r2)
        pref = (p1 ** 2 + s ** 2) if s_type == "current" else r2 ** 2
        ft = 2 * math.pi * sigma ** 2 * np.exp(-(sigma * w0) ** 2)
        fx = _box_window_sq(p1, L) * _box_window_sq(p2, L)
        integ = fx * pref * ft / w0
        # quadrant symmetry in p1,p2 (x4), two p0 branches via the 2 factor
        return float(4 * 2 * meas * np.sum(w1 * w2 * ws * integ))

    # D = 3, theta support: p0 integral in closed form per spatial point
    p1, p2, p3 = np.meshgrid(pv, pv, pv, indexing="ij")
    w1, w2, w3 = np.meshgrid(pw, pw, pw, indexing="ij")
    r = np.sqrt(p1 ** 2 + p2 ** 2 + p3 ** 2)
    fx = _box_window_sq(p1, L) * _box_window_sq(p2, L) * _box_window_sq(p3, L)
    # int_{|w|>r} e^{-sigma^2 w^2} dw and the w^2 moment
    from scipy.special import erfc
    i0 = math.sqrt(math.pi) / sigma * erfc(sigma * r)
    i2 = r * np.exp(-(sigma * r) ** 2) / sigma ** 2 + \
        math.sqrt(math.pi) * erfc(sigma * r) / (2 * sigma ** 3)
    gauss_norm = 2 * math.pi * sigma ** 2
    if s_type == "current":
        # prefactor (p1^2 + w^2 - r^2)
        tint = gauss_norm * ((p1 ** 2 - r ** 2) * i0 + i2)
    else:
        tint = gauss_norm * r ** 4 * i0
    integ = fx * tint
    return float(8 * meas * np.sum(w1 * w2 * w3 * integ))


@dataclass(frozen=True)
class NoiseExponentFit:
    s_type: str
    dimension: int
    exponent: float
    expected: float
    points: Tuple[Tuple[float, float], ...]


def noise_exponent_fit(s_type: str, D: int, V: float, tau_min: float,
                       tau_max: float, n_points: int = 16) -> NoiseExponentFit:
    """Least-squares tau-exponent of <Sbar^2> over [tau_min, tau_max].

    Expected exponents: current 2-2D, energy -2D.
    """
    if tau_max < 10 * tau_min * 0.999:
        raise BoxQFTError("fit range must cover at least one decade")
    taus = np.geomspace(tau_min, tau_max, n_points)
    vals = np.array([windowed_noise(s_type, D, V, t) for t in taus])
    coef = np.polyfit(np.log(taus), np.log(vals), 1)
    expected = float(2 - 2 * D) if s_type == "current" else float(-2 * D)
    pts = tuple((float(t), float(v)) for t, v in zip(taus, vals))
    return NoiseExponentFit(s_type, D, float(coef[0]), expected, pts)


# ---------------------------------------------------------------------------
# qualitative signal vs noise curves


@dataclass(frozen=True)
class SignalNoiseCurve:
    dimension: int
    energy: float
    rows: Tuple[Tuple[float, float, float, float], ...]  # tau, signal, noise, ratio
    tau_star: float


def signal_vs_noise_curve(D: int, E: float, taus: Sequence[float]) -> SignalNoiseCurve:
    """Qualitative single-particle signal (~tau) against vacuum noise
    (~tau^(1-D)) with unit prefactors; the crossover is tau* = 1."""
    rows = []
    for tau in taus:
        signal = float(tau)
        noise = float(tau ** (1 - D))
        rows.append((float(tau), signal, noise, signal / noise))
    return SignalNoiseCurve(dimension=D, energy=float(E), rows=tuple(rows),
                            tau_star=1.0)


def write_spectral_csv(samples: Sequence[SpectralSample], path) -> None:
    with open(path, "w") as fh:
        fh.write("p0,p1,p2,p3,ReG,ImG,beta,X,Y,norm_tag\n")
        for s in samples:
            fh.write(f"{s.p[0]!r},{s.p[1]!r},{s.p[2]!r},{s.p[3]!r},"
                     f"{s.G.real!r},{s.G.imag!r},{s.beta!r},{s.X},{s.Y},"
                     f"\"{s.norm_tag}\"\n")
