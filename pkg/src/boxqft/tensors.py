"""Lorentz-invariant decomposition of sampled vector/tensor correlations,
positivity-forced zeros, and noiseless projectors.

Invariant models fitted by exact-rank linear least squares:

    vector:        G^{mn}   = eta p^m p^n - xi g^{mn}
    symmetric:     G^{mnsr} = a pppp - b ppg - b* gpp + f (pg sym combo)
                              + v (gg sym combo) + w gg
    antisymmetric: G^{mnsr} = a eps^{mnsr} + v (gg antisym) + f (ppg antisym)

In the canonical frame p = (0,0,0,q), positivity of diagonal correlations
forces xi = 0 (vector), v = f = 0 (symmetric) and a = v = f = 0, hence G = 0
(antisymmetric).  b is real for space-like p and may be complex for
time-like p; the fits honor that constraint.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import (BoxQFTError, DegenerateBasis, RequiresCanonicalFrame)
from .spacetime import (METRIC, FourVector, IntervalClass, boost_matrix,
                        classify_interval, minkowski_dot)

# rank-4 Levi-Civita symbol from permutation parity, eps^{0123} = +1
import itertools as _it

_EPS4 = np.zeros((4, 4, 4, 4))
for _p in _it.permutations(range(4)):
    _inv = sum(1 for i in range(4) for j in range(i + 1, 4) if _p[i] > _p[j])
    _EPS4[_p] = -1.0 if _inv % 2 else 1.0

EPSILON4 = _EPS4


@dataclass(frozen=True)
class TensorCorrelation:
    """Sampled momentum-space correlation with declared index symmetry."""
    rank: str                      # "vector" | "symmetric2" | "antisymmetric2"
    p: FourVector
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", v)
        if self.rank == "vector" and v.shape != (4, 4):
            raise BoxQFTError("vector correlations are 4x4")
        if self.rank in ("symmetric2", "antisymmetric2") and v.shape != (4, 4, 4, 4):
            raise BoxQFTError("rank-2 correlations are 4x4x4x4")

    def symmetry_defect(self) -> float:
        v = self.values
        if self.rank == "vector":
            return 0.0
        sign = 1.0 if self.rank == "symmetric2" else -1.0
        d1 = np.max(np.abs(v - sign * np.transpose(v, (1, 0, 2, 3))))
        d2 = np.max(np.abs(v - sign * np.transpose(v, (0, 1, 3, 2))))
        return float(max(d1, d2))


@dataclass
class DecompositionFit:
    coefficients: Dict[str, complex]
    residual: float
    condition_number: float
    frame: str
    conservation_assumed: bool = False
    degenerate: bool = False
    trivial_zero: bool = False
    positivity_violations: List[str] = field(default_factory=list)

    def to_json(self) -> str:
        doc = {
            "coefficients": {k: [v.real, v.imag]
                             for k, v in sorted(self.coefficients.items())},
            "residual": self.residual,
            "condition_number": self.condition_number,
            "frame": self.frame,
            "conservation_assumed": self.conservation_assumed,
            "degenerate": self.degenerate,
            "trivial_zero": self.trivial_zero,
            "positivity_violations": self.positivity_violations,
        }
        return json.dumps(doc, sort_keys=True)


def _lstsq(basis: Sequence[np.ndarray], data: np.ndarray, real_params: bool):
    """Exact-rank least squares; returns (coeffs, residual_rel, cond)."""
    cols = [b.reshape(-1) for b in basis]
    A = np.stack(cols, axis=1)
    y = data.reshape(-1)
    if real_params:
        A = np.concatenate([A.real, A.imag], axis=0)
        y = np.concatenate([y.real, y.imag])
    coeffs, _, _, sv = np.linalg.lstsq(A, y, rcond=None)
    model = A @ coeffs
    ny = float(np.linalg.norm(y))
    resid = float(np.linalg.norm(y - model))
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    return coeffs, (resid / ny if ny > 0 else resid), cond, bool(ny == 0.0)


def _degeneracy(p: FourVector) -> bool:
    if p.norm_sq_euclidean() == 0.0:
        raise DegenerateBasis("p = 0 collapses the tensor basis")
    return classify_interval(p) is IntervalClass.LIGHTLIKE


# ---------------------------------------------------------------------------
# vector


def decompose_vector(G: TensorCorrelation, p: Optional[FourVector] = None,
                     conserved: bool = False) -> DecompositionFit:
    """Fit G^{mn} = eta p^m p^n - xi g^{mn}.

    For positivity-consistent space-like vacuum data xi = 0; conservation
    (p.A = 0) additionally forces eta = 0.  Light-like p keeps the basis
    independent but voids the positivity frame argument: flagged, not
    rejected.
    """
    if G.rank != "vector":
        raise BoxQFTError("decompose_vector expects rank 'vector'")
    p = p or G.p
    pa = p.as_array()
    degenerate = _degeneracy(p)
    basis = [np.outer(pa, pa).astype(complex), -METRIC.astype(complex)]
    coeffs, resid, cond, trivial = _lstsq(basis, G.values, real_params=False)
    eta, xi = complex(coeffs[0]), complex(coeffs[1])
    fit = DecompositionFit({"eta": eta, "xi": xi}, resid, cond, "direct",
                           conservation_assumed=conserved, degenerate=degenerate,
                           trivial_zero=trivial)
    # canonical-frame positivity: G00 = -xi must be >= 0, G11 = +xi >= 0
    if abs(xi) > 1e-10 * max(1.0, float(np.max(np.abs(G.values)))):
        fit.positivity_violations.append(
            f"xi = {xi:.3e} forces negative G00 or G11 in the canonical frame")
    return fit


# ---------------------------------------------------------------------------
# symmetric rank 2


def _sym_basis(pa: np.ndarray):
    g = METRIC.astype(complex)
    pp = np.einsum("m,n->mn", pa, pa)
    pppp = np.einsum("mn,sr->mnsr", pp, pp)
    ppg = np.einsum("mn,sr->mnsr", pp, g)
    gpp = np.einsum("mn,sr->mnsr", g, pp)
    f_term = (np.einsum("m,s,nr->mnsr", pa, pa, g)
              + np.einsum("m,r,ns->mnsr", pa, pa, g)
              + np.einsum("n,s,mr->mnsr", pa, pa, g)
              + np.einsum("n,r,ms->mnsr", pa, pa, g))
    v_term = (np.einsum("ms,nr->mnsr", g, g) + np.einsum("ns,mr->mnsr", g, g))
    w_term = np.einsum("mn,sr->mnsr", g, g)
    return pppp, ppg, gpp, f_term, v_term, w_term


def decompose_symmetric(G: TensorCorrelation, p: Optional[FourVector] = None,
                        conserved: bool = False) -> DecompositionFit:
    """Fit the five-parameter symmetric-tensor model.

    Space-like p constrains b to be real; positivity-consistent data has
    v = f = 0.  With conserved=True the fit uses the transverse-projector
    model (g - pp/p.p)(g - pp/p.p) w alone and reports its residual.
    """
    if G.rank != "symmetric2":
        raise BoxQFTError("decompose_symmetric expects rank 'symmetric2'")
    p = p or G.p
    pa = p.as_array()
    degenerate = _degeneracy(p)
    s = minkowski_dot(p, p)
    if conserved:
        if abs(s) < 1e-300:
            raise DegenerateBasis("conserved model needs p.p != 0")
        g = METRIC.astype(complex)
        proj = g - np.einsum("m,n->mn", pa, pa) / s
        basis = [np.einsum("mn,sr->mnsr", proj, proj)]
        coeffs, resid, cond, trivial = _lstsq(basis, G.values, real_params=False)
        fit = DecompositionFit({"w": complex(coeffs[0])}, resid, cond, "direct",
                               conservation_assumed=True, degenerate=degenerate,
                               trivial_zero=trivial)
        return fit

    pppp, ppg, gpp, f_term, v_term, w_term = _sym_basis(pa)
    spacelike = classify_interval(p) is IntervalClass.SPACELIKE
    if spacelike:
        basis = [pppp, -(ppg + gpp), f_term, v_term, w_term]
        coeffs, resid, cond, trivial = _lstsq(basis, G.values, real_params=True)
        names = ["a", "b", "f", "v", "w"]
        cd = {k: complex(v) for k, v in zip(names, coeffs)}
    else:
        basis = [pppp, -(ppg + gpp), -1j * (ppg - gpp), f_term, v_term, w_term]
        coeffs, resid, cond, trivial = _lstsq(basis, G.values, real_params=True)
        cd = {"a": complex(coeffs[0]),
              "b": complex(coeffs[1] + 1j * coeffs[2]),
              "f": complex(coeffs[3]), "v": complex(coeffs[4]),
              "w": complex(coeffs[5])}
    fit = DecompositionFit(cd, resid, cond, "direct", degenerate=degenerate,
                           trivial_zero=trivial)
    scale = max(1.0, float(np.max(np.abs(G.values))))
    for name in ("v", "f"):
        if abs(cd[name]) > 1e-10 * scale and spacelike:
            fit.positivity_violations.append(
                f"{name} = {cd[name]:.3e} nonzero at space-like p")
    # reduced (product-form) parameters when w != 0: b -> b/w, a -> a - b^2/w
    if abs(cd["w"]) > 1e-14 * scale:
        fit.coefficients["b_reduced"] = cd["b"] / cd["w"]
        fit.coefficients["a_reduced"] = cd["a"] - cd["b"] ** 2 / cd["w"]
    return fit


def symmetric_model_product_form(p: FourVector, w: float, b: float, a: float) -> np.ndarray:
    """(g - b pp)(g - b pp) w + pppp a  — convenience for synthetic data."""
    pa = p.as_array()
    g = METRIC.astype(complex)
    core = g - b * np.einsum("m,n->mn", pa, pa)
    return (w * np.einsum("mn,sr->mnsr", core, core)
            + a * np.einsum("m,n,s,r->mnsr", pa, pa, pa, pa))


# ---------------------------------------------------------------------------
# antisymmetric rank 2


def _antisym_basis(pa: np.ndarray):
    g = METRIC.astype(complex)
    v_term = (np.einsum("ms,nr->mnsr", g, g) - np.einsum("ns,mr->mnsr", g, g))
    f_term = (np.einsum("m,s,nr->mnsr", pa, pa, g)
              - np.einsum("m,r,ns->mnsr", pa, pa, g)
              - np.einsum("n,s,mr->mnsr", pa, pa, g)
              + np.einsum("n,r,ms->mnsr", pa, pa, g))
    return EPSILON4.astype(complex), v_term, f_term


def decompose_antisymmetric(G: TensorCorrelation,
                            p: Optional[FourVector] = None) -> DecompositionFit:
    """Fit a eps + v (gg) + f (ppg); positivity at space-like p forces all
    three to vanish, i.e. the full correlation is zero."""
    if G.rank != "antisymmetric2":
        raise BoxQFTError("decompose_antisymmetric expects rank 'antisymmetric2'")
    p = p or G.p
    pa = p.as_array()
    degenerate = _degeneracy(p)
    eps, v_term, f_term = _antisym_basis(pa)
    coeffs, resid, cond, trivial = _lstsq([eps, v_term, f_term], G.values,
                                          real_params=False)
    cd = {"a": complex(coeffs[0]), "v": complex(coeffs[1]), "f": complex(coeffs[2])}
    fit = DecompositionFit(cd, resid, cond, "direct", degenerate=degenerate,
                           trivial_zero=trivial)
    scale = max(1.0, float(np.max(np.abs(G.values))))
    if classify_interval(p) is IntervalClass.SPACELIKE:
        for name, val in cd.items():
            if abs(val) > 1e-10 * scale:
                fit.positivity_violations.append(
                    f"{name} = {val:.3e} nonzero at space-like p")
    return fit


# ---------------------------------------------------------------------------
# noiseless projectors


def project_noiseless_vector(A: np.ndarray, p: FourVector) -> np.ndarray:
    """A~^m = (p.p) A^m - p^m (p.A); p.A~ = 0 identically."""
    A = np.asarray(A, dtype=complex)
    pa = p.as_array()
    s = minkowski_dot(p, p)
    p_dot_A = complex(pa @ (METRIC @ A))
    return s * A - pa.astype(complex) * p_dot_A


def project_noiseless_tensor(B: np.ndarray, p: FourVector,
                             conserved: bool = False) -> np.ndarray:
    """Project a symmetric tensor onto the noiseless subspace.

    General variant:
        B~ = (p.p)^2 B - (p.p)(g(p.p) - pp) trB/3 + (g(p.p) - 4pp)(pBp)/3
    annihilates both invariant noise structures (B~[g] = B~[pp] = 0).
    Conserved variant (for transverse B):
        B~ = (p.p) B - (g(p.p) - pp) trB/3
    is traceless identically and transverse on conserved input.
    """
    B = np.asarray(B, dtype=complex)
    if B.shape != (4, 4):
        raise BoxQFTError("tensor must be 4x4")
    pa = p.as_array()
    g = METRIC
    s = minkowski_dot(p, p)
    trB = complex(np.einsum("mn,mn->", g, B))
    pp = np.outer(pa, pa)
    if conserved:
        return s * B - (g * s - pp) * trB / 3.0
    pBp = complex(pa @ (g @ B @ g) @ pa)
    return (s ** 2 * B - s * (g * s - pp) * trB / 3.0
            + (g * s - 4.0 * pp) * pBp / 3.0)


@dataclass(frozen=True)
class NoiselessComponents:
    vector_indices: Tuple[int, ...]
    tensor_combinations: Tuple[Tuple[Tuple[float, Tuple[int, int]], ...], ...]


def noiseless_components(p: FourVector) -> NoiselessComponents:
    """Noiseless observables in the canonical frame p = (0,0,0,p3).

    Vector: the components A^0, A^1, A^2.  Symmetric tensor: B12, B01, B02,
    B11 - B22 and B00 + B11.
    """
    if abs(p.t) > 1e-12 or abs(p.x) > 1e-12 or abs(p.y) > 1e-12 or p.z == 0.0:
        raise RequiresCanonicalFrame("boost p to the form (0,0,0,q) first")
    combos = (
        ((1.0, (1, 2)),),
        ((1.0, (0, 1)),),
        ((1.0, (0, 2)),),
        ((1.0, (1, 1)), (-1.0, (2, 2))),
        ((1.0, (0, 0)), (1.0, (1, 1))),
    )
    return NoiselessComponents(vector_indices=(0, 1, 2),
                               tensor_combinations=combos)


# ---------------------------------------------------------------------------
# canonical frame helpers


def canonical_boost(p: FourVector) -> Tuple[np.ndarray, FourVector]:
    """Boost matrix along axis 3 sending p = (p0,0,0,p3), space-like, to the
    canonical frame (0,0,0,q)."""
    if abs(p.x) > 1e-12 or abs(p.y) > 1e-12:
        raise RequiresCanonicalFrame(
            "canonical boosts are implemented for p = (p0, 0, 0, p3)")
    if classify_interval(p) is not IntervalClass.SPACELIKE:
        raise RequiresCanonicalFrame("canonical frame exists for space-like p only")
    chi = math.atanh(p.t / p.z)
    lam = boost_matrix(chi, 3)
    p_can = FourVector.from_array(lam @ p.as_array())
    return lam, p_can


def boost_tensor(values: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Apply Lambda to every contravariant index."""
    v = np.asarray(values, dtype=complex)
    if v.shape == (4, 4):
        return np.einsum("am,bn,mn->ab", lam, lam, v)
    if v.shape == (4, 4, 4, 4):
        return np.einsum("am,bn,cs,dr,mnsr->abcd", lam, lam, lam, lam, v)
    raise BoxQFTError("unsupported tensor shape")
