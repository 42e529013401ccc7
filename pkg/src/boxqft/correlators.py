"""Contour-ordered free propagators, the Wick contraction engine, its
exact-diagonalization oracle, Keldysh momentum-space propagators and the
closed-form three-point stress-field correlation.

Thermal two-point building blocks (t later than t' on the contour):

    <A(t) A+(t')>  =  e^{i(t'-t)E} / (1 - e^{-beta E})      bosons
    <A+(t) A(t')>  =  e^{i(t-t')E} / (e^{beta E} - 1)
    <psi(t) psi+(t')> =  e^{i(t'-t)E} / (1 + e^{-beta E})   fermions
    <psi+(t) psi(t')> = -e^{i(t-t')E} / (e^{beta E} + 1)

Same-kind pairs vanish identically.  n-point functions are sums over perfect
matchings of these pair values, fermionic matchings weighted by the permutation
sign.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp

from .errors import BoxQFTError, MomentumMismatch
from .fock import FockSpace, Species, thermal_state
from .spacetime import METRIC, CTPTime, FourVector, minkowski_dot


@dataclass(frozen=True)
class Insertion:
    """One ladder-operator insertion on the contour."""
    kind: str                  # "a" annihilate / "c" create
    species: Species
    mode: Tuple[str, Tuple[int, ...]]     # (channel, mode indices)
    energy: float
    time: CTPTime


def insertion(space: FockSpace, channel: str, n, kind: str, time: CTPTime) -> Insertion:
    n = tuple(n)
    grid = space.grid(channel)
    return Insertion(kind=kind, species=grid.species, mode=(channel, n),
                     energy=grid.energy(n), time=time)


# ---------------------------------------------------------------------------
# thermal occupation factors


def _bose_plus(E: float, beta: float) -> float:
    # 1/(1 - e^{-beta E}) -> 1 at beta = inf
    if math.isinf(beta):
        return 1.0
    return 1.0 / (1.0 - math.exp(-beta * E))


def _bose_minus(E: float, beta: float) -> float:
    # 1/(e^{beta E} - 1) -> 0 at beta = inf
    if math.isinf(beta):
        return 0.0
    return 1.0 / (math.exp(beta * E) - 1.0)


def _fermi_plus(E: float, beta: float) -> float:
    if math.isinf(beta):
        return 1.0
    return 1.0 / (1.0 + math.exp(-beta * E))


def _fermi_minus(E: float, beta: float) -> float:
    if math.isinf(beta):
        return 0.0
    return 1.0 / (math.exp(beta * E) + 1.0)


@dataclass(frozen=True)
class CTPPropagator:
    """Thermal pair contraction factors for one mode energy.

    The four displayed off-diagonal factors (first operator later on the
    contour): 1/(1-e^{-beta E}) and 1/(e^{beta E}-1) for bosons,
    1/(1+e^{-beta E}) and -1/(e^{beta E}+1) for fermions; the fermionic
    minus sign is the contour-reordering sign of the canonical (psi, psi+)
    pair.
    """
    species: Species
    energy: float
    beta: float

    def annihilator_later_factor(self) -> float:
        if self.species is Species.BOSON:
            return _bose_plus(self.energy, self.beta)
        return _fermi_plus(self.energy, self.beta)

    def creator_later_factor(self) -> float:
        if self.species is Species.BOSON:
            return _bose_minus(self.energy, self.beta)
        return -_fermi_minus(self.energy, self.beta)


def free_propagator(species: Species, energy: float, t: CTPTime, tp: CTPTime,
                    beta: float, kinds: Tuple[str, str] = ("a", "c")) -> complex:
    """Contour-ordered pair <T op(t) op'(tp)> for a single mode.

    kinds gives the operator kinds of (t, tp) in written order.  The value
    is e^{i(t_dag - t_other) E} times the thermal factor selected by which
    operator is later on the contour; a written order (create, annihilate)
    flips the overall sign for fermions (antisymmetry of the contraction).
    Written-order ties on s treat the first operator as later.
    """
    k1, k2 = kinds
    if k1 == k2:
        return 0.0
    prop = CTPPropagator(species, energy, beta)
    if k1 == "c":
        t_dag, t_oth = t, tp
        dag_later = t.s >= tp.s
        written_sign = -1.0 if species is Species.FERMION else 1.0
    else:
        t_dag, t_oth = tp, t
        dag_later = tp.s > t.s
        written_sign = 1.0
    phase = cmath.exp(1j * (t_dag.t - t_oth.t) * energy)
    factor = prop.creator_later_factor() if dag_later \
        else prop.annihilator_later_factor()
    return written_sign * phase * factor


def _pair_value(a: Insertion, b: Insertion, beta: float) -> complex:
    """<T a b> for two insertions in list order (a first)."""
    if a.species is not b.species or a.mode != b.mode:
        return 0.0
    return free_propagator(a.species, a.energy, a.time, b.time, beta,
                           kinds=(a.kind, b.kind))


# ---------------------------------------------------------------------------
# perfect matchings


def perfect_matchings(n: int):
    """All pairings of range(2n), iteratively (no recursion depth limits)."""
    if n == 0:
        yield []
        return
    stack = [([], list(range(2 * n)))]
    while stack:
        pairing, left = stack.pop()
        if not left:
            yield pairing
            continue
        first = left[0]
        for i in range(1, len(left)):
            rest = left[1:i] + left[i + 1:]
            stack.append((pairing + [(first, left[i])], rest))


def _matching_sign(matching: Sequence[Tuple[int, int]],
                   fermionic: Sequence[bool]) -> float:
    """Sign of the permutation of fermionic insertions induced by a matching."""
    order = []
    for i, j in sorted(matching):
        order.extend((i, j))
    seq = [p for p in order if fermionic[p]]
    # parity by counting inversions
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq))
              if seq[i] > seq[j])
    return -1.0 if inv % 2 else 1.0


def wick_npoint(insertions: Sequence[Insertion], beta: float) -> complex:
    """Contour-ordered n-point function as a sum over perfect matchings.

    Odd insertion counts vanish.  Pair values are memoized; the cost is
    (2n-1)!! matching terms, fine for n <= 5 pairs.
    """
    m = len(insertions)
    if m % 2 == 1:
        return 0.0
    n = m // 2
    fermionic = [ins.species is Species.FERMION for ins in insertions]
    cache: Dict[Tuple[int, int], complex] = {}

    def pair(i: int, j: int) -> complex:
        key = (i, j)
        if key not in cache:
            cache[key] = _pair_value(insertions[i], insertions[j], beta)
        return cache[key]

    total = 0.0 + 0.0j
    for matching in perfect_matchings(n):
        prod = 1.0 + 0.0j
        for i, j in matching:
            prod *= pair(i, j)
            if prod == 0.0:
                break
        if prod == 0.0:
            continue
        total += _matching_sign(matching, fermionic) * prod
    return complex(total)


# ---------------------------------------------------------------------------
# exact-diagonalization oracle


def exact_contour_correlator(space: FockSpace, insertions: Sequence[Insertion],
                             beta: float) -> complex:
    """Tr[rho T(prod insertions)] by direct operator algebra.

    Contour ordering places larger s leftmost (ties keep written order);
    the fermionic reordering sign is the parity of the applied permutation
    restricted to fermionic insertions.  H0 is diagonal, so Heisenberg
    evolution is a diagonal phase even at complex times.
    """
    order = sorted(range(len(insertions)),
                   key=lambda i: (-insertions[i].time.s, i))
    fermions = [i for i in range(len(insertions))
                if insertions[i].species is Species.FERMION]
    seq = [i for i in order if i in set(fermions)]
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq))
              if seq[i] > seq[j])
    sign = -1.0 if inv % 2 else 1.0

    energies = space.energies
    mat = sp.identity(space.dim, dtype=complex, format="csr")
    for idx in order:
        ins = insertions[idx]
        ch, n = ins.mode
        op = space.annihilation(ch, n) if ins.kind == "a" else space.creation(ch, n)
        t = ins.time.t
        # e^{iHt} op e^{-iHt}
        left = np.exp(1j * energies * t)
        right = np.exp(-1j * energies * t)
        evolved = sp.diags(left) @ op @ sp.diags(right)
        mat = mat @ evolved
    rho = thermal_state(space, beta)
    val = complex(np.sum(rho.diagonal * mat.diagonal()))
    return sign * val


# ---------------------------------------------------------------------------
# ordering schemes


class OrderingScheme(Enum):
    CONTOUR_ORDERED = "contour"       # first-listed operator latest
    KELDYSH_SYMMETRIC = "keldysh_c"   # each operator averaged over +- branches
    FULLY_SYMMETRIZED = "symmetric"   # average over all orderings
    THREE_BRANCH = "three_branch"     # fixed branch per listed position


def ordering_average(op_specs: Sequence[Tuple[str, str, Tuple[int, ...], float]],
                     scheme: OrderingScheme, beta: float, space: FockSpace,
                     engine=wick_npoint) -> complex:
    """Evaluate <...> for operators at real times under an ordering scheme.

    op_specs rows: (kind, channel, mode, real_time).  The scheme fixes how
    the operators are distributed over contour branches; `engine` may be the
    Wick engine or the exact oracle (same call signature).
    """
    from .spacetime import ctp_contour

    n = len(op_specs)
    if scheme is OrderingScheme.CONTOUR_ORDERED:
        # written order is contour order: first operator latest
        return engine(_ordered_insertions(space, op_specs), beta)
    if scheme is OrderingScheme.KELDYSH_SYMMETRIC:
        contour = ctp_contour(beta, 2)
        total = 0.0 + 0.0j
        for branches in itertools.product((0, 1), repeat=n):
            ins = [insertion(space, ch, mode, kind, contour.time(b, t))
                   for (kind, ch, mode, t), b in zip(op_specs, branches)]
            total += engine(ins, beta)
        return total / 2 ** n
    if scheme is OrderingScheme.FULLY_SYMMETRIZED:
        total = 0.0 + 0.0j
        for perm in itertools.permutations(range(n)):
            reordered = [op_specs[i] for i in perm]
            total += engine(_ordered_insertions(space, reordered), beta)
        return total / math.factorial(n)
    raise BoxQFTError(f"scheme {scheme} not supported here")


def _ordered_insertions(space, op_specs):
    """Insertions at their real times on a generalized contour whose branch
    structure forces the written order (first = latest on the contour)."""
    out = []
    n = len(op_specs)
    for pos, (kind, ch, mode, t) in enumerate(op_specs):
        out.append(Insertion(kind=kind, species=space.grid(ch).species,
                             mode=(ch, tuple(mode)),
                             energy=space.grid(ch).energy(tuple(mode)),
                             time=CTPTime(branch=pos, t=complex(t),
                                          s=float(n - pos))))
    return out


# ---------------------------------------------------------------------------
# Keldysh momentum-space propagators (zero temperature, continuum notation)


@dataclass(frozen=True)
class KeldyshPropagator:
    """Structured descriptor of a zero-temperature scalar contour propagator.

    shell_constant multiplies delta(p.p - m^2) (with forward_cone adding a
    theta(p0) restriction); rational indicates the i/(p.p - m^2) part with
    the p0 -> p0 - i*eps prescription.  In box normalization the continuum
    deltas become V*delta_Kronecker/(2 pi)^D weights (norm_tag records this).
    """
    component: str
    mass: float
    shell_constant: float
    forward_cone: bool
    rational: bool
    norm_tag: str

    def rational_value(self, p: FourVector, eps: float = 0.0) -> complex:
        if not self.rational:
            return 0.0
        s = minkowski_dot(p, p)
        if eps == 0.0:
            return 1j / (s - self.mass ** 2)
        # p0 -> p0 - i eps
        p0 = p.t - 1j * eps
        s_eps = p0 * p0 - float(p.spatial @ p.spatial)
        return 1j / (s_eps - self.mass ** 2)

    def on_shell_weight(self, p: FourVector, tol: float = 1e-9) -> float:
        """Support indicator of the delta part at the given momentum."""
        if self.shell_constant == 0.0:
            return 0.0
        if abs(minkowski_dot(p, p) - self.mass ** 2) > tol:
            return 0.0
        if self.forward_cone and p.t <= 0:
            return 0.0
        return self.shell_constant


def keldysh_scalar_propagators(component: str, m: float) -> KeldyshPropagator:
    """Zero-temperature scalar propagators by Keldysh component.

    '+-' : (2 pi)^5 delta(q.q - m^2) theta(q0) on-shell weight
    'cc' : 16 pi^5 delta(q.q - m^2), both cones
    'cq' : (2 pi)^4 * i/(q+.q+ - m^2), q0+ = q0 - i eps
    'qq' : 0 identically
    """
    tag = "continuum:(2pi)^4 delta(p+q); box: V*delta_K/(2pi)^D"
    if component == "+-":
        return KeldyshPropagator(component, m, (2 * math.pi) ** 5, True, False, tag)
    if component == "cc":
        return KeldyshPropagator(component, m, 16 * math.pi ** 5, False, False, tag)
    if component == "cq":
        return KeldyshPropagator(component, m, 0.0, False, True, tag)
    if component == "qq":
        return KeldyshPropagator(component, m, 0.0, False, False, tag)
    raise BoxQFTError("component must be one of '+-', 'cc', 'cq', 'qq'")


# ---------------------------------------------------------------------------
# three-point <T^{mu nu}(k) phi(-p) phi(-q)>


@dataclass(frozen=True)
class ThreePointResult:
    """Closed-form pieces of the three-point correlation, up to the overall
    contour constant (which the source normalization leaves unfixed).

    numerator: p^mu q^nu (symmetrized) - g^{mu nu} (p.q + m^2)/2
    denominator: (p.p - m^2)(q.q - m^2)        [Keldysh-symmetric scheme]
    onshell_prefactor: the same numerator combination evaluated on the
    middle-branch on-shell term of the three-branch ordering.
    """
    numerator: complex
    denominator: complex
    value: complex
    onshell_prefactor: Optional[complex] = None


def _three_point_numerator(p: FourVector, q: FourVector, mu: int, nu: int,
                           m: float) -> complex:
    pa, qa = p.as_array(), q.as_array()
    sym = 0.5 * (pa[mu] * qa[nu] + pa[nu] * qa[mu])
    return sym - METRIC[mu, nu] * (minkowski_dot(p, q) + m * m) / 2.0


def three_point_T_phi_phi(k: FourVector, p: FourVector, q: FourVector,
                          mu: int, nu: int, m: float,
                          scheme: OrderingScheme = OrderingScheme.KELDYSH_SYMMETRIC,
                          tol: float = 1e-12) -> ThreePointResult:
    """Stress-field three-point correlation at tree level.

    Requires p + q = k.  For the Keldysh-symmetric scheme the result is the
    rational expression numerator/denominator; for the three-branch scheme
    the additional on-shell middle-branch term is returned through
    onshell_prefactor (nonzero at E = sqrt(m^2 + |k|^2/4) kinematics).
    """
    mismatch = (p + q - k).norm_sq_euclidean()
    if mismatch > tol:
        raise MomentumMismatch(f"p + q != k (Euclidean residue {mismatch})")
    num = _three_point_numerator(p, q, mu, nu, m)
    den = (minkowski_dot(p, p) - m * m) * (minkowski_dot(q, q) - m * m)
    value = num / den if den != 0 else complex("inf")
    onshell = None
    if scheme is OrderingScheme.THREE_BRANCH:
        onshell = _three_point_numerator(p, q, mu, nu, m)
    return ThreePointResult(numerator=num, denominator=den, value=value,
                            onshell_prefactor=onshell)


def three_point_combination(k: FourVector, p: FourVector, q: FourVector,
                            weights: Sequence[Tuple[float, Tuple[int, int]]],
                            m: float,
                            scheme: OrderingScheme = OrderingScheme.KELDYSH_SYMMETRIC
                            ) -> ThreePointResult:
    """Weighted component combination, e.g. ((2,(0,0)),(1,(1,1)),(1,(2,2)))
    for the noiseless combination 2*T00 + T11 + T22."""
    num = sum(w * _three_point_numerator(p, q, mu, nu, m)
              for w, (mu, nu) in weights)
    den = (minkowski_dot(p, p) - m * m) * (minkowski_dot(q, q) - m * m)
    mismatch = (p + q - k).norm_sq_euclidean()
    if mismatch > 1e-12:
        raise MomentumMismatch("p + q != k")
    value = num / den if den != 0 else complex("inf")
    onshell = num if scheme is OrderingScheme.THREE_BRANCH else None
    return ThreePointResult(numerator=num, denominator=den, value=value,
                            onshell_prefactor=onshell)
