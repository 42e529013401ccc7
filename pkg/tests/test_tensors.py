import json

import numpy as np
import pytest

from boxqft.errors import (BoxQFTError, DegenerateBasis,
                           RequiresCanonicalFrame)
from boxqft.spacetime import METRIC, FourVector
from boxqft.tensors import (EPSILON4, TensorCorrelation, boost_tensor,
                            canonical_boost, decompose_antisymmetric,
                            decompose_symmetric, decompose_vector,
                            noiseless_components, project_noiseless_tensor,
                            project_noiseless_vector,
                            symmetric_model_product_form)

P_CANON = FourVector(0.0, 0.0, 0.0, 1.0)


def vector_model(p, eta, xi):
    pa = p.as_array()
    return eta * np.outer(pa, pa) - xi * METRIC


def antisym_model(p, a, v, f):
    pa = p.as_array()
    g = METRIC.astype(complex)
    vt = np.einsum("ms,nr->mnsr", g, g) - np.einsum("ns,mr->mnsr", g, g)
    ft = (np.einsum("m,s,nr->mnsr", pa, pa, g)
          - np.einsum("m,r,ns->mnsr", pa, pa, g)
          - np.einsum("n,s,mr->mnsr", pa, pa, g)
          + np.einsum("n,r,ms->mnsr", pa, pa, g))
    return a * EPSILON4 + v * vt + f * ft


def test_vector_fit_exact_model():
    G = vector_model(P_CANON, 2.5, 0.0)
    fit = decompose_vector(TensorCorrelation("vector", P_CANON, G))
    assert abs(fit.coefficients["eta"] - 2.5) < 1e-12
    assert abs(fit.coefficients["xi"]) < 1e-12
    assert fit.residual < 1e-12
    assert not fit.positivity_violations


def test_vector_fit_flags_positivity_violation():
    G = vector_model(P_CANON, 0.5, 1.0)
    fit = decompose_vector(TensorCorrelation("vector", P_CANON, G))
    assert abs(fit.coefficients["xi"] - 1.0) < 1e-10
    assert fit.positivity_violations
    # frame check: G00 = -xi < 0 while G11 = +xi > 0 cannot both be variances
    assert G[0, 0].real == -1.0 and G[1, 1].real == 1.0


def test_vector_conservation_identity():
    # transverse data satisfies xi = eta * (p.p); the positivity zero xi = 0
    # then forces eta = 0
    p = P_CANON
    pa = p.as_array()
    s = p.dot(p)
    c = 1.7
    G = c * (METRIC - np.outer(pa, pa) / s)
    div = np.array([sum(METRIC[m, m] * pa[m] * G[m, n] for m in range(4))
                    for n in range(4)])
    assert np.max(np.abs(div)) < 1e-14
    fit = decompose_vector(TensorCorrelation("vector", p, G), conserved=True)
    eta, xi = fit.coefficients["eta"], fit.coefficients["xi"]
    assert abs(xi - eta * s) < 1e-12


def test_vector_degenerate_cases():
    light = FourVector(1.0, 0, 0, 1.0)
    fit = decompose_vector(TensorCorrelation("vector", light,
                                             vector_model(light, 1.0, 0.0)))
    assert fit.degenerate  # flagged, not rejected
    with pytest.raises(DegenerateBasis):
        decompose_vector(TensorCorrelation("vector", FourVector(),
                                           np.zeros((4, 4))))


def test_symmetric_fit_product_form():
    G = symmetric_model_product_form(P_CANON, w=1.0, b=0.3, a=0.2)
    fit = decompose_symmetric(TensorCorrelation("symmetric2", P_CANON, G))
    assert fit.residual < 1e-12
    assert abs(fit.coefficients["w"] - 1.0) < 1e-10
    assert abs(fit.coefficients["b_reduced"] - 0.3) < 1e-10
    assert abs(fit.coefficients["a_reduced"] - 0.2) < 1e-10
    assert abs(fit.coefficients["v"]) < 1e-10
    assert abs(fit.coefficients["f"]) < 1e-10
    assert not fit.positivity_violations


def test_symmetric_fit_flags_v_f():
    pa = P_CANON.as_array()
    g = METRIC.astype(complex)
    v_term = np.einsum("ms,nr->mnsr", g, g) + np.einsum("ns,mr->mnsr", g, g)
    G = symmetric_model_product_form(P_CANON, 1.0, 0.0, 0.0) + 0.5 * v_term
    fit = decompose_symmetric(TensorCorrelation("symmetric2", P_CANON, G))
    assert abs(fit.coefficients["v"] - 0.5) < 1e-10
    assert fit.positivity_violations


def test_symmetric_conserved_reduction():
    p = P_CANON
    pa = p.as_array()
    s = p.dot(p)
    proj = METRIC - np.outer(pa, pa) / s
    G = 0.8 * np.einsum("mn,sr->mnsr", proj, proj)
    fit = decompose_symmetric(TensorCorrelation("symmetric2", p, G),
                              conserved=True)
    assert abs(fit.coefficients["w"] - 0.8) < 1e-12
    assert fit.residual < 1e-12
    # transversality of the model
    div = np.einsum("m,mn,mnsr->nsr", pa, METRIC, G)
    assert np.max(np.abs(div)) < 1e-13


def test_symmetric_complex_b_at_timelike():
    p = FourVector(2.0, 0.0, 0.0, 1.0)  # time-like
    pa = p.as_array()
    g = METRIC.astype(complex)
    b = 0.2 + 0.4j
    pp = np.einsum("m,n->mn", pa, pa)
    G = (np.einsum("mn,sr->mnsr", g, g)
         - b * np.einsum("mn,sr->mnsr", pp, g)
         - np.conj(b) * np.einsum("mn,sr->mnsr", g, pp))
    fit = decompose_symmetric(TensorCorrelation("symmetric2", p, G))
    assert abs(fit.coefficients["b"] - b) < 1e-10
    assert abs(fit.coefficients["w"] - 1.0) < 1e-10
    # at space-like p the same fit constrains b to be real
    ps = P_CANON
    Gs = symmetric_model_product_form(ps, 1.0, 0.25, 0.0)
    fits = decompose_symmetric(TensorCorrelation("symmetric2", ps, Gs))
    assert abs(fits.coefficients["b"].imag) == 0.0


def test_antisymmetric_fit_and_flags():
    G = antisym_model(P_CANON, 1.0, 0.0, 0.0)
    corr = TensorCorrelation("antisymmetric2", P_CANON, G)
    assert corr.symmetry_defect() < 1e-12
    fit = decompose_antisymmetric(corr)
    assert abs(fit.coefficients["a"] - 1.0) < 1e-10
    assert fit.positivity_violations  # nonzero a at space-like p is flagged
    # epsilon antisymmetry: G^{0123} = a = -G^{1023}
    assert abs(G[0, 1, 2, 3] - 1.0) < 1e-14
    assert abs(G[1, 0, 2, 3] + 1.0) < 1e-14


def test_antisymmetric_recovery_all():
    G = antisym_model(P_CANON, 0.3, -0.7, 0.4)
    fit = decompose_antisymmetric(TensorCorrelation("antisymmetric2", P_CANON, G))
    assert abs(fit.coefficients["a"] - 0.3) < 1e-10
    assert abs(fit.coefficients["v"] + 0.7) < 1e-10
    assert abs(fit.coefficients["f"] - 0.4) < 1e-10
    assert fit.residual < 1e-10


def test_rank_validation():
    with pytest.raises(BoxQFTError):
        TensorCorrelation("vector", P_CANON, np.zeros((4, 4, 4, 4)))
    with pytest.raises(BoxQFTError):
        decompose_vector(TensorCorrelation("symmetric2", P_CANON,
                                           np.zeros((4, 4, 4, 4))))


def test_project_noiseless_vector_examples():
    q = 1.3
    p = FourVector(0, 0, 0, q)
    A = np.array([0.7, 0.0, 0.0, -1.1], dtype=complex)
    At = project_noiseless_vector(A, p)
    assert abs(At[0] - (-q * q * 0.7)) < 1e-14
    assert abs(At[3]) < 1e-14
    # longitudinal annihilation
    Ap = project_noiseless_vector(p.as_array().astype(complex), p)
    assert np.max(np.abs(Ap)) < 1e-14
    # p.A~ = 0 for 1000 random inputs, relative
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(1000):
        pr = FourVector(*rng.normal(size=4))
        Ar = rng.normal(size=4) + 1j * rng.normal(size=4)
        Atr = project_noiseless_vector(Ar, pr)
        num = abs(complex(pr.as_array() @ (METRIC @ Atr)))
        den = np.linalg.norm(pr.as_array()) * np.linalg.norm(Atr)
        if den > 0:
            worst = max(worst, num / den)
    assert worst < 1e-12


def test_project_noiseless_tensor_kills_noise_structures():
    p = FourVector(0.2, 0.0, 0.0, 1.4)
    pa = p.as_array()
    # the general projector annihilates both invariant noise structures
    for B in (METRIC.astype(complex), np.outer(pa, pa).astype(complex)):
        out = project_noiseless_tensor(B, p)
        assert np.max(np.abs(out)) < 1e-12
    # conserved variant: traceless identically, transverse on conserved input
    rng = np.random.default_rng(17)
    B = rng.normal(size=(4, 4))
    B = (B + B.T) / 2
    proj = np.eye(4) - np.outer(pa, METRIC @ pa) / p.dot(p)
    Bt = proj @ B @ proj.T
    out = project_noiseless_tensor(Bt, p, conserved=True)
    assert abs(np.einsum("mn,mn->", METRIC, out)) < 1e-12
    assert np.max(np.abs(pa @ METRIC @ out)) < 1e-12
    # trace removal for the g input under the conserved variant
    outg = project_noiseless_tensor(METRIC.astype(complex), p, conserved=True)
    assert abs(np.einsum("mn,mn->", METRIC, outg)) < 1e-12


def test_noiseless_components_lists():
    comps = noiseless_components(FourVector(0, 0, 0, 2.0))
    assert comps.vector_indices == (0, 1, 2)
    combos = comps.tensor_combinations
    assert ((1.0, (1, 2)),) in combos
    assert ((1.0, (1, 1)), (-1.0, (2, 2))) in combos
    assert ((1.0, (0, 0)), (1.0, (1, 1))) in combos
    assert len(combos) == 5
    with pytest.raises(RequiresCanonicalFrame):
        noiseless_components(FourVector(0.5, 0, 0, 2.0))


def test_canonical_boost_and_frame_independence():
    p = FourVector(0.6, 0.0, 0.0, 1.5)  # space-like, axis-3 aligned
    lam, p_can = canonical_boost(p)
    assert abs(p_can.t) < 1e-12
    assert abs(p_can.dot(p_can) - p.dot(p)) < 1e-12
    # fitting covariant synthetic data directly or in the canonical frame
    # gives the same invariant coefficients
    G = symmetric_model_product_form(p, w=1.2, b=0.1, a=0.05)
    fit_direct = decompose_symmetric(TensorCorrelation("symmetric2", p, G))
    G_can = boost_tensor(G, lam)
    fit_can = decompose_symmetric(TensorCorrelation("symmetric2", p_can, G_can))
    for key in ("w", "b_reduced", "a_reduced", "v", "f"):
        assert abs(fit_direct.coefficients[key]
                   - fit_can.coefficients[key]) < 1e-9
    with pytest.raises(RequiresCanonicalFrame):
        canonical_boost(FourVector(2.0, 0, 0, 1.0))
    with pytest.raises(RequiresCanonicalFrame):
        canonical_boost(FourVector(0.1, 0.5, 0, 1.5))


def test_noiseless_combination_covariance():
    # a canonical-frame noiseless combination, pulled back through the boost,
    # annihilates covariant noise data in the original frame
    p = FourVector(0.6, 0.0, 0.0, 1.5)
    lam, p_can = canonical_boost(p)
    G = symmetric_model_product_form(p, w=0.9, b=0.2, a=0.1)
    G_can = boost_tensor(G, lam)
    for combo in noiseless_components(p_can).tensor_combinations:
        val = sum(w1 * w2 * G_can[m1, n1, m2, n2]
                  for (w1, (m1, n1)) in combo for (w2, (m2, n2)) in combo)
        assert abs(val) < 1e-10


def test_fit_report_json():
    G = vector_model(P_CANON, 1.0, 0.0)
    fit = decompose_vector(TensorCorrelation("vector", P_CANON, G))
    doc = json.loads(fit.to_json())
    assert set(doc) >= {"coefficients", "residual", "condition_number",
                        "frame", "positivity_violations"}
    assert doc["coefficients"]["eta"][0] == pytest.approx(1.0)
