import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from qlsi.converse import (
    CQCode,
    HypothesisInstance,
    QuantumTest,
    alt_check,
    beta_lower_bound,
    code_from_doc,
    code_mutual_information,
    cq_converse_check,
    gamma_infinity,
    instance_from_doc,
    instance_to_doc,
    mutual_information,
    np_oracle,
    pgm_decoder,
    qht_bound_rhs,
    random_test,
    strong_converse_exponent_f,
    tensor_power,
)
from qlsi.errors import DomainError, ParameterError, ResourceLimitError
from qlsi.operator_core import matrix_to_doc, random_density, random_positive_definite
from qlsi.rng import substream

RHO = np.diag([0.5, 0.5])
SIGMA = np.diag([0.25, 0.75])
THETA = math.pi / 8
ROT = np.array([[math.cos(THETA), -math.sin(THETA)], [math.sin(THETA), math.cos(THETA)]])
SIGMA_ROT = ROT @ SIGMA @ ROT.T

PURE0 = np.array([[1.0, 0.0], [0.0, 0.0]])
PURE1 = np.array([[0.0, 0.0], [0.0, 1.0]])


def test_gamma_examples():
    assert gamma_infinity(RHO, RHO) == pytest.approx(1.0, abs=1e-12)
    assert gamma_infinity(RHO, SIGMA) == pytest.approx(2.0, abs=1e-12)


def test_gamma_dominates_spectral_radius():
    for k in range(20):
        rng = substream(3, k)
        rho = random_density(3, rng, 0.05)
        sigma = random_density(3, rng, 0.05)
        w, v = np.linalg.eigh(sigma.mat)
        sim = (v / np.sqrt(w)) @ v.conj().T @ rho.mat @ (v / np.sqrt(w)) @ v.conj().T
        radius = np.abs(np.linalg.eigvalsh((sim + sim.conj().T) / 2.0)).max()
        assert gamma_infinity(rho, sigma) >= radius - 1e-10


def test_instance_fields_and_limits():
    inst = HypothesisInstance(RHO, SIGMA, 3)
    assert inst.gamma == pytest.approx(2.0, abs=1e-12)
    assert inst.rel_ent == pytest.approx(0.5 * math.log(4.0 / 3.0), abs=1e-12)
    assert not inst.gamma_below_one
    with pytest.raises(ResourceLimitError):
        HypothesisInstance(RHO, SIGMA, 7)
    with pytest.raises(ParameterError):
        HypothesisInstance(RHO, SIGMA, 0)


def test_quantum_test_clipping():
    inst = HypothesisInstance(RHO, SIGMA, 1)
    t = QuantumTest(np.diag([1.0 + 5e-11, -5e-11]), inst)
    assert np.linalg.eigvalsh(t.t).min() >= 0.0
    assert np.linalg.eigvalsh(t.t).max() <= 1.0
    assert t.alpha == pytest.approx(0.5, abs=1e-9)
    assert t.beta == pytest.approx(0.25, abs=1e-9)
    with pytest.raises(DomainError):
        QuantumTest(np.diag([1.5, 0.0]), inst)


def test_qht_bound_rhs():
    inst = HypothesisInstance(RHO, SIGMA, 3)
    assert qht_bound_rhs(inst, 1.0) == pytest.approx(-3 * inst.rel_ent, abs=1e-12)
    assert qht_bound_rhs(inst, 0.0) == -math.inf
    same = HypothesisInstance(RHO, RHO, 2)
    eps = 0.2
    expected = math.log(1 - eps) - 2.0 * math.sqrt(2 * math.log(1 / (1 - eps)))
    assert qht_bound_rhs(same, 1 - eps) == pytest.approx(expected, abs=1e-12)


def test_beta_lower_bound_limits():
    inst = HypothesisInstance(RHO, SIGMA, 2)
    tiny = beta_lower_bound(inst, 1e-12)
    assert tiny == pytest.approx(math.exp(-2 * inst.rel_ent), rel=1e-4)
    same = HypothesisInstance(RHO, RHO, 3)
    for eps in (0.1, 0.3):
        assert beta_lower_bound(same, eps) <= 1 - eps + 1e-12
    with pytest.raises(ParameterError):
        beta_lower_bound(inst, 0.0)


def test_strong_converse_exponent():
    d = 0.3
    assert strong_converse_exponent_f(2.0, d, d) == 0.0
    assert strong_converse_exponent_f(2.0, d + 1.0, d) == pytest.approx(
        5.0 - 2.0 * math.sqrt(6.0), abs=1e-12
    )
    with pytest.raises(ParameterError):
        strong_converse_exponent_f(2.0, d - 0.1, d)


@given(st.floats(min_value=0.01, max_value=3.0), st.floats(min_value=0.5, max_value=5.0))
def test_strong_converse_exponent_increasing(gamma, excess):
    f1 = strong_converse_exponent_f(gamma, excess, 0.0)
    f2 = strong_converse_exponent_f(gamma, excess + 0.25, 0.0)
    assert f2 > f1


def test_exponent_consistency_with_oracle_tests():
    # a test with type-II error e^(-n r) at r above the divergence must have
    # type-I error at least 1 - e^(-n f)
    for n in (1, 2, 3):
        inst = HypothesisInstance(RHO, SIGMA_ROT, n)
        for eps in (0.2, 0.5, 0.8):
            beta, test = np_oracle(RHO, SIGMA_ROT, n, eps)
            r = -math.log(beta) / n
            if r <= inst.rel_ent:
                continue
            f = strong_converse_exponent_f(inst.gamma, r, inst.rel_ent)
            assert test.alpha >= 1.0 - math.exp(-n * f) - 1e-9


def test_np_oracle_equal_states():
    beta, test = np_oracle(RHO, RHO, 1, 0.1)
    assert beta == pytest.approx(0.9, abs=1e-9)
    assert test.alpha == pytest.approx(0.1, abs=1e-9)


def test_np_oracle_matches_classical():
    p = np.array([0.5, 0.5])
    q = np.array([0.25, 0.75])
    for n in (1, 2, 3, 4):
        for eps in (0.05, 0.1, 0.3):
            beta, test = np_oracle(np.diag(p), np.diag(q), n, eps)
            assert test.alpha == pytest.approx(eps, abs=1e-9)
            assert beta == pytest.approx(oracles.neyman_pearson(p, q, n, eps), abs=1e-9)


def test_np_oracle_dominates_bound():
    for sigma in (SIGMA, SIGMA_ROT):
        for n in (1, 2, 3, 4, 5):
            inst = HypothesisInstance(RHO, sigma, n)
            for eps in (0.05, 0.1, 0.3):
                beta, _ = np_oracle(RHO, sigma, n, eps)
                assert beta >= beta_lower_bound(inst, eps) - 1e-12


def test_np_oracle_optimality_against_grid():
    # dense sweep over the real qubit test family (eigenvalues a, b and
    # eigenbasis angle); no feasible test beats the oracle
    eps = 0.1
    beta_opt, test = np_oracle(RHO, SIGMA_ROT, 1, eps)
    assert test.alpha == pytest.approx(eps, abs=1e-9)
    best_grid = math.inf
    for a in np.linspace(0.0, 1.0, 21):
        for b in np.linspace(0.0, 1.0, 21):
            for ang in np.linspace(0.0, math.pi, 41):
                c, s = math.cos(ang), math.sin(ang)
                basis = np.array([[c, -s], [s, c]])
                t = basis @ np.diag([a, b]) @ basis.T
                alpha = 1.0 - float(np.trace(t @ RHO).real)
                if alpha <= eps + 1e-12:
                    best_grid = min(best_grid, float(np.trace(t @ SIGMA_ROT).real))
    assert best_grid >= beta_opt - 1e-6


def test_alt_margins():
    rng = substream(7)
    a = random_positive_definite(3, rng).mat
    b = random_positive_definite(3, rng).mat
    assert abs(alt_check(a, b, 1.0)) <= 1e-9
    da = np.diag(np.diag(a))
    db = np.diag(np.abs(np.diag(b)))
    for r in (0.2, 0.5, 0.8):
        assert abs(alt_check(da, db, r)) <= 1e-10
    worst = math.inf
    for k in range(500):
        rng = substream(11, k)
        g1 = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        g2 = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        r = (0.1, 0.3, 0.5, 0.7, 0.9)[k % 5]
        worst = min(worst, alt_check(g1 @ g1.conj().T, g2 @ g2.conj().T, r))
    assert worst >= -1e-9
    with pytest.raises(ParameterError):
        alt_check(a, b, 1.2)


def test_mutual_information_values():
    assert mutual_information([RHO, RHO], [0.5, 0.5]) == pytest.approx(0.0, abs=1e-12)
    assert mutual_information([PURE0, PURE1], [0.5, 0.5]) == pytest.approx(
        math.log(2.0), abs=1e-12
    )
    prod = [np.kron(a, b) for a in (PURE0, PURE1) for b in (PURE0, PURE1)]
    assert mutual_information(prod, [0.25] * 4) == pytest.approx(
        2.0 * math.log(2.0), abs=1e-8
    )
    with pytest.raises(ParameterError):
        mutual_information([PURE0, PURE1], [0.7, 0.7])


def test_mutual_information_additivity_random():
    rng = substream(13)
    states = [random_density(2, substream(13, k), 0.05).mat for k in range(2)]
    prior = np.array([0.3, 0.7])
    single = mutual_information(states, prior)
    prod_states = [np.kron(a, b) for a in states for b in states]
    prod_prior = np.outer(prior, prior).ravel()
    assert mutual_information(prod_states, prod_prior) == pytest.approx(
        2.0 * single, abs=1e-8
    )


def test_pgm_orthogonal_codewords():
    code = pgm_decoder(CQCode(outputs=[PURE0, PURE1], codewords=[(0,), (1,)]))
    assert code.p_max == pytest.approx(0.0, abs=1e-12)
    assert cq_converse_check(code) == pytest.approx(0.0, abs=1e-9)


def test_pgm_identical_codewords():
    code = pgm_decoder(CQCode(outputs=[PURE0, PURE1], codewords=[(0,), (0,), (0,)]))
    assert code.p_max == pytest.approx(1.0 - 1.0 / 3.0, abs=1e-12)


def test_pgm_completeness_random_code():
    rng = substream(17)
    outputs = [random_density(2, substream(17, k), 0.05) for k in range(2)]
    codewords = [tuple(substream(19, m).integers(0, 2, 3)) for m in range(4)]
    code = pgm_decoder(CQCode(outputs=outputs, codewords=codewords))
    total = sum(code.povm)
    assert np.abs(total - np.eye(8)).max() <= 1e-9
    for p in code.povm:
        assert np.linalg.eigvalsh((p + p.conj().T) / 2.0).min() >= -1e-9


def test_cq_converse_single_message():
    code = pgm_decoder(CQCode(outputs=[PURE0], codewords=[(0, 0)]))
    assert code.p_max == pytest.approx(0.0, abs=1e-12)
    assert cq_converse_check(code) >= 0.0


def test_cq_converse_batch():
    worst = math.inf
    for n in (2, 3):
        for m_count in (2, 4):
            for trial in range(5):
                rng = substream(23, n, m_count, trial)
                outputs = [random_density(2, rng, 0.05) for _ in range(2)]
                codewords = [tuple(rng.integers(0, 2, n)) for _ in range(m_count)]
                code = pgm_decoder(CQCode(outputs=outputs, codewords=codewords))
                worst = min(worst, cq_converse_check(code))
    assert worst >= -1e-8


def test_cq_converse_vacuous_at_full_error():
    code = CQCode(
        outputs=[PURE0],
        codewords=[(0,), (0,)],
        povm=[np.zeros((2, 2)), np.eye(2)],
    )
    assert code.p_max == 1.0
    assert cq_converse_check(code) == math.inf


def test_document_roundtrips():
    inst = HypothesisInstance(RHO, SIGMA_ROT, 2)
    back = instance_from_doc(instance_to_doc(inst))
    assert back.n == 2
    assert np.abs(back.sigma.mat - inst.sigma.mat).max() <= 1e-12
    doc = {
        "alphabet": ["a", "b"],
        "outputs": [matrix_to_doc(PURE0), matrix_to_doc(PURE1)],
        "codewords": [["a"], ["b"]],
        "decoder": "pgm",
    }
    code = code_from_doc(doc)
    assert code.p_max == pytest.approx(0.0, abs=1e-12)
    assert code_mutual_information(code) == pytest.approx(math.log(2.0), abs=1e-10)
    with pytest.raises(ParameterError):
        code_from_doc({"alphabet": []})
    with pytest.raises(ParameterError):
        instance_from_doc({"rho": matrix_to_doc(RHO)})


def test_tensor_power():
    assert np.abs(tensor_power(SIGMA, 2) - np.kron(SIGMA, SIGMA)).max() == 0.0
    with pytest.raises(ParameterError):
        tensor_power(SIGMA, 0)
