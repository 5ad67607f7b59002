import math

import numpy as np
import pytest

from qlsi.errors import (
    ContractViolationError,
    ParameterError,
    ResourceLimitError,
)
from qlsi.operator_core import random_density, random_hermitian, random_positive_definite
from qlsi.rng import substream
from qlsi.semigroups import (
    adjoint_generator,
    apply_superop,
    check_reversible,
    check_strongly_reversible,
    choi_kraus_decomposition,
    choi_matrix,
    contractivity_check,
    custom_generator,
    davies_qubit_generator,
    generator_from_doc,
    generator_to_doc,
    lift_superop,
    simple_generator,
    spectral_gap,
    tensor_sum,
    unvec,
    vec,
)
from qlsi.weighted_lp import WeightedSpace, inner_one_sigma, inner_sigma
from qlsi.entropy_dirichlet import dirichlet_form, variance_sigma

SIGMA = np.diag([0.25, 0.75])


def _skewed(eps=1e-3):
    base = simple_generator(SIGMA)
    h = np.diag([1.0, -1.0])
    eye = np.eye(2)
    drift = 1j * (np.kron(eye, h) - np.kron(h.T, eye))
    return custom_generator(base.rep + eps * drift, SIGMA)


def test_vec_roundtrip():
    rng = substream(1)
    x = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    assert np.array_equal(unvec(vec(x), 3), x)


def test_simple_generator_action(simple_qubit):
    assert np.abs(simple_qubit.apply(np.eye(2))).max() <= 1e-12
    out = simple_qubit.apply(np.diag([2.0, 1.0]))
    assert np.abs(out - np.diag([0.75, -0.25])).max() <= 1e-12


def test_simple_generator_is_projector(simple_qubit):
    assert np.abs(simple_qubit.rep @ simple_qubit.rep - simple_qubit.rep).max() <= 1e-9
    x = random_hermitian(2, 5).mat
    assert np.abs(
        simple_qubit.apply(simple_qubit.apply(x)) - simple_qubit.apply(x)
    ).max() <= 1e-9


def test_evolution_closed_form(simple_qubit):
    x = np.diag([2.0, 1.0])
    out = simple_qubit.evolve(math.log(2.0), x)
    assert np.abs(out - np.diag([1.625, 1.125])).max() <= 1e-10
    assert np.abs(simple_qubit.evolve(0.0, x) - x).max() <= 1e-12
    assert np.abs(simple_qubit.evolve(0.7, np.eye(2)) - np.eye(2)).max() <= 1e-10


def test_evolution_converges_to_fixed_point(simple_qubit, davies_qubit):
    x = random_hermitian(2, 7).mat
    for gen in (simple_qubit, davies_qubit):
        limit = np.trace(gen.sigma.mat @ x) * np.eye(2)
        assert np.abs(gen.evolve(1e3, x) - limit).max() <= 1e-6


def test_semigroup_law(davies_qubit):
    x = random_hermitian(2, 9).mat
    for s, t in [(0.3, 0.5), (0.1, 1.7)]:
        lhs = davies_qubit.evolve(s, davies_qubit.evolve(t, x))
        rhs = davies_qubit.evolve(s + t, x)
        assert np.abs(lhs - rhs).max() <= 1e-8


def test_evolution_requires_nonnegative_time(simple_qubit):
    with pytest.raises(ParameterError):
        simple_qubit.evolve(-0.1, np.eye(2))


def test_complete_positivity_spot_check(davies_qubit):
    for t in (0.1, 0.7, 2.0):
        j = choi_matrix(davies_qubit, t)
        assert np.linalg.eigvalsh((j + j.conj().T) / 2.0).min() >= -1e-10


def test_adjoint_simple(simple_qubit):
    x = random_hermitian(2, 11).mat
    expected = x - np.trace(x) * SIGMA
    assert np.abs(simple_qubit.apply_adjoint(x) - expected).max() <= 1e-10


def test_adjoint_unital_case_self_adjoint():
    gen = simple_generator(np.eye(2) / 2)
    assert np.abs(adjoint_generator(gen) - gen.rep).max() <= 1e-9


def test_adjoint_pairing_and_involution(davies_qubit):
    rng = substream(13)
    x = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    y = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    lhs = np.trace(x.conj().T @ davies_qubit.apply(y))
    rhs = np.trace(davies_qubit.apply_adjoint(x).conj().T @ y)
    assert abs(lhs - rhs) <= 1e-9
    assert np.abs(adjoint_generator(davies_qubit).conj().T - davies_qubit.rep).max() <= 1e-12


def test_davies_requires_positive_rates():
    with pytest.raises(ParameterError):
        davies_qubit_generator(SIGMA, gamma_10=-1.0)
    with pytest.raises(ParameterError):
        davies_qubit_generator(random_density(3, 0, 0.05), gamma_10=1.0)


def test_davies_degenerate_rejected_as_nonprimitive():
    with pytest.raises(ContractViolationError):
        davies_qubit_generator(SIGMA, gamma_10=0.0, dephase=0.0)


def test_davies_gns_self_adjoint():
    gen = davies_qubit_generator(np.eye(2) / 2, gamma_10=1.0)
    space = WeightedSpace(np.eye(2) / 2)
    rng = substream(17)
    for _ in range(10):
        x = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        y = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        lhs = inner_one_sigma(space, x, gen.apply(y))
        rhs = inner_one_sigma(space, gen.apply(x), y)
        assert abs(lhs - np.conj(rhs)) <= 1e-9 or abs(lhs - rhs) <= 1e-9


def test_davies_random_states_stationary():
    for k in range(10):
        rng = substream(19, k)
        sigma = random_density(2, rng, 0.05)
        gen = davies_qubit_generator(sigma, gamma_10=float(rng.random() + 0.2),
                                     dephase=float(rng.random()))
        resid = np.abs(gen.apply_adjoint(sigma.mat)).max()
        assert resid <= 1e-9
        assert gen.is_strongly_reversible


def test_reversibility_checks(simple_qubit, davies_qubit):
    assert check_reversible(simple_qubit, simple_qubit.sigma)
    assert check_strongly_reversible(simple_qubit, simple_qubit.sigma)
    assert check_reversible(davies_qubit, davies_qubit.sigma)
    assert check_strongly_reversible(davies_qubit, davies_qubit.sigma)


def test_perturbed_generator_not_reversible():
    gen = _skewed(1e-3)
    assert not check_reversible(gen, gen.sigma)
    assert not check_strongly_reversible(gen, gen.sigma)


def test_reversible_iff_self_adjoint_kms(simple_qubit, davies_qubit):
    space = WeightedSpace(SIGMA)
    rng = substream(23)
    for gen, expect in ((simple_qubit, True), (davies_qubit, True), (_skewed(), False)):
        ok = True
        for _ in range(10):
            x = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            y = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            lhs = inner_sigma(space, x, gen.apply(y))
            rhs = inner_sigma(space, gen.apply(x), y)
            ok = ok and abs(lhs - rhs) <= 1e-8
            # the semigroup inherits self-adjointness
            lhs_t = inner_sigma(space, x, gen.evolve(0.4, y))
            rhs_t = inner_sigma(space, gen.evolve(0.4, x), y)
            ok = ok and abs(lhs_t - rhs_t) <= 1e-8
        assert ok == expect


def test_strongly_reversible_commutes_with_modular(davies_qubit, simple_qubit):
    sig = SIGMA
    sig_inv = np.linalg.inv(sig)
    rng = substream(29)
    for gen in (simple_qubit, davies_qubit):
        for _ in range(5):
            x = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            lhs = gen.apply(sig @ x @ sig_inv)
            rhs = sig @ gen.apply(x) @ sig_inv
            assert np.abs(lhs - rhs).max() <= 1e-8


def test_tensor_sum_basics(simple_qubit):
    assert tensor_sum([simple_qubit]) is simple_qubit
    other = simple_generator(np.diag([0.4, 0.6]))
    k2 = tensor_sum([simple_qubit, other])
    assert k2.dim == 4
    assert np.abs(k2.sigma.mat - np.kron(SIGMA, np.diag([0.4, 0.6]))).max() <= 1e-12
    assert k2.is_strongly_reversible
    # factorized evolution on product operands
    x1 = random_positive_definite(2, 31).mat
    x2 = random_positive_definite(2, 32).mat
    lhs = k2.evolve(0.6, np.kron(x1, x2))
    rhs = np.kron(simple_qubit.evolve(0.6, x1), other.evolve(0.6, x2))
    assert np.abs(lhs - rhs).max() <= 1e-9
    # and on arbitrary operands against the lifted propagators
    x = random_hermitian(4, 33).mat
    step1 = apply_superop(lift_superop(simple_qubit.propagator(0.6), [2, 2], 0), x)
    both = apply_superop(lift_superop(other.propagator(0.6), [2, 2], 1), step1)
    assert np.abs(k2.evolve(0.6, x) - both).max() <= 1e-8


def test_tensor_sum_rejects_overflow(simple_qubit):
    with pytest.raises(ResourceLimitError):
        tensor_sum([simple_qubit] * 7)
    with pytest.raises(ParameterError):
        tensor_sum([])


def test_spectral_gap_values(simple_qubit, davies_qubit):
    assert spectral_gap(simple_qubit) == pytest.approx(1.0, abs=1e-9)
    # brute-force oracle from the rep spectrum (reversible => real spectrum)
    eigs = np.linalg.eigvals(davies_qubit.rep)
    nonzero = sorted(e.real for e in eigs if abs(e) > 1e-8)
    assert spectral_gap(davies_qubit) == pytest.approx(nonzero[0], abs=1e-9)


def test_spectral_gap_tensorization(simple_qubit, davies_qubit):
    for gen in (simple_qubit, davies_qubit):
        base = spectral_gap(gen)
        for n in (2, 3):
            kn = tensor_sum([gen] * n)
            assert abs(spectral_gap(kn) - base) <= 1e-9


def test_spectral_gap_variational(davies_qubit):
    # the gap is the infimum of the quadratic form over the variance; the
    # form and the variance are shift-invariant, so definite samples suffice
    space = WeightedSpace(SIGMA)
    gap = spectral_gap(davies_qubit)
    best = math.inf
    for k in range(500):
        x = random_hermitian(2, substream(37, k)).mat
        x = x + (abs(np.linalg.eigvalsh(x).min()) + 1.0) * np.eye(2)
        var = variance_sigma(space, x)
        if var < 1e-12:
            continue
        best = min(best, dirichlet_form(space, davies_qubit, x, 2.0) / var)
    assert best >= gap - 1e-9
    # the eigenvector of the symmetrized rep attains the infimum exactly
    w_sig, v_sig = np.linalg.eigh(SIGMA)
    g_half = np.kron(np.diag(w_sig**0.25), np.diag(w_sig**0.25))  # sigma diagonal
    s = g_half @ davies_qubit.rep @ np.linalg.inv(g_half)
    w, u = np.linalg.eigh((s + s.conj().T) / 2.0)
    idx = np.argsort(np.where(np.abs(w) < 1e-8, np.inf, w))[0]
    x_star = unvec(np.linalg.inv(g_half) @ u[:, idx], 2)
    x_star = x_star + x_star.conj().T
    if np.abs(x_star).max() < 1e-8:
        x_star = 1j * (unvec(np.linalg.inv(g_half) @ u[:, idx], 2)
                       - unvec(np.linalg.inv(g_half) @ u[:, idx], 2).conj().T)
    x_star = x_star + (abs(np.linalg.eigvalsh(x_star).min()) + 1.0) * np.eye(2)
    ratio = dirichlet_form(space, davies_qubit, x_star, 2.0) / variance_sigma(space, x_star)
    assert ratio == pytest.approx(gap, rel=1e-6)


def test_spectral_gap_requires_reversible():
    with pytest.raises(ContractViolationError):
        spectral_gap(_skewed())


def test_choi_kraus_unital_depolarizing():
    gen = simple_generator(np.eye(2) / 2)
    pairs = choi_kraus_decomposition(gen, 0.7)
    assert all(abs(p.omega - 1.0) <= 1e-9 for p in pairs)


def test_choi_kraus_invariants(simple_qubit, davies_qubit):
    for gen in (simple_qubit, davies_qubit):
        for t in (0.1, 0.7, 2.0):
            pairs = choi_kraus_decomposition(gen, t)
            total = sum(p.r @ p.r.conj().T for p in pairs)
            assert np.abs(total - np.eye(2)).max() <= 1e-9
            for p in pairs:
                resid = np.abs(SIGMA @ p.r - p.omega * p.r @ SIGMA).max()
                assert resid <= 1e-9 * max(1.0, np.abs(p.r).max())
            x = random_hermitian(2, substream(41, int(t * 10))).mat
            rec = sum(p.r @ x @ p.r.conj().T for p in pairs)
            assert np.abs(rec - gen.evolve(t, x)).max() <= 1e-8


def test_choi_kraus_random_state(simple_qubit):
    sigma = random_density(2, 43, 0.1)
    gen = simple_generator(sigma)
    pairs = choi_kraus_decomposition(gen, 0.7)
    x = random_hermitian(2, 47).mat
    rec = sum(p.r @ x @ p.r.conj().T for p in pairs)
    assert np.abs(rec - gen.evolve(0.7, x)).max() <= 1e-8


def test_choi_kraus_requires_strong_reversibility():
    with pytest.raises(ContractViolationError):
        choi_kraus_decomposition(_skewed(), 0.5)
    with pytest.raises(ParameterError):
        choi_kraus_decomposition(simple_generator(SIGMA), 0.0)


def test_contractivity(simple_qubit, davies_qubit):
    assert contractivity_check(simple_qubit, 2.0, [0.0], 20, 1) == pytest.approx(0.0, abs=1e-12)
    assert contractivity_check(simple_qubit, -1.0, [0.3, 1.0], 200, 2) >= -1e-9
    assert contractivity_check(davies_qubit, 0.3, [0.3, 1.0], 200, 3) >= -1e-9
    assert contractivity_check(davies_qubit, 2.0, [0.5], 100, 4) >= -1e-9


def test_generator_doc_roundtrip(simple_qubit, davies_qubit):
    for gen in (simple_qubit, davies_qubit, tensor_sum([simple_qubit, simple_qubit])):
        doc = generator_to_doc(gen)
        back = generator_from_doc(doc)
        assert np.abs(back.rep - gen.rep).max() <= 1e-12
        assert back.kind == gen.kind
    # custom rep escape hatch
    doc = generator_to_doc(_skewed())
    back = generator_from_doc(doc)
    assert np.abs(back.rep - _skewed().rep).max() <= 1e-12
    with pytest.raises(ParameterError):
        generator_from_doc({"kind": "nope", "sigma": doc["sigma"]})


def test_custom_generator_validates_invariants():
    # breaking unitality must be caught
    bad = simple_generator(SIGMA).rep + 1e-3 * np.eye(4)
    with pytest.raises(ContractViolationError):
        custom_generator(bad, SIGMA)
