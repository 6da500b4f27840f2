import numpy as np
import pytest

from hmmident.casestudy import ssh_A, ssh_B, ssh_multi, ssh_single
from hmmident.hmm import (
    HmmParams,
    MultiHmmParams,
    build_W,
    build_W_multi,
    equivalent,
    random_hmm,
    random_multi_hmm,
)
from hmmident.identifiability import (
    check_minimality_necessary,
    construct_rank1_recombination,
    construct_state_inflation,
    verdict_heterogeneous,
    verdict_homogeneous,
    verdict_multi,
    verdict_nonstationary,
    verdict_single,
)
from hmmident.krank import krank
from hmmident.matrix import InputError
from hmmident.tensor import find_perm_scale, row_tensor, row_tensor_multi


def uniform_pi(q):
    return np.full(q, 1.0 / q)


# ---- verdicts ----

def test_ssh_single_not_identifiable(ssh):
    for eps in (0.05, 0.1, 0.15, 0.2, 0.45):
        v = verdict_single(ssh_single(eps))
        assert not v.identifiable
        assert v.factor_kranks["B"].value == 1
        assert v.factor_kranks["B"].certificate == (0, 4)
        assert v.counterexample is not None
        assert any("{1,5}" in r for r in v.reasons)


def test_sum_route_identity_transition(rng):
    for q in (2, 3, 4):
        B = rng.dirichlet(np.ones(3), size=q)
        v = verdict_single(HmmParams(uniform_pi(q), np.eye(q), B))
        assert v.factor_kranks["B"].value >= 2
        assert v.sum_route_fired
        assert v.identifiable and v.condition_value.value == q
        assert v.counterexample is None


def test_rank_one_transition_has_equivalent_model():
    # every state jumps uniformly: B (x)row A has full Kruskal rank yet the
    # model admits a non-trivial equivalent via the proportional rows of A
    h = HmmParams([0.5, 0.5], np.full((2, 2), 0.5), np.eye(2))
    assert krank(build_W(h)).value == 2
    v = verdict_single(h)
    assert not v.identifiable
    assert v.factor_kranks["A"].value == 1
    ce = v.counterexample
    assert ce is not None and "A-side" in ce.provenance
    assert equivalent(h, ce, max_len=6, tol=1e-12).equivalent
    assert find_perm_scale(build_W(h), ce.alt_row_tensor()) is None


def test_homogeneous_ssh():
    for m in (2, 3):
        v = verdict_homogeneous(ssh_multi((0.1,) * m))
        assert not v.identifiable
        assert v.setting == "multi-homogeneous"
        assert any("single-observer" in r for r in v.reasons)
        assert v.counterexample is not None


def test_homogeneous_matches_collapse(rng):
    for q in (2, 3, 4):
        for m in (2, 3):
            h = random_multi_hmm(q, (2,) * m, rng, homogeneous=True)
            vh = verdict_homogeneous(h, construct=False)
            vs = verdict_single(h.observer(0), construct=False)
            assert vh.identifiable == vs.identifiable
            assert vh.condition_value.value == vs.condition_value.value


def test_homogeneous_stack_crosscheck_dense(rng):
    for _ in range(10):
        A = rng.dirichlet(np.ones(4), size=4)
        B = rng.dirichlet(np.ones(2), size=4)
        single = krank(row_tensor(B, A)).value == 4
        for m in (2, 3):
            assert (krank(row_tensor_multi([B] * m + [A])).value == 4) == single


def test_homogeneous_stack_can_exceed_with_rank_one_transition(rng):
    # identical transition rows: the m=3 stack gains Kruskal rank, the verdict does not
    a = rng.dirichlet(np.ones(4))
    A = np.tile(a, (4, 1))
    B = rng.dirichlet(np.ones(2), size=4)
    assert krank(row_tensor(B, A)).value == 2
    assert krank(row_tensor_multi([B] * 3 + [A])).value == 4
    h = MultiHmmParams(a, A, (B, B, B), True)
    assert not verdict_homogeneous(h).identifiable


def test_homogeneous_rejects_heterogeneous(ssh_het):
    with pytest.raises(InputError):
        verdict_homogeneous(ssh_het)
    with pytest.raises(InputError):
        verdict_heterogeneous(ssh_multi((0.1, 0.1)))


def test_heterogeneous_ssh(ssh_het):
    v = verdict_heterogeneous(ssh_het)
    assert v.identifiable
    assert v.condition_value.value == 7
    assert v.sufficient_sum_check.detail == "7+1+1 = 9 >= 9"
    assert v.sum_route_fired
    assert [k.value for k in v.factor_kranks.values()] == [7, 1, 1]
    assert verdict_multi(ssh_het).identifiable


def test_heterogeneous_joint_beats_individual(rng):
    A = rng.dirichlet(np.ones(3), size=3)
    B1 = np.array([[0.7, 0.3], [0.7, 0.3], [0.2, 0.8]])
    B2 = np.array([[0.6, 0.4], [0.1, 0.9], [0.1, 0.9]])
    h = MultiHmmParams(uniform_pi(3), A, (B1, B2), False)
    v = verdict_heterogeneous(h)
    assert v.factor_kranks["B1"].value == 1 and v.factor_kranks["B2"].value == 1
    assert v.identifiable and v.condition_value.value == 3
    for j in range(2):
        assert not verdict_single(h.observer(j), construct=False).identifiable


def test_heterogeneous_equal_observers_rejected():
    B = ssh_B(0.1)
    h = MultiHmmParams(uniform_pi(7), ssh_A(), (B, B), False)
    with pytest.raises(InputError, match="identical"):
        verdict_heterogeneous(h)


def test_sum_route_never_contradicts_exact(rng):
    fired = 0
    for _ in range(60):
        q = int(rng.integers(2, 6))
        h = random_multi_hmm(q, (2, 3), rng)
        v = verdict_heterogeneous(h)
        if v.sum_route_fired:
            fired += 1
            assert v.condition_value.value == q
    assert fired > 0


def test_nonstationary(rng):
    h = random_hmm(3, 3, rng)
    steps = [(h.A, h.B)] * 3
    assert all(v.identifiable for v in verdict_nonstationary(steps))
    bad = np.array(h.B)
    bad[1] = bad[0]
    res = verdict_nonstationary([(h.A, h.B), (h.A, bad), (h.A, h.B)])
    assert [v.identifiable for v in res] == [True, False, True]
    mixed = verdict_nonstationary([(ssh_A(), ssh_B(e)) for e in (0.05, 0.1, 0.2)])
    assert not any(v.identifiable for v in mixed)
    with pytest.raises(InputError):
        verdict_nonstationary([(h.A, h.B), (np.eye(2), np.eye(2))])
    with pytest.raises(InputError):
        verdict_nonstationary([])
    with pytest.raises(InputError):
        verdict_nonstationary([(h.A * 0.9, h.B)])


def test_minimality():
    assert check_minimality_necessary(ssh_single(0.1))
    A = np.array([[0.5, 0.5, 0.0], [0.5, 0.5, 0.0], [0.2, 0.3, 0.5]])
    assert not check_minimality_necessary(HmmParams(uniform_pi(3), A, np.eye(3)))


def test_minimality_random(rng):
    hits = sum(check_minimality_necessary(random_hmm(5, 2, rng)) for _ in range(50))
    assert hits == 50


# ---- recombination ----

def test_recombination_ssh(ssh):
    ce = construct_rank1_recombination(ssh)
    assert ce is not None
    for pi in (None, uniform_pi(7)):
        h = ssh if pi is None else ssh_single(0.1, pi=pi)
        c = construct_rank1_recombination(h)
        res = equivalent(h, c, max_len=4, tol=1e-9)
        assert res.equivalent, res
    assert find_perm_scale(build_W(ssh), ce.alt_row_tensor()) is None
    # the recorded factorization reproduces the per-letter blocks up to the gauge
    np.testing.assert_allclose(ce.alt_row_tensor()[4], build_W(ssh)[4])


def test_recombination_none_when_identifiable(rng):
    h = HmmParams(uniform_pi(3), np.eye(3), rng.dirichlet(np.ones(3), size=3))
    assert construct_rank1_recombination(h) is None


def test_recombination_a_side(rng):
    A = rng.dirichlet(np.ones(4), size=4)
    A[3] = A[1]
    B = rng.dirichlet(np.ones(3), size=4)
    h = HmmParams(uniform_pi(4), A, B)
    ce = construct_rank1_recombination(h)
    assert "A-side" in ce.provenance
    assert equivalent(h, ce, max_len=4, tol=1e-10).equivalent
    assert find_perm_scale(build_W(h), ce.alt_row_tensor()) is None


def test_recombination_parallel_rows(rng):
    # rows 0 and 2 equal in both A and B: the merged row cancels to zero
    A = rng.dirichlet(np.ones(3), size=3)
    A[2] = A[0]
    B = rng.dirichlet(np.ones(2), size=3)
    B[2] = B[0]
    h = HmmParams(rng.dirichlet(np.ones(3)), A, B)
    ce = construct_rank1_recombination(h)
    assert np.abs(ce.alt_row_tensor()[0]).max() < 1e-15
    assert equivalent(h, ce, max_len=4, tol=1e-12).equivalent


def test_recombination_homogeneous():
    h = ssh_multi((0.1, 0.1), pi=uniform_pi(7))
    ce = construct_rank1_recombination(h)
    assert ce.kappas == (3, 3)
    assert equivalent(h, ce, max_len=3, tol=1e-10).equivalent
    assert find_perm_scale(build_W_multi(h), ce.alt_row_tensor()) is None


def test_recombination_rejects_heterogeneous(ssh_het):
    with pytest.raises(InputError):
        construct_rank1_recombination(ssh_het)


# ---- state inflation ----

def test_inflation_identity(rng):
    h = random_hmm(3, 2, rng)
    qh = construct_state_inflation(h, 3)
    np.testing.assert_array_equal(qh.W, build_W(h))
    with pytest.raises(InputError):
        construct_state_inflation(h, 2)


@pytest.mark.parametrize("extra", [1, 2, 3])
def test_inflation_random(rng, extra):
    for _ in range(5):
        h = random_hmm(3, 2, rng)
        qh = construct_state_inflation(h, 3 + extra, rng=rng)
        assert qh.q == 3 + extra
        assert equivalent(h, qh, max_len=4, tol=1e-10).equivalent


def test_inflation_perm_scale(rng):
    h = random_hmm(4, 3, rng)
    qh = construct_state_inflation(h, 5, rng=rng, randomize_perm_scale=True)
    assert equivalent(h, qh, max_len=4, tol=1e-10).equivalent


def test_inflation_ssh(ssh):
    qh = construct_state_inflation(ssh, 8)
    assert equivalent(ssh, qh, max_len=2, tol=1e-9).equivalent
    qh = construct_state_inflation(ssh_single(0.1, pi=uniform_pi(7)), 8)
    assert equivalent(ssh_single(0.1, pi=uniform_pi(7)), qh, max_len=3, tol=1e-9).equivalent


def test_inflation_of_multi_and_quasi(rng):
    h = random_multi_hmm(3, (2, 2), rng)
    qh = construct_state_inflation(h, 4, rng=rng)
    assert equivalent(h, qh, max_len=3, tol=1e-10).equivalent
    qq = construct_state_inflation(qh, 6, rng=rng)
    assert equivalent(h, qq, max_len=3, tol=1e-10).equivalent
