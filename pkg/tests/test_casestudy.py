import numpy as np
import pytest

from hmmident.casestudy import SSH_A_RAW, run_casestudy, ssh_A, ssh_B, ssh_multi
from hmmident.matrix import InputError


def test_published_rows_and_normalization():
    sums = SSH_A_RAW.sum(axis=1)
    np.testing.assert_allclose(sums, [1, 1, 0.999, 1, 0.959, 1, 1], atol=1e-12)
    np.testing.assert_allclose(ssh_A().sum(axis=1), 1.0, atol=1e-15)


def test_observation_matrix():
    e = 0.1
    B = ssh_B(e)
    np.testing.assert_allclose(B.sum(axis=1), 1.0)
    np.testing.assert_allclose(B[:, 0], [e, 1 - 2 * e, e, 1 - 2 * e, e, 1 - 2 * e, 1 - 2 * e])
    np.testing.assert_array_equal(B[0], B[4])
    for bad in (0.0, 0.5, -0.1):
        with pytest.raises(InputError):
            ssh_B(bad)


def test_multi_builder():
    assert ssh_multi((0.1, 0.1)).homogeneous
    assert not ssh_multi((0.05, 0.1)).homogeneous
    with pytest.raises(InputError):
        ssh_multi((0.1,))


def test_report_deterministic():
    r1, r2 = run_casestudy(), run_casestudy()
    assert r1 == r2
    assert r1["all_passed"]
    assert "seconds" in run_casestudy(timing=True)
