import math

import pytest

import qinv


def test_grover_closed_form():
    pi = qinv.sample_permutation(16, 3)
    y = pi[0]
    for k in range(6):
        want = math.sin((2 * k + 1) * math.asin(math.sqrt(1 / 16))) ** 2
        assert qinv.grover_invert(16, pi, y, k) == pytest.approx(want, abs=1e-9)


def test_entropy_spot_values():
    assert qinv.log2_factorial(8) == pytest.approx(math.log2(math.factorial(8)), abs=1e-9)
    assert qinv.binary_entropy(0.25) == pytest.approx(0.811278, abs=1e-6)
    assert qinv.permutation_bound(8, 1.0) == pytest.approx(15.299208, abs=1e-6)
    assert qinv.min_subadditivity_slack(50, 1) >= -1e-9


def test_full_table_code():
    rep = qinv.evaluate_full_table(8)
    assert rep["l_avg"] == 17
    assert rep["delta"] == 1.0
    assert 0 <= rep["slack"] <= 2


def test_hash_family():
    assert qinv.exhaustive_collision_probability(3, 2) == pytest.approx(0.25)


def test_checkpoint_inverts_everything():
    res = qinv.checkpoint_attack(1024, 32, 5)
    assert res["epsilon_image"] == 1.0
    assert res["t_worst"] <= 64


def test_hybrid_bound_holds():
    for distance, _, _, hybrid in qinv.verify_swapping(50, 8, 3, 2):
        assert distance <= hybrid + 1e-9


def test_bad_arguments_raise():
    with pytest.raises(ValueError):
        qinv.sample_function(0, 4, 1)
