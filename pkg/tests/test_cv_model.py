import numpy as np
import pytest

from backflow.cv_model import (
    CVParams,
    bs_aa,
    bs_sa,
    cv_chain_init,
    cv_decorrelate,
    cv_marginal,
    cv_step,
    cv_system,
    embed_symplectic,
    thermal_squeezed_cov,
)
from backflow.metrics import check_physical_cov, symplectic_form


def run(params, erase=False):
    state = cv_chain_init(params)
    snaps = [state]
    for _ in range(params.steps):
        state = cv_step(state, params, erase=erase)
        snaps.append(state)
    return snaps


def test_thermal_squeezed_cov_values():
    vac = thermal_squeezed_cov(0.0, 0.0)
    np.testing.assert_array_equal(vac.cov, 0.5 * np.eye(2))
    np.testing.assert_array_equal(vac.mean, np.zeros(2))

    st = thermal_squeezed_cov(0.3, 0.4)
    np.testing.assert_allclose(
        st.cov, np.diag([1.7804327427939743, 0.3594631712937773]), rtol=1e-14
    )
    # det is the squared symplectic eigenvalue, independent of squeezing
    assert np.linalg.det(st.cov) == pytest.approx(0.8**2, rel=1e-13)
    with pytest.raises(ValueError):
        thermal_squeezed_cov(-0.1, 0.0)


def test_thermal_squeezed_cov_is_physical():
    for nbar, r in [(0.0, 0.0), (0.0, 1.2), (0.5, -0.8), (2.0, 0.3)]:
        check_physical_cov(thermal_squeezed_cov(nbar, r).cov)


def test_beamsplitters_are_symplectic():
    omega = symplectic_form(2)
    for theta in (0.0, 0.3, np.pi / 4, 1.413716694115407, np.pi / 2):
        for bs in (bs_sa(theta), bs_aa(theta)):
            np.testing.assert_allclose(bs @ omega @ bs.T, omega, atol=1e-14)


def test_bs_aa_is_transpose_of_bs_sa():
    theta = 0.37
    np.testing.assert_array_equal(bs_aa(theta), bs_sa(theta).T)
    np.testing.assert_array_equal(bs_aa(theta), bs_sa(-theta))


def test_bs_aa_at_right_angle_relays_the_state():
    # block-diagonal input: mode a squeezed, mode b vacuum
    c = np.zeros((4, 4))
    c[:2, :2] = thermal_squeezed_cov(0.0, 0.5).cov
    c[2:, 2:] = 0.5 * np.eye(2)
    s = bs_aa(np.pi / 2)
    out = s @ c @ s.T
    np.testing.assert_allclose(out[2:, 2:], c[:2, :2], atol=1e-15)
    np.testing.assert_allclose(out[:2, :2], c[2:, 2:], atol=1e-15)


def test_embed_symplectic_identity_elsewhere():
    s = embed_symplectic(bs_sa(0.3), 0, 2, 4)
    assert s.shape == (8, 8)
    np.testing.assert_array_equal(s[2:4, 2:4], np.eye(2))
    np.testing.assert_array_equal(s[6:8, 6:8], np.eye(2))
    with pytest.raises(IndexError):
        embed_symplectic(bs_sa(0.3), 1, 1, 4)


def test_chain_init_layout():
    p = CVParams(theta_sa=0.1, theta_aa=0.2, nbar=0.0, r=0.5, window=3, steps=5)
    st = cv_chain_init(p)
    assert st.labels == (1, 2, 3)
    assert st.cov.shape == (8, 8)
    np.testing.assert_allclose(st.cov[:2, :2], thermal_squeezed_cov(0.0, 0.5).cov)
    np.testing.assert_array_equal(st.cov[2:4, 2:4], 0.5 * np.eye(2))


def test_step_keeps_covariance_physical_and_labels_slide():
    p = CVParams(theta_sa=0.4, theta_aa=0.9, nbar=0.2, r=0.6, window=2, steps=10)
    snaps = run(p)
    for n, snap in enumerate(snaps):
        check_physical_cov(snap.cov)
        if n >= 1:
            assert snap.labels == (n, n + 1)


def test_vacuum_chain_is_a_fixed_point():
    # all-vacuum input is invariant under any beamsplitter network; the
    # covariance picks up only matmul rounding dust (<< any metric tolerance)
    p = CVParams(theta_sa=0.5, theta_aa=0.8, nbar=0.0, r=0.0, window=2, steps=6)
    snaps = run(p)
    for snap in snaps:
        np.testing.assert_allclose(snap.cov, snaps[0].cov, atol=1e-15)
        assert (snap.mean == 0.0).all()


def test_erase_zeroes_system_environment_block():
    p = CVParams(theta_sa=0.5, theta_aa=0.8, nbar=0.0, r=0.7, window=2, steps=4)
    for snap in run(p, erase=True)[1:]:
        np.testing.assert_array_equal(snap.cov[:2, 2:], 0.0)


def test_cv_marginal_blocks():
    p = CVParams(theta_sa=0.4, theta_aa=0.9, nbar=0.1, r=0.5, window=2, steps=5)
    snap = run(p)[-1]
    sys = cv_system(snap)
    np.testing.assert_array_equal(sys.cov, snap.cov[:2, :2])
    np.testing.assert_array_equal(sys.mean, snap.mean[:2])
    pair = cv_marginal(snap, [1, 2])
    np.testing.assert_array_equal(pair.cov, snap.cov[2:, 2:])
    with pytest.raises(IndexError):
        cv_marginal(snap, [3])
    with pytest.raises(ValueError):
        cv_marginal(snap, [])


def test_cv_decorrelate_partitions():
    p = CVParams(theta_sa=0.4, theta_aa=0.9, nbar=0.1, r=0.5, window=2, steps=5)
    snap = run(p)[-1]
    prod = cv_decorrelate(snap, [0])
    np.testing.assert_array_equal(prod.cov[:2, 2:], 0.0)
    np.testing.assert_array_equal(prod.cov[2:, :2], 0.0)
    np.testing.assert_array_equal(prod.cov[2:, 2:], snap.cov[2:, 2:])
    np.testing.assert_array_equal(prod.mean, snap.mean)
    check_physical_cov(prod.cov)
    with pytest.raises(ValueError):
        cv_decorrelate(snap, [0], [1])  # not a partition: mode 2 unassigned


def test_full_relay_hands_system_state_down_the_chain():
    # theta_sa = theta_aa = pi/2: each collision moves the system state onto
    # E_n and then onto E_{n+1}, so the system gets a clean ancilla back and
    # the squeezing travels outward
    p = CVParams(
        theta_sa=np.pi / 2, theta_aa=np.pi / 2, nbar=0.0, r=0.5, window=2, steps=1
    )
    snap = run(p)[-1]
    np.testing.assert_allclose(cv_system(snap).cov, 0.5 * np.eye(2), atol=1e-14)
    newest = cv_marginal(snap, [2])
    np.testing.assert_allclose(
        newest.cov, thermal_squeezed_cov(0.0, 0.5).cov, atol=1e-14
    )


def test_params_validation():
    with pytest.raises(ValueError):
        CVParams(theta_sa=0.1, theta_aa=0.2, nbar=-0.5, r=0.0)
    with pytest.raises(ValueError):
        CVParams(theta_sa=0.1, theta_aa=0.2, nbar=0.0, r=0.0, window=1)
    with pytest.raises(ValueError):
        CVParams(theta_sa=np.inf, theta_aa=0.2, nbar=0.0, r=0.0)
