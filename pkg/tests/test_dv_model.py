import numpy as np
import pytest

from backflow.dv_model import (
    DVParams,
    dv_ancilla,
    dv_chain_init,
    dv_initial_system,
    dv_marginal,
    dv_step,
    dv_system,
    partial_swap,
)
from backflow.linalg import kron
from backflow.metrics import trace_distance


def run(params, erase=False):
    state = dv_chain_init(params)
    snaps = [state]
    for _ in range(params.steps):
        state = dv_step(state, params, erase=erase)
        snaps.append(state)
    return snaps


def test_partial_swap_limits():
    np.testing.assert_array_equal(partial_swap(0.0), np.eye(4, dtype=complex))
    full = partial_swap(np.pi / 2)
    # theta = pi/2 is a full swap up to global phase
    A = dv_initial_system(0.6)
    B = dv_ancilla(0.25)
    swapped = full @ kron(A, B) @ full.conj().T
    np.testing.assert_allclose(swapped, kron(B, A), atol=1e-14)


def test_partial_swap_unitary():
    u = partial_swap(0.3)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(4), atol=1e-14)


def test_initial_system_states():
    np.testing.assert_array_equal(dv_initial_system(1.0), np.diag([1.0, 0.0]))
    np.testing.assert_array_equal(dv_initial_system(0.0), np.diag([0.0, 1.0]))
    plus = dv_initial_system(1.0 / np.sqrt(2.0))
    np.testing.assert_allclose(plus, 0.5 * np.ones((2, 2)), atol=1e-15)
    with pytest.raises(ValueError):
        dv_initial_system(1.5)


def test_params_validation():
    with pytest.raises(ValueError):
        DVParams(theta_sa=0.1, theta_aa=0.2, alpha=0.5, window=1)
    with pytest.raises(ValueError):
        DVParams(theta_sa=0.1, theta_aa=0.2, alpha=0.5, steps=0)
    with pytest.raises(ValueError):
        DVParams(theta_sa=0.1, theta_aa=0.2, alpha=0.5, ancilla_excitation=1.5)


def test_chain_init_layout():
    p = DVParams(theta_sa=0.1, theta_aa=0.2, alpha=0.7, window=3, steps=5)
    st = dv_chain_init(p)
    assert st.labels == (1, 2, 3)
    assert st.matrix.shape == (16, 16)
    assert st.n == 0
    assert np.trace(st.matrix).real == pytest.approx(1.0, abs=1e-14)


def test_step_preserves_trace_and_positivity():
    p = DVParams(theta_sa=0.4, theta_aa=0.8, alpha=0.3, window=2, steps=12)
    for snap in run(p):
        assert np.trace(snap.matrix).real == pytest.approx(1.0, abs=1e-12)
        w = np.linalg.eigvalsh(snap.matrix)
        assert w[0] > -1e-10


def test_labels_slide_with_the_window():
    p = DVParams(theta_sa=0.3, theta_aa=0.5, alpha=0.2, window=2, steps=6)
    snaps = run(p)
    assert snaps[0].labels == (1, 2)
    # after step n the window holds (E_n, E_{n+1})
    for n in range(1, 7):
        assert snaps[n].labels == (n, n + 1)


def test_full_history_keeps_every_ancilla():
    p = DVParams(
        theta_sa=0.3, theta_aa=0.5, alpha=0.2, window=4, steps=4, full_history=True
    )
    snaps = run(p)
    for snap in snaps:
        assert snap.labels == (1, 2, 3, 4)
        assert snap.matrix.shape == (32, 32)


def test_stationary_state_is_bit_exact_fixed_point():
    # alpha = 1 system on ground ancillae never changes at all
    p = DVParams(theta_sa=0.5, theta_aa=0.9, alpha=1.0, window=2, steps=8)
    snaps = run(p)
    first = snaps[0].matrix
    for snap in snaps[1:]:
        assert (snap.matrix == first).all()


def test_markovian_chain_contracts_distinguishability():
    # theta_aa = 0: collisions never correlate ancillae, distances only decay
    kw = dict(theta_sa=0.35, theta_aa=0.0, window=2, steps=25)
    snaps1 = run(DVParams(alpha=0.0, **kw))
    snaps2 = run(DVParams(alpha=1.0, **kw))
    d = [
        trace_distance(dv_system(a), dv_system(b))
        for a, b in zip(snaps1, snaps2)
    ]
    assert all(d[t + 1] <= d[t] + 1e-12 for t in range(len(d) - 1))


def test_erase_leaves_product_of_marginals():
    p = DVParams(theta_sa=0.4, theta_aa=0.7, alpha=0.4, window=2, steps=3)
    state = dv_chain_init(p)
    state = dv_step(state, p, erase=True)
    m = 1 + len(state.labels)
    rho_s = dv_marginal(state, [0])
    rho_env = dv_marginal(state, list(range(1, m)))
    # the AA collision after erasure acts only on the env factor, so the
    # system stays exactly unentangled from it
    np.testing.assert_allclose(state.matrix, kron(rho_s, rho_env), atol=1e-12)


def test_marginal_against_direct_construction():
    p = DVParams(theta_sa=0.3, theta_aa=0.6, alpha=0.5, window=3, steps=4)
    snap = run(p)[-1]
    full = snap.matrix
    # tracing everything but slot 0 equals the dv_system helper
    np.testing.assert_array_equal(dv_system(snap), dv_marginal(snap, [0]))
    assert dv_marginal(snap, [0, 1, 2, 3]) is full
    with pytest.raises(IndexError):
        dv_marginal(snap, [4])
    with pytest.raises(ValueError):
        dv_marginal(snap, [])


def test_step_beyond_run_length_raises():
    p = DVParams(theta_sa=0.1, theta_aa=0.1, alpha=0.5, window=2, steps=1)
    state = dv_step(dv_chain_init(p), p)
    with pytest.raises(ValueError):
        dv_step(state, p)


def test_window_vs_full_history_agree_while_window_suffices():
    # with window = steps, the lazy-shift windowed run IS the full run
    kw = dict(theta_sa=0.3, theta_aa=0.6, alpha=0.4, steps=4)
    snaps_w = run(DVParams(window=4, **kw))
    snaps_f = run(DVParams(window=4, full_history=True, **kw))
    for a, b in zip(snaps_w[:-1], snaps_f[:-1]):
        np.testing.assert_allclose(a.matrix, b.matrix, atol=1e-13)
