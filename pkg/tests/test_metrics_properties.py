import numpy as np
from hypothesis import given, settings
import hypothesis.strategies as st

from backflow.linalg import partial_trace
from backflow.metrics import (
    bures_from_fidelity,
    gaussian_fidelity,
    trace_distance,
    uhlmann_fidelity,
)
from backflow.cv_model import thermal_squeezed_cov
from backflow.fock_oracle import fock_thermal_squeezed, oracle_fidelity


def density_from_seed(seed, dim):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@given(seeds, seeds)
def test_trace_distance_symmetric_and_bounded(s1, s2):
    rho, sig = density_from_seed(s1, 4), density_from_seed(s2, 4)
    d = trace_distance(rho, sig)
    assert 0.0 <= d <= 1.0
    assert abs(d - trace_distance(sig, rho)) < 1e-12


@given(seeds, seeds, seeds)
def test_trace_distance_triangle(s1, s2, s3):
    a, b, c = (density_from_seed(s, 3) for s in (s1, s2, s3))
    assert trace_distance(a, c) <= trace_distance(a, b) + trace_distance(b, c) + 1e-12


@given(seeds, seeds)
def test_fidelity_symmetric_and_bounded(s1, s2):
    rho, sig = density_from_seed(s1, 4), density_from_seed(s2, 4)
    f = uhlmann_fidelity(rho, sig)
    assert 0.0 <= f <= 1.0
    assert abs(f - uhlmann_fidelity(sig, rho)) < 1e-10


@given(seeds, seeds)
def test_fuchs_van_de_graaf_sandwich(s1, s2):
    rho, sig = density_from_seed(s1, 3), density_from_seed(s2, 3)
    f = uhlmann_fidelity(rho, sig)
    d = trace_distance(rho, sig)
    assert 1.0 - f <= d + 1e-10
    assert d <= np.sqrt(max(1.0 - f * f, 0.0)) + 1e-10


@given(seeds, seeds)
def test_partial_trace_contracts_trace_distance(s1, s2):
    # discarding a subsystem is CPTP, so distinguishability cannot grow
    rho, sig = density_from_seed(s1, 8), density_from_seed(s2, 8)
    d_joint = trace_distance(rho, sig)
    d_red = trace_distance(
        partial_trace(rho, [2, 2, 2], [2]), partial_trace(sig, [2, 2, 2], [2])
    )
    assert d_red <= d_joint + 1e-10


@given(seeds)
def test_fidelity_one_only_for_equal(seed):
    rho = density_from_seed(seed, 4)
    assert uhlmann_fidelity(rho, rho) == 1.0
    assert trace_distance(rho, rho) == 0.0


@given(
    st.floats(min_value=0.0, max_value=0.8),
    st.floats(min_value=-0.8, max_value=0.8),
    st.floats(min_value=0.0, max_value=0.8),
    st.floats(min_value=-0.8, max_value=0.8),
)
def test_gaussian_fidelity_symmetric_bounded(n1, r1, n2, r2):
    c1 = thermal_squeezed_cov(n1, r1).cov
    c2 = thermal_squeezed_cov(n2, r2).cov
    f = gaussian_fidelity(c1, c2)
    assert 0.0 <= f <= 1.0
    assert abs(f - gaussian_fidelity(c2, c1)) < 1e-10


@settings(max_examples=25, deadline=None)
@given(
    st.floats(min_value=0.0, max_value=0.5),
    st.floats(min_value=-0.6, max_value=0.6),
    st.floats(min_value=0.0, max_value=0.5),
    st.floats(min_value=-0.6, max_value=0.6),
)
def test_gaussian_fidelity_matches_fock_oracle(n1, r1, n2, r2):
    f_gauss = gaussian_fidelity(
        thermal_squeezed_cov(n1, r1).cov, thermal_squeezed_cov(n2, r2).cov
    )
    f_fock = oracle_fidelity(
        fock_thermal_squeezed(n1, r1, 60), fock_thermal_squeezed(n2, r2, 60)
    )
    assert abs(f_gauss - f_fock) < 1e-6


@given(st.floats(min_value=0.0, max_value=1.0), st.floats(min_value=0.0, max_value=1.0))
def test_bures_from_fidelity_monotone(f1, f2):
    lo, hi = sorted((f1, f2))
    assert bures_from_fidelity(hi) <= bures_from_fidelity(lo)
