"""Matrix algebra and weight-generator tests."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mwlp.errors import NonHermitian, NonPositiveScale, NotPositiveDefinite, SingularPoint
from mwlp.weights import (
    WeightSpec,
    as_matrices,
    check_hermitian,
    dilate_weight,
    evaluate_weight,
    hermitian_power,
    root_batch,
    spectral_norm,
    spectral_norms,
    weight_root_at,
)


def random_hpd(rng, N, cond=1e3):
    """Random Hermitian positive definite matrix with bounded condition number."""
    Z = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    Q, _ = np.linalg.qr(Z)
    lam = np.exp(rng.uniform(0.0, np.log(cond), N))
    return (Q * lam) @ Q.conj().T


@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
@settings(max_examples=60, deadline=None)
def test_power_composition(seed, N):
    rng = np.random.default_rng(seed)
    A = random_hpd(rng, N)
    a, b = rng.uniform(-1.0, 1.0, 2)
    left = hermitian_power(hermitian_power(A, a), b)
    right = hermitian_power(A, a * b)
    assert np.max(np.abs(left - right)) <= 1e-9 * max(1.0, np.max(np.abs(right)))


@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
@settings(max_examples=60, deadline=None)
def test_spectral_norm_submultiplicative(seed, N):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    B = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    assert spectral_norm(A @ B) <= spectral_norm(A) * spectral_norm(B) * (1.0 + 1e-12)


@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
@settings(max_examples=60, deadline=None)
def test_batched_spectral_norms_match_svd(seed, N):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((5, N, N)) + 1j * rng.standard_normal((5, N, N))
    got = spectral_norms(A)
    want = np.array([np.linalg.norm(a, 2) for a in A])
    assert np.max(np.abs(got - want)) <= 1e-10 * max(1.0, want.max())


def test_power_identity_and_inverse():
    rng = np.random.default_rng(0)
    A = random_hpd(rng, 3)
    assert np.allclose(hermitian_power(A, 1.0), A)
    assert np.allclose(hermitian_power(A, -1.0) @ A, np.eye(3), atol=1e-10)
    assert np.allclose(hermitian_power(A, 0.0), np.eye(3), atol=1e-12)


def test_check_hermitian_rejects():
    with pytest.raises(NonHermitian):
        check_hermitian(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(NonHermitian):
        check_hermitian(np.ones((2, 3)))


def test_power_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite):
        hermitian_power(np.diag([1.0, -1.0]), 0.5)
    with pytest.raises(NotPositiveDefinite):
        hermitian_power(np.diag([1.0, 0.0]), 0.5)


ZOO = [
    WeightSpec.identity(1, 2),
    WeightSpec.scalar_power(1, 1, -0.5),
    WeightSpec.scalar_power(2, 3, -0.25),
    WeightSpec.diagonal_power(1, (-0.5, 0.0)),
    WeightSpec.conjugated(1, (-0.5, 0.25)),
    WeightSpec.conjugated(2, (-0.5, 0.0, 0.25)),
    dilate_weight(WeightSpec.diagonal_power(2, (-0.25, 0.25)), 3.0),
]


@pytest.mark.parametrize("spec", ZOO, ids=lambda s: f"{s.kind}-n{s.n}-N{s.N}")
def test_json_round_trip(spec):
    obj = json.loads(json.dumps(spec.to_json()))
    assert WeightSpec.from_json(obj) == spec


@pytest.mark.parametrize("spec", ZOO, ids=lambda s: f"{s.kind}-n{s.n}-N{s.N}")
@pytest.mark.parametrize("sigma", [1.0, 0.5, -0.5, 2.0])
def test_root_batch_matches_eigendecomposition(spec, sigma):
    """Closed-form W^sigma agrees with the generic eigendecomposition route."""
    rng = np.random.default_rng(42)
    pts = rng.uniform(0.3, 3.0, (10, spec.n)) * rng.choice([-1.0, 1.0], (10, spec.n))
    form, data = root_batch(spec, pts, sigma)
    got = as_matrices(form, data, spec.N)
    for i, x in enumerate(pts):
        want = hermitian_power(evaluate_weight(spec, x), sigma)
        assert np.max(np.abs(got[i] - want)) <= 1e-9 * max(1.0, np.max(np.abs(want)))


@pytest.mark.parametrize("spec", ZOO, ids=lambda s: f"{s.kind}-n{s.n}-N{s.N}")
def test_weights_hermitian_pd_at_random_points(spec):
    rng = np.random.default_rng(7)
    pts = rng.uniform(-4.0, 4.0, (20, spec.n))
    pts[np.all(pts == 0.0, axis=-1)] = 1.0
    for x in pts:
        W = evaluate_weight(spec, x)
        check_hermitian(W)
        assert np.linalg.eigvalsh(W)[0] > 0.0


def test_singular_point_raises():
    spec = WeightSpec.scalar_power(1, 1, -0.5)
    with pytest.raises(SingularPoint):
        root_batch(spec, np.array([[0.0]]), 1.0)
    # identity is fine at the origin
    root_batch(WeightSpec.identity(1, 1), np.array([[0.0]]), 1.0)


@given(
    st.floats(0.1, 8.0),
    st.floats(0.1, 8.0),
    st.floats(-3.0, 3.0).filter(lambda x: abs(x) > 1e-3),
)
@settings(max_examples=40, deadline=None)
def test_dilation_group_action(R1, R2, x):
    spec = WeightSpec.diagonal_power(1, (-0.5, 0.25))
    twice = dilate_weight(dilate_weight(spec, R1), R2)
    # nested dilations fold into one factor (exact group action)
    assert twice.params["factor"] == R1 * R2
    assert twice.params["inner"] == spec
    got = evaluate_weight(twice, x)
    want = evaluate_weight(spec, R1 * R2 * x)
    assert np.max(np.abs(got - want)) == 0.0


def test_dilate_rejects_nonpositive():
    with pytest.raises(NonPositiveScale):
        dilate_weight(WeightSpec.identity(1, 1), 0.0)


def test_weight_root_at_matches_power():
    spec = WeightSpec.conjugated(1, (-0.5, 0.25))
    W = evaluate_weight(spec, 1.7)
    got = weight_root_at(spec, 1.7, 0.5)
    assert np.allclose(got @ got, W, atol=1e-12)
