import numpy as np
import pytest
from hypothesis import given, strategies as st

from vsl.basis import BasisSpec, assemble_features, evaluate
from vsl.chebyshev import dirichlet_basis, time_basis
from vsl.errors import UsageError

rng = np.random.default_rng(7)


def test_flat_index_convention():
    s = BasisSpec(3, 4, 5)
    assert s.mode_count == 60 and s.shape == (3, 4, 5) and s.dim == 3
    assert s.flat_index(0, 0, 1) == 1
    assert s.flat_index(0, 1, 0) == 5
    assert s.flat_index(1, 0, 0) == 20
    assert BasisSpec(6).flat_index(4) == 4
    assert BasisSpec(3, 0, 4).flat_index(2, 0, 3) == 11


def test_spec_validation():
    with pytest.raises(UsageError):
        BasisSpec(0)
    with pytest.raises(UsageError):
        BasisSpec(2, -1)
    with pytest.raises(UsageError):
        BasisSpec(2, 0, 2, horizon=0.0)


def test_tensor_product_entries():
    spec = BasisSpec(3, 2, 4, horizon=2.0)
    nodes = rng.uniform(0, 1, (9, 3)) * [1, 1, 2]
    f = assemble_features(spec, nodes, ("x", "t", "yy"))
    bx = dirichlet_basis(nodes[:, 0], 3)
    by = dirichlet_basis(nodes[:, 1], 2)
    bt = time_basis(nodes[:, 2], 4, 2.0)
    for i in range(3):
        for j in range(2):
            for m in range(4):
                n = spec.flat_index(i, j, m)
                assert np.allclose(f.phi[:, n], bx.values[:, i] * by.values[:, j] * bt.values[:, m])
                assert np.allclose(f.phi_x[:, n], bx.d1[:, i] * by.values[:, j] * bt.values[:, m])
                assert np.allclose(f.phi_t[:, n], bx.values[:, i] * by.values[:, j] * bt.d1[:, m])
                assert np.allclose(f.phi_yy[:, n], bx.values[:, i] * by.d2[:, j] * bt.values[:, m])
    assert f.phi_xx is None


def test_derivatives_by_finite_differences():
    spec = BasisSpec(4, 3, 3)
    nodes = rng.uniform(0.1, 0.9, (6, 3))
    f = assemble_features(spec, nodes, ("x", "y", "t", "xx", "yy"))
    c = rng.normal(size=spec.mode_count)
    h = 1e-5
    for col, d in ((0, "x"), (1, "y"), (2, "t")):
        e = np.zeros(3)
        e[col] = h
        up = assemble_features(spec, nodes + e).phi @ c
        dn = assemble_features(spec, nodes - e).phi @ c
        assert np.allclose(f.matrix(d) @ c, (up - dn) / (2 * h), rtol=1e-6, atol=1e-6)
        if d != "t":
            mid = f.phi @ c
            assert np.allclose(f.matrix(d + d) @ c, (up - 2 * mid + dn) / h**2, rtol=1e-4, atol=1e-3)


def test_degenerate_axes_drop_out():
    nodes = np.linspace(0, 1, 5)
    f = assemble_features(BasisSpec(4), nodes)
    assert np.array_equal(f.phi, dirichlet_basis(nodes, 4).values)
    assert f.node_count == 5 and f.mode_count == 4


def test_unknown_or_absent_derivative():
    with pytest.raises(UsageError, match="unknown"):
        assemble_features(BasisSpec(3), [0.5], ("z",))
    with pytest.raises(UsageError, match="absent"):
        assemble_features(BasisSpec(3), [0.5], ("t",))
    with pytest.raises(UsageError, match="columns"):
        assemble_features(BasisSpec(3, 2), [[0.5]])
    with pytest.raises(UsageError, match="not assembled"):
        assemble_features(BasisSpec(3), [0.5]).matrix("xx")


def test_evaluate():
    f = assemble_features(BasisSpec(5), np.linspace(0, 1, 7), ("xx",))
    c = np.arange(5.0)
    assert np.allclose(evaluate(c, f), f.phi @ c)
    assert np.allclose(evaluate(c, f, "xx"), f.phi_xx @ c)
    with pytest.raises(UsageError, match="shape"):
        evaluate(np.ones(4), f)


@given(st.integers(1, 8), st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_fields_vanish_on_spatial_boundary(nx, ny, seed):
    r = np.random.default_rng(seed)
    spec = BasisSpec(nx, ny, 3)
    c = r.normal(size=spec.mode_count)
    s = r.uniform(0, 1, 8)
    t = r.uniform(0, 1, 8)
    edges = np.concatenate([
        np.column_stack([np.zeros(8), s, t]),
        np.column_stack([np.ones(8), s, t]),
        np.column_stack([s, np.zeros(8), t]),
        np.column_stack([s, np.ones(8), t]),
    ])
    u = evaluate(c, assemble_features(spec, edges))
    assert np.max(np.abs(u)) <= 1e-13 * max(1.0, np.abs(c).sum())
