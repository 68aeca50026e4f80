import io
import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from kndirac.discretization import (
    Mesh, PencilMatrices, QuadratureSpec, apply_operator_to_hat, assemble_pencil,
    assemble_pencil_oracle, build_mesh, dump_matrix, dump_pencil, hat, hat_derivative,
    load_matrix, mesh_for_width,
)
from kndirac.errors import EvaluationAtNode, KappaTooSmall, MeshTooCoarse, OracleScaleExceeded
from kndirac.experiments import relative_deviation
from kndirac.operator_model import OperatorParams

from conftest import PARAM_SETS


def test_mesh_basics():
    m = build_mesh(8)
    assert m.h == pytest.approx(math.pi / 8)
    assert m.ndof == 14
    assert m.nodes[0] == 0.0 and m.nodes[-1] == math.pi
    assert len(m.nodes) == 9


@pytest.mark.parametrize("n", [0, 1, 3])
def test_mesh_too_coarse(n):
    with pytest.raises(MeshTooCoarse):
        build_mesh(n)


def test_mesh_non_integer():
    with pytest.raises(MeshTooCoarse):
        Mesh(4.5)


@pytest.mark.parametrize("h,n", [(0.02, 158), (0.001, 3142), (math.pi / 100, 100), (0.5, 7)])
def test_mesh_for_width(h, n):
    m = mesh_for_width(h)
    assert m.n == n
    assert m.h <= h * (1 + 1e-12)


def test_mesh_for_width_too_wide():
    with pytest.raises(MeshTooCoarse):
        mesh_for_width(1.5)


def test_hat_function():
    m = build_mesh(8)
    assert hat(m, 3, m.nodes[3]) == pytest.approx(1.0)
    assert hat(m, 3, m.nodes[2]) == 0.0
    assert hat(m, 3, m.nodes[3] + m.h / 2) == pytest.approx(0.5)
    assert hat_derivative(m, 3, m.nodes[3] - m.h / 3) == pytest.approx(1 / m.h)
    assert hat_derivative(m, 3, m.nodes[3] + m.h / 3) == pytest.approx(-1 / m.h)


def test_apply_operator_to_hat_values():
    p = OperatorParams(1.5, 0.25, 0.75)
    m = build_mesh(8)
    t = m.nodes[3] + 0.25 * m.h
    b, db = 0.75, -1 / m.h
    c, s = 0.25 * math.cos(t), 1.5 / math.sin(t) + 0.75 * math.sin(t)
    np.testing.assert_allclose(apply_operator_to_hat(p, m, 1, 3, t), [-c * b, -db + s * b])
    np.testing.assert_allclose(apply_operator_to_hat(p, m, 2, 3, t), [db + s * b, c * b])


def test_apply_operator_at_node_refused():
    m = build_mesh(8)
    with pytest.raises(EvaluationAtNode):
        apply_operator_to_hat(OperatorParams(1.5), m, 1, 3, 3 * math.pi / 8)


def test_assembly_rejects_small_kappa():
    with pytest.raises(KappaTooSmall):
        assemble_pencil(OperatorParams(0.3), build_mesh(8))


@pytest.mark.parametrize("params", PARAM_SETS)
def test_exact_hermiticity(params):
    pen = assemble_pencil(OperatorParams(*params), build_mesh(16))
    for M in (pen.Q, pen.R, pen.S):
        assert abs(M - M.T).max() == 0.0
        assert sp.issparse(M)


@pytest.mark.parametrize("n", [4, 9, 32])
def test_mass_matrix_closed_form(n):
    m = build_mesh(n)
    S = assemble_pencil(OperatorParams(-2.5, 1.0, 0.3), m).S.toarray()
    d = m.ndof
    expected = np.zeros((d, d))
    for i in range(d):
        expected[i, i] = 2 * m.h / 3
        if i + 2 < d:
            expected[i, i + 2] = expected[i + 2, i] = m.h / 6
    np.testing.assert_allclose(S, expected, rtol=1e-13, atol=1e-16)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.5, 5), st.floats(-2, 2), st.floats(-2, 2), st.integers(4, 40))
def test_mass_matrix_independent_of_params(kappa, am, aw, n):
    m = build_mesh(n)
    S1 = assemble_pencil(OperatorParams(kappa, am, aw), m).S
    S0 = assemble_pencil(OperatorParams(0.5), m).S
    assert abs(S1 - S0).max() <= 1e-15 * m.h


@settings(max_examples=15, deadline=None)
@given(st.integers(4, 200))
def test_mass_matrix_well_conditioned(n):
    m = build_mesh(n)
    S = assemble_pencil(OperatorParams(1.5), m).S.toarray()
    assert np.linalg.eigvalsh(S)[0] > m.h / 10


def test_block_tridiagonal_pattern():
    pen = assemble_pencil(OperatorParams(1.5, 0.25, 0.75), build_mesh(12))
    for M in (pen.Q, pen.R, pen.S):
        C = M.tocoo()
        assert np.all(np.abs(C.row // 2 - C.col // 2) <= 1)


@pytest.mark.parametrize("params", PARAM_SETS)
@pytest.mark.parametrize("n", [4, 8, 16])
def test_matches_oracle(params, n):
    p, m = OperatorParams(*params), build_mesh(n)
    fast = assemble_pencil(p, m)
    ref = assemble_pencil_oracle(p, m)
    for name in "QRS":
        assert relative_deviation(getattr(fast, name), getattr(ref, name)) <= 1e-8, name


@pytest.mark.parametrize("params", PARAM_SETS)
def test_adaptive_scheme_matches_gauss(params):
    p, m = OperatorParams(*params), build_mesh(8)
    a = assemble_pencil(p, m, QuadratureSpec("adaptive"))
    g = assemble_pencil(p, m)
    for name in "QRS":
        assert relative_deviation(getattr(a, name), getattr(g, name)) <= 1e-10


def test_oracle_scale_limit():
    with pytest.raises(OracleScaleExceeded):
        assemble_pencil_oracle(OperatorParams(1.5), build_mesh(65))


def test_low_order_quadrature_detected():
    p, m = OperatorParams(1.5, 0.25, 0.75), build_mesh(8)
    bad = assemble_pencil(p, m, QuadratureSpec(order=1, endpoint_order=1, check=False))
    ref = assemble_pencil_oracle(p, m)
    assert relative_deviation(bad.Q, ref.Q) > 1e-3


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(order=1)
    with pytest.raises(ValueError):
        QuadratureSpec(scheme="simpson")


def test_conventions_differ_only_in_r():
    p, m = OperatorParams(1.5, 0.25, 0.75), build_mesh(10)
    ref = assemble_pencil(p, m)
    lit = assemble_pencil(p, m, convention="literal")
    assert abs(ref.Q - lit.Q).max() == 0 and abs(ref.S - lit.S).max() == 0
    assert abs(ref.R + lit.R).max() == 0
    with pytest.raises(ValueError):
        assemble_pencil(p, m, convention="other")


def test_single_element_integrals_by_hand():
    # first interior node, component 1, zero coupling: Q_11 = int (b')^2 + (kappa/sin)^2 b^2 - 2 kappa/sin b b'
    p, m = OperatorParams(1.5), build_mesh(8)
    from scipy.integrate import quad
    h = m.h

    def b(t):
        return t / h if t <= h else (2 * h - t) / h

    def db(t):
        return 1 / h if t < h else -1 / h

    def f(t):
        s = 1.5 / math.sin(t)
        return (-db(t) + s * b(t)) ** 2

    val = quad(f, 0, h, epsabs=1e-14)[0] + quad(f, h, 2 * h, epsabs=1e-14)[0]
    Q = assemble_pencil(p, m).Q
    assert Q[0, 0] == pytest.approx(val, rel=1e-10)


def test_matrix_dump_round_trip(tmp_path):
    pen = assemble_pencil(OperatorParams(1.5, 0.25, 0.75), build_mesh(6))
    buf = io.StringIO()
    dump_matrix(pen.R, buf)
    back = load_matrix(io.StringIO(buf.getvalue()), pen.R.shape)
    assert abs(back - pen.R).max() == 0
    first = buf.getvalue().splitlines()[0].split()
    assert first[:2] == ["0", "0"]
    paths = dump_pencil(pen, str(tmp_path / "case_"))
    assert [p[-5:] for p in paths] == ["Q.txt", "R.txt", "S.txt"]


def test_from_arrays():
    pen = PencilMatrices.from_arrays([[5.0]], [[2.0]], [[1.0]])
    assert pen.dim == 1
