"""Uniform mesh, hat basis and assembly of the pencil matrices Q, R, S.

Unknowns are interleaved per node, ``(u1(t_j), u2(t_j))`` for j = 1..n-1,
so every matrix is block tridiagonal with 2x2 blocks.

Sign convention
---------------
The benchmark eigenvalues (and the closed forms in ``operator_model``) are
those of the reference weak form, which uses the time-harmonic convention
``u_t = -lambda u``.  Its eigenvalues are the negatives of the second order
spectrum built from the operator literally as written.  Q and S do not see
the sign of the operator; R does.  ``convention="reference"`` (default)
assembles R for the negated operator so the second order spectrum lands on
the tabulated eigenvalues; ``convention="literal"`` keeps the operator as
written, and its second order spectrum is the mirror image z -> -z.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.integrate
import scipy.sparse as sp

from .errors import (
    EvaluationAtNode,
    MeshTooCoarse,
    OracleScaleExceeded,
    QuadratureNonConvergence,
)
from .operator_model import OperatorParams, coefficient_c, coefficient_s, validate_params

CONVENTIONS = ("reference", "literal")
ORACLE_MAX_N = 64
ADAPTIVE_LIMIT = 2**15


@dataclass(frozen=True)
class Mesh:
    n: int

    def __post_init__(self):
        if int(self.n) != self.n:
            raise MeshTooCoarse(f"element count must be an integer, got {self.n!r}")
        if self.n < 4:
            raise MeshTooCoarse(f"need n >= 4 elements, got n={self.n}")

    @property
    def h(self) -> float:
        return math.pi / self.n

    @property
    def nodes(self) -> np.ndarray:
        t = np.arange(self.n + 1) * math.pi / self.n
        t[0], t[-1] = 0.0, math.pi
        return t

    @property
    def ndof(self) -> int:
        return 2 * (self.n - 1)


def build_mesh(n: int) -> Mesh:
    return Mesh(int(n) if float(n).is_integer() else n)


def mesh_for_width(h: float) -> Mesh:
    """Coarsest uniform mesh whose width does not exceed ``h``."""
    if not h > 0:
        raise ValueError(f"mesh width must be positive, got {h}")
    n = math.ceil(math.pi / h * (1 - 1e-12))
    return build_mesh(n)


@dataclass(frozen=True)
class QuadratureSpec:
    """Per-element integration rule.

    ``gauss`` uses ``order`` Gauss-Legendre points on interior elements and
    ``endpoint_order`` (default 2*order) on the two elements touching the
    singular endpoints.  ``adaptive`` integrates every element adaptively
    to ``rel_tol``.
    """

    scheme: str = "gauss"
    order: int = 16
    rel_tol: float = 1e-12
    endpoint_order: int | None = None
    check: bool = field(default=True, repr=False, compare=False)

    def __post_init__(self):
        if self.scheme not in ("gauss", "adaptive"):
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")
        if self.check:
            if self.order < 2:
                raise ValueError(f"quadrature order must be >= 2, got {self.order}")
            if not 0 < self.rel_tol < 1e-3:
                raise ValueError(f"rel_tol must lie in (0, 1e-3), got {self.rel_tol}")

    @property
    def edge_order(self) -> int:
        return self.endpoint_order if self.endpoint_order is not None else 2 * self.order


@dataclass
class PencilMatrices:
    """Hermitian triple (Q, R, S) in sparse CSR storage."""

    Q: sp.csr_array
    R: sp.csr_array
    S: sp.csr_array
    params: OperatorParams | None = None
    mesh: Mesh | None = None
    convention: str = "reference"

    @property
    def dim(self) -> int:
        return self.S.shape[0]

    @classmethod
    def from_arrays(cls, Q, R, S, **kw):
        conv = lambda M: sp.csr_array(np.atleast_2d(np.asarray(M)))
        return cls(conv(Q), conv(R), conv(S), **kw)

    def dense(self):
        return self.Q.toarray(), self.R.toarray(), self.S.toarray()


# ---------------------------------------------------------------------------
# Hat basis and the operator applied to it
# ---------------------------------------------------------------------------

def hat(mesh: Mesh, j: int, theta):
    """b_j(theta): piecewise affine, 1 at t_j, 0 at every other node."""
    t = np.asarray(theta, dtype=float)
    h = mesh.h
    return np.clip(1.0 - np.abs(t - j * h) / h, 0.0, None)


def hat_derivative(mesh: Mesh, j: int, theta):
    t = np.asarray(theta, dtype=float)
    h = mesh.h
    left = (t > (j - 1) * h) & (t < j * h)
    right = (t > j * h) & (t < (j + 1) * h)
    return np.where(left, 1.0 / h, 0.0) - np.where(right, 1.0 / h, 0.0)


def apply_operator_to_hat(p: OperatorParams, mesh: Mesh, component: int, j: int, theta: float):
    """Operator (as written, no sign flip) applied to (b_j, 0) or (0, b_j) at theta."""
    if component not in (1, 2):
        raise ValueError(f"component must be 1 or 2, got {component!r}")
    if not 1 <= j <= mesh.n - 1:
        raise ValueError(f"basis index must lie in 1..{mesh.n - 1}, got {j}")
    if not 0.0 < theta < math.pi:
        raise ValueError(f"theta must lie in (0, pi), got {theta}")
    k = round(theta / mesh.h)
    if abs(theta - k * mesh.h) <= 4 * np.finfo(float).eps * math.pi:
        raise EvaluationAtNode(f"theta={theta!r} coincides with node {k}")
    b = float(hat(mesh, j, theta))
    db = float(hat_derivative(mesh, j, theta))
    c = float(coefficient_c(p, theta))
    s = float(coefficient_s(p, theta))
    if component == 1:
        return np.array([-c * b, -db + s * b], dtype=complex)
    return np.array([db + s * b, c * b], dtype=complex)


# ---------------------------------------------------------------------------
# Element kernels
# ---------------------------------------------------------------------------

def _shape_values(p, left, h, x):
    """Local shape functions and the operator applied to them.

    ``x`` has shape (ne, m).  Returns (phi, Aphi), each (ne, 4, 2, m), with
    local dofs ordered (left,u1), (left,u2), (right,u1), (right,u2).
    """
    c = coefficient_c(p, x)
    s = coefficient_s(p, x)
    zero = np.zeros_like(x)
    phi_l = (left[:, None] + h - x) / h
    phi_r = (x - left[:, None]) / h
    phi = np.empty(x.shape[:1] + (4, 2) + x.shape[1:])
    aphi = np.empty_like(phi)
    for k, (f, df) in enumerate(((phi_l, -1.0 / h), (phi_r, 1.0 / h))):
        phi[:, 2 * k, 0], phi[:, 2 * k, 1] = f, zero
        phi[:, 2 * k + 1, 0], phi[:, 2 * k + 1, 1] = zero, f
        aphi[:, 2 * k, 0] = -c * f
        aphi[:, 2 * k, 1] = -df + s * f
        aphi[:, 2 * k + 1, 0] = df + s * f
        aphi[:, 2 * k + 1, 1] = c * f
    return phi, aphi


def _drop_boundary(mesh, elements, *arrays):
    """Zero the local dofs that sit on the endpoint nodes 0 and n."""
    e = np.asarray(elements)
    node = np.stack([e, e, e + 1, e + 1], axis=1)
    dead = (node == 0) | (node == mesh.n)
    for arr in arrays:
        arr[dead] = 0.0


def _element_gauss(p, mesh, elements, order):
    xg, wg = np.polynomial.legendre.leggauss(order)
    h = mesh.h
    left = elements * h
    x = left[:, None] + 0.5 * h * (xg + 1.0)
    w = 0.5 * h * wg
    phi, aphi = _shape_values(p, left, h, x)
    _drop_boundary(mesh, elements, phi, aphi)
    if not (np.all(np.isfinite(aphi)) and np.all(np.isfinite(phi))):
        raise FloatingPointError("non-finite integrand value during assembly")
    q = np.einsum("eaim,ebim,m->eab", aphi, aphi, w)
    r = np.einsum("eaim,ebim,m->eab", aphi, phi, w)
    s = np.einsum("eaim,ebim,m->eab", phi, phi, w)
    return q, r, s


def _element_adaptive(p, mesh, elements, rel_tol):
    h = mesh.h
    out = np.empty((len(elements), 3, 4, 4))
    for i, e in enumerate(elements):
        left = np.array([e * h])

        def integrand(t):
            phi, aphi = _shape_values(p, left, h, np.array([[t]]))
            _drop_boundary(mesh, [e], phi, aphi)
            phi, aphi = phi[0, :, :, 0], aphi[0, :, :, 0]
            return np.stack([aphi @ aphi.T, aphi @ phi.T, phi @ phi.T])

        a, b = e * h, (e + 1) * h
        if e == mesh.n - 1:
            b = math.pi
        res, _err, info = scipy.integrate.quad_vec(
            integrand, a, b, epsabs=0.0, epsrel=rel_tol, norm="max",
            limit=ADAPTIVE_LIMIT, full_output=True,
        )
        if info.status != 0 or not np.all(np.isfinite(res)):
            raise QuadratureNonConvergence(
                f"element {e}: adaptive quadrature did not reach rel_tol={rel_tol} "
                f"(status {info.status}, {info.intervals.shape[0]} subintervals)"
            )
        out[i] = res
    return out[:, 0], out[:, 1], out[:, 2]


def _scatter(mesh, local):
    """Sum (n, 4, 4) element blocks into a (2(n-1))^2 CSR matrix in element order."""
    n = mesh.n
    e = np.arange(n)
    node = np.stack([e, e, e + 1, e + 1], axis=1)
    comp = np.tile([0, 1, 0, 1], (n, 1))
    dof = 2 * (node - 1) + comp
    keep = (node >= 1) & (node <= n - 1)
    rows = np.broadcast_to(dof[:, :, None], local.shape)
    cols = np.broadcast_to(dof[:, None, :], local.shape)
    mask = keep[:, :, None] & keep[:, None, :]
    M = sp.coo_array(
        (local[mask], (rows[mask], cols[mask])), shape=(mesh.ndof, mesh.ndof)
    ).tocsr()
    M.sum_duplicates()
    return M


def _hermitian(M):
    return ((M + M.conj().T) * 0.5).tocsr()


def assemble_pencil(p: OperatorParams, mesh: Mesh, quad: QuadratureSpec | None = None,
                    convention: str = "reference") -> PencilMatrices:
    """Assemble bending (Q), stiffness (R) and mass (S) matrices.

    Integrals are taken element by element, so the singular coefficient is
    only ever evaluated at interior quadrature points.  Each matrix is
    symmetrised once, M <- (M + M*)/2.
    """
    validate_params(p)
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}, got {convention!r}")
    quad = quad or QuadratureSpec()
    n = mesh.n
    if quad.scheme == "gauss":
        inner = np.arange(1, n - 1)
        edge = np.array([0, n - 1])
        qi, ri, si = _element_gauss(p, mesh, inner, quad.order)
        qe, re, se = _element_gauss(p, mesh, edge, quad.edge_order)
        q = np.concatenate([qe[:1], qi, qe[1:]])
        r = np.concatenate([re[:1], ri, re[1:]])
        s = np.concatenate([se[:1], si, se[1:]])
    else:
        q, r, s = _element_adaptive(p, mesh, np.arange(n), quad.rel_tol)
    if convention == "reference":
        r = -r
    Q, R, S = (_hermitian(_scatter(mesh, m)) for m in (q, r, s))
    return PencilMatrices(Q, R, S, params=p, mesh=mesh, convention=convention)


# ---------------------------------------------------------------------------
# Independent brute-force oracle
# ---------------------------------------------------------------------------

def _oracle_basis(p, mesh, dof):
    """Scalar closures (u, Au) for global basis function ``dof``."""
    j, comp = dof // 2 + 1, dof % 2
    h = mesh.h
    tj = j * math.pi / mesh.n

    def b(t):
        if (j - 1) * h <= t <= tj:
            return (t - (j - 1) * h) / h
        if tj < t <= (j + 1) * h:
            return ((j + 1) * h - t) / h
        return 0.0

    def db(t):
        if (j - 1) * h < t < tj:
            return 1.0 / h
        if tj < t < (j + 1) * h:
            return -1.0 / h
        return 0.0

    def u(t):
        return (b(t), 0.0) if comp == 0 else (0.0, b(t))

    def au(t):
        c = p.am * math.cos(t)
        s = p.kappa / math.sin(t) + p.aw * math.sin(t)
        if comp == 0:
            return (-c * b(t), -db(t) + s * b(t))
        return (db(t) + s * b(t), c * b(t))

    return j, u, au


def assemble_pencil_oracle(p: OperatorParams, mesh: Mesh, convention: str = "reference",
                           rel_tol: float = 1e-13) -> PencilMatrices:
    """Brute-force assembly by scalar adaptive quadrature, entry by entry.

    Shares no code with ``assemble_pencil``: every entry is one adaptive
    integral over the overlap of the two supports, with the kinks passed
    as breakpoints.  No symmetrisation is applied.
    """
    validate_params(p)
    if mesh.n > ORACLE_MAX_N:
        raise OracleScaleExceeded(f"oracle limited to n <= {ORACLE_MAX_N}, got n={mesh.n}")
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}, got {convention!r}")
    sign = -1.0 if convention == "reference" else 1.0
    d = mesh.ndof
    h = mesh.h
    basis = [_oracle_basis(p, mesh, k) for k in range(d)]
    Q, R, S = np.zeros((d, d)), np.zeros((d, d)), np.zeros((d, d))
    for a in range(d):
        ja, ua, aua = basis[a]
        for b in range(d):
            jb, ub, aub = basis[b]
            if abs(ja - jb) > 1:
                continue
            lo = max(ja, jb) - 1
            hi = min(ja, jb) + 1
            pts = [k * h for k in range(lo + 1, hi)]
            forms = (
                (Q, lambda t: sum(x * y for x, y in zip(aua(t), aub(t))), 1.0),
                (R, lambda t: sum(x * y for x, y in zip(aua(t), ub(t))), sign),
                (S, lambda t: sum(x * y for x, y in zip(ua(t), ub(t))), 1.0),
            )
            for M, f, fac in forms:
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", scipy.integrate.IntegrationWarning)
                    val, _ = scipy.integrate.quad(
                        f, lo * h, min(hi * h, math.pi), points=pts or None,
                        epsabs=1e-15, epsrel=rel_tol, limit=400,
                    )
                M[a, b] = fac * val
    conv = lambda M: sp.csr_array(M)
    return PencilMatrices(conv(Q), conv(R), conv(S), params=p, mesh=mesh, convention=convention)


# ---------------------------------------------------------------------------
# Plain-text coordinate dump
# ---------------------------------------------------------------------------

def dump_matrix(M, stream) -> None:
    """Write ``row col re im`` per stored nonzero, 17 significant digits, 0-based."""
    C = sp.coo_array(M)
    order = np.lexsort((C.col, C.row))
    for k in order:
        v = complex(C.data[k])
        stream.write(f"{C.row[k]} {C.col[k]} {v.real:.17g} {v.imag:.17g}\n")


def load_matrix(stream, shape) -> sp.csr_array:
    rows, cols, vals = [], [], []
    for line in stream:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        r, c, re_, im_ = line.split()
        rows.append(int(r))
        cols.append(int(c))
        vals.append(complex(float(re_), float(im_)))
    data = np.array(vals)
    if np.all(data.imag == 0):
        data = data.real
    return sp.coo_array((data, (rows, cols)), shape=shape).tocsr()


def dump_pencil(pencil: PencilMatrices, prefix) -> list:
    """Write ``<prefix>Q.txt``, ``R.txt`` and ``S.txt``; return the paths."""
    paths = []
    for name in "QRS":
        path = f"{prefix}{name}.txt"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# {name} dim={pencil.dim} row col re im\n")
            dump_matrix(getattr(pencil, name), fh)
        paths.append(path)
    return paths
