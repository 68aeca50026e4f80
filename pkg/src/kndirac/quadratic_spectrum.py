"""Second order spectrum: roots z of det(Q - 2zR + z^2 S) = 0.

The quadratic pencil is linearised in first companion form

    A = [[0, I], [-Q, 2R]],   B = [[I, 0], [0, S]],

and solved either completely by dense QZ or partially near a shift by
shift-and-invert Arnoldi on the sparse linearisation.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .discretization import PencilMatrices
from .errors import EmptySpectrum, NoConvergence, SolverBreakdown, UnpairedPoint

FULL_SPECTRUM_MAX_DIM = 4096


def tau_sym(z) -> float:
    return 1e-8 * (1.0 + abs(z))


@dataclass(frozen=True)
class SolverConfig:
    method: str = "full"            # "full" | "shifted"
    shift: complex = 0.0
    nevp: int = 6
    rtol: float = 1e-12
    infinite_cutoff: float = 1e-10

    def __post_init__(self):
        if self.method not in ("full", "shifted"):
            raise ValueError(f"method must be 'full' or 'shifted', got {self.method!r}")
        if self.method == "shifted" and self.nevp < 1:
            raise ValueError(f"nevp must be >= 1, got {self.nevp}")
        if not self.rtol > 0:
            raise ValueError(f"rtol must be positive, got {self.rtol}")

    def as_dict(self):
        shift = complex(self.shift)
        return {
            "method": self.method,
            "shift": [shift.real, shift.imag],
            "nevp": self.nevp,
            "rtol": self.rtol,
            "infinite_cutoff": self.infinite_cutoff,
        }


@dataclass
class SecondOrderSpectrum:
    points: np.ndarray
    residuals: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def residual_certificate(self) -> float:
        return float(np.max(self.residuals)) if len(self.residuals) else 0.0

    def __len__(self):
        return len(self.points)


@dataclass(frozen=True)
class ConjugatePair:
    z_plus: complex
    z_minus: complex

    @property
    def center(self) -> float:
        return self.z_plus.real

    @property
    def height(self) -> float:
        return abs(self.z_plus.imag)


def linearize(pencil: PencilMatrices, sparse: bool = False):
    """First companion linearisation (A, B) of dimension 2*dim."""
    d = pencil.dim
    if sparse:
        eye = sp.identity(d, format="csr")
        A = sp.block_array([[None, eye], [-pencil.Q, 2 * pencil.R]], format="csc")
        B = sp.block_array([[eye, None], [None, pencil.S]], format="csc")
        return A, B
    Q, R, S = pencil.dense()
    dtype = np.result_type(Q, R, S)
    eye = np.eye(d, dtype=dtype)
    zero = np.zeros((d, d), dtype=dtype)
    A = np.block([[zero, eye], [-Q, 2 * R]])
    B = np.block([[eye, zero], [zero, S]])
    return A, B


def _norm1(M) -> float:
    if sp.issparse(M):
        return float(spla.norm(M, 1))
    return float(np.linalg.norm(M, 1))


def backward_errors(pencil: PencilMatrices, z, vectors) -> np.ndarray:
    """||P(z)u|| / ((||Q|| + 2|z| ||R|| + |z|^2 ||S||) ||u||) per column of ``vectors``.

    Matrix norms are 1-norms.  Each column of ``vectors`` holds a
    linearisation eigenvector [u; zu]; the better of the two blocks is used.
    """
    d = pencil.dim
    nq, nr, ns = (_norm1(M) for M in (pencil.Q, pencil.R, pencil.S))
    out = np.empty(len(z))
    for k, zk in enumerate(z):
        best = np.inf
        for u in (vectors[:d, k], vectors[d:, k]):
            nu = np.linalg.norm(u)
            if nu == 0:
                continue
            res = pencil.Q @ u - 2 * zk * (pencil.R @ u) + zk * zk * (pencil.S @ u)
            scale = (nq + 2 * abs(zk) * nr + abs(zk) ** 2 * ns) * nu
            best = min(best, np.linalg.norm(res) / scale)
        out[k] = best
    return out


def _scaled(pencil: PencilMatrices):
    """Eigenvalue scaling z = gamma*mu balancing ||Q|| against ||S||."""
    nq, nr, ns = (_norm1(M) for M in (pencil.Q, pencil.R, pencil.S))
    gamma = np.sqrt(nq / ns) if nq > 0 and ns > 0 else 1.0
    delta = 2.0 / (nq + 2 * nr * gamma + ns * gamma**2)
    scaled = PencilMatrices(
        pencil.Q * delta, pencil.R * (delta * gamma), pencil.S * (delta * gamma**2),
        params=pencil.params, mesh=pencil.mesh, convention=pencil.convention,
    )
    return scaled, gamma


def _solve_full(pencil: PencilMatrices, cfg: SolverConfig):
    scaled, gamma = _scaled(pencil)
    A, B = linearize(scaled)
    (alpha, beta), V = scipy.linalg.eig(A, B, right=True, homogeneous_eigvals=True)
    finite = np.abs(beta) > cfg.infinite_cutoff * np.linalg.norm(B, 1)
    mu = alpha[finite] / beta[finite]
    V = V[:, finite]
    d = pencil.dim
    # top block holds u, bottom block holds mu*u; rescale to z*u
    V = np.vstack([V[:d], V[d:] * gamma])
    return mu * gamma, V, int(np.count_nonzero(~finite))


def _solve_shifted(pencil: PencilMatrices, cfg: SolverConfig):
    A, B = linearize(pencil, sparse=True)
    n = A.shape[0]
    k = min(cfg.nevp, n - 2)
    sigma = complex(cfg.shift)
    dtype = complex if sigma.imag != 0 else float
    M = (A - sigma.real * B if dtype is float else A.astype(complex) - sigma * B).tocsc()
    try:
        lu = spla.splu(M)
    except RuntimeError as exc:
        raise SolverBreakdown(f"shift {sigma} makes A - sigma*B singular: {exc}") from exc
    op = spla.LinearOperator((n, n), matvec=lambda x: lu.solve(B @ x), dtype=dtype)
    v0 = np.random.default_rng(0).standard_normal(n)
    try:
        theta, V = spla.eigs(op, k=k, which="LM", tol=cfg.rtol, v0=v0,
                             maxiter=max(1000, 20 * n))
    except spla.ArpackNoConvergence as exc:
        raise NoConvergence(f"Arnoldi iteration did not converge near shift {sigma}") from exc
    if np.any(theta == 0):
        raise SolverBreakdown("zero Ritz value in shift-invert iteration")
    z = sigma + 1.0 / theta
    # real pencils have conjugation-closed spectra; restore any pair cut in half
    if all(np.isrealobj(M_.data) for M_ in (pencil.Q, pencil.R, pencil.S)):
        extra_z, extra_v = [], []
        for i, zi in enumerate(z):
            if abs(zi.imag) > tau_sym(zi) and np.min(np.abs(z - np.conj(zi))) > tau_sym(zi):
                extra_z.append(np.conj(zi))
                extra_v.append(np.conj(V[:, i]))
        if extra_z:
            z = np.concatenate([z, extra_z])
            V = np.column_stack([V] + extra_v)
    return z, V, 0


def solve_spec2(pencil: PencilMatrices, cfg: SolverConfig | None = None) -> SecondOrderSpectrum:
    """Compute the second order spectrum of ``pencil``.

    ``full`` returns every finite eigenvalue of the linearisation via QZ;
    ``shifted`` returns the ``nevp`` points nearest ``shift`` (plus the
    conjugate partner of any pair the iteration split).  Per-point backward
    errors are recorded as the residual certificate.
    """
    cfg = cfg or SolverConfig()
    if cfg.method == "full":
        z, V, n_inf = _solve_full(pencil, cfg)
    else:
        z, V, n_inf = _solve_shifted(pencil, cfg)
    residuals = backward_errors(pencil, z, V)
    order = np.lexsort((z.imag, z.real))
    z, residuals = z[order], residuals[order]
    meta = {
        "dim": pencil.dim,
        "h": pencil.mesh.h if pencil.mesh is not None else None,
        "n": pencil.mesh.n if pencil.mesh is not None else None,
        "params": pencil.params.as_dict() if pencil.params is not None else None,
        "convention": pencil.convention,
        "solver": cfg.as_dict(),
        "discarded_infinite": n_inf,
        "residual_certificate": float(np.max(residuals)) if len(residuals) else 0.0,
    }
    return SecondOrderSpectrum(points=z, residuals=residuals, meta=meta)


def extract_pairs(spec: SecondOrderSpectrum | np.ndarray) -> list:
    """Group points into conjugate pairs, each input point used exactly once.

    Points with Im > 0 are greedily matched to the nearest unused point
    with Im < 0 lying within tau_sym of their conjugate.  Points within
    tau_sym of the real axis that find no partner form a pair with
    themselves.  Any other leftover raises UnpairedPoint.
    """
    pts = np.asarray(spec.points if isinstance(spec, SecondOrderSpectrum) else spec, dtype=complex)
    upper = [i for i in range(len(pts)) if pts[i].imag > 0]
    lower = set(i for i in range(len(pts)) if pts[i].imag < 0)
    pairs = []
    upper.sort(key=lambda i: (pts[i].real, pts[i].imag))
    for i in upper:
        z = complex(pts[i])
        best, best_d = None, np.inf
        for j in lower:
            dist = abs(pts[j] - z.conjugate())
            if dist < best_d:
                best, best_d = j, dist
        if best is not None and best_d <= tau_sym(z):
            lower.discard(best)
            pairs.append(ConjugatePair(z, complex(pts[best])))
        elif z.imag <= tau_sym(z):
            pairs.append(ConjugatePair(z, z.conjugate()))
        else:
            raise UnpairedPoint(f"no conjugate partner for {z}")
    for j in sorted(lower, key=lambda i: (pts[i].real, pts[i].imag)):
        z = complex(pts[j])
        if -z.imag <= tau_sym(z):
            pairs.append(ConjugatePair(z.conjugate(), z))
        else:
            raise UnpairedPoint(f"no conjugate partner for {z}")
    for i in range(len(pts)):
        if pts[i].imag == 0:
            z = complex(pts[i])
            pairs.append(ConjugatePair(z, z))
    pairs.sort(key=lambda q: (q.center, q.height))
    return pairs


def nearest_pair(pairs, target: float) -> ConjugatePair:
    """Pair whose upper point is nearest ``target`` in the complex plane.

    Distances equal up to rounding are tied; ties go to the smaller
    height, then the smaller center.
    """
    pairs = list(pairs)
    if not pairs:
        raise EmptySpectrum("no conjugate pairs to choose from")
    dist = [abs(q.z_plus - target) for q in pairs]
    best = min(dist)
    tol = 1e-12 * (1.0 + abs(target) + best)
    tied = [q for q, d in zip(pairs, dist) if d <= best + tol]
    return min(tied, key=lambda q: (q.height, q.center))


def dump_spectrum(spec: SecondOrderSpectrum, stream) -> None:
    """One ``re im`` line per point, 17 significant digits, sorted by (Re, Im)."""
    pts = np.asarray(spec.points, dtype=complex)
    for k in np.lexsort((pts.imag, pts.real)):
        stream.write(f"{pts[k].real:.17g} {pts[k].imag:.17g}\n")


def load_spectrum(stream) -> np.ndarray:
    pts = []
    for line in stream:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        re_, im_ = line.split()[:2]
        pts.append(complex(float(re_), float(im_)))
    return np.array(pts, dtype=complex)
