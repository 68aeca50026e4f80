"""Angular Kerr-Newman Dirac operator: parameters, coefficients, closed forms.

The operator acts on two-component functions on (0, pi) as

    [ -C(t)               d/dt + S(t) ]
    [ -d/dt + S(t)        C(t)        ]

with C(t) = am cos t and S(t) = kappa / sin t + aw sin t.  Only the
products ``am`` and ``aw`` enter, never the individual factors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import KappaTooSmall, NegativeDiscriminant

KAPPA_MIN = 0.5


@dataclass(frozen=True)
class OperatorParams:
    kappa: float
    am: float = 0.0
    aw: float = 0.0

    def as_dict(self):
        return {"kappa": self.kappa, "am": self.am, "aw": self.aw}


def validate_params(p: OperatorParams) -> OperatorParams:
    """Return ``p`` unchanged if |kappa| >= 1/2, else raise KappaTooSmall.

    Below 1/2 the differential expression is limit circle at the
    endpoints and the maximal operator is not self-adjoint.
    """
    for name in ("kappa", "am", "aw"):
        if not math.isfinite(getattr(p, name)):
            raise ValueError(f"{name} must be finite, got {getattr(p, name)!r}")
    if abs(p.kappa) < KAPPA_MIN:
        raise KappaTooSmall(f"|kappa| must be >= 1/2, got kappa={p.kappa}")
    return p


def coefficient_c(p: OperatorParams, theta):
    return p.am * np.cos(theta)


def coefficient_s(p: OperatorParams, theta):
    return p.kappa / np.sin(theta) + p.aw * np.sin(theta)


def _check_index(n: int) -> int:
    if int(n) != n or n == 0:
        raise ValueError(f"spectral index must be a nonzero integer, got {n!r}")
    return int(n)


def exact_eigenvalue_zero(kappa: float, n: int) -> float:
    """lambda_n(kappa; 0, 0) = sign(n) (|kappa| - 1/2 + |n|)."""
    validate_params(OperatorParams(kappa))
    n = _check_index(n)
    return math.copysign(abs(kappa) - 0.5 + abs(n), n)


def exact_eigenvalue_equal_coupling(kappa: float, am: float, sign: int, n: int) -> float:
    """Closed-form eigenvalue for the solvable family aw = sign * am.

    Raises NegativeDiscriminant when the radicand is negative; the
    closed form then has no real value and nothing is clamped.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    base = exact_eigenvalue_zero(kappa, n)
    radicand = (base - 0.5 * sign) ** 2 + sign * 2.0 * kappa * am + am * am
    if radicand < 0:
        raise NegativeDiscriminant(
            f"radicand {radicand} < 0 for kappa={kappa}, am={am}, sign={sign}, n={n}"
        )
    return 0.5 * sign + math.copysign(math.sqrt(radicand), n)


def predicted_rate(kappa: float, mode: str = "conjectured") -> float:
    """Convergence exponent of the second order spectrum towards an eigenvalue.

    ``proven`` is the exponent p(kappa)/2 guaranteed by the error analysis,
    where for |kappa| in (1/2, 3/2] minus {1} the admissible r < |kappa| - 1/2
    is reported by its supremum.  ``conjectured`` is the observed exponent
    min{1, |kappa| - 1/2}, taken as 1 at |kappa| = 1.
    """
    if mode not in ("proven", "conjectured"):
        raise ValueError(f"mode must be 'proven' or 'conjectured', got {mode!r}")
    k = abs(kappa)
    if not k > KAPPA_MIN:
        raise KappaTooSmall(f"predicted rate needs |kappa| > 1/2, got kappa={kappa}")
    if k == 1.0:
        p = 1.0
    else:
        p = min(1.0, k - 0.5)
    return p / 2.0 if mode == "proven" else p
