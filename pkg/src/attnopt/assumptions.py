"""Sufficiency-condition checks on the prior covariance.

Each condition is a sign test on the prior (or its inverse) that, when it
holds, guarantees the budget-optimal attention vector grows monotonically
so a single deterministic stage path is optimal for every stopping rule.
All tests use a relative tolerance tied to the matrix scale, since file
inputs carry decimal rounding.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .core import Problem


class Verdict(str, enum.Enum):
    K2_THEOREM = "K2Theorem"
    GENERAL_THEOREM = "GeneralTheorem"
    UNSUPPORTED = "Unsupported"


@dataclass(frozen=True)
class AssumptionReport:
    """Pass/fail per sufficiency condition plus the overall verdict.

    ``k2_cov_sum`` is None for K > 2.  ``eventual_dominance_shift`` is the
    smallest uniform attention q such that the precision matrix plus q*I
    becomes diagonally dominant (0 when the prior already is); any prior
    reaches dominance once every source has received that much attention.
    """

    k2_cov_sum: bool | None
    perpetual_substitutes: bool
    perpetual_complements: bool
    diagonal_dominance: bool
    strict_diagonal_dominance: bool
    suff_2k3: bool
    verdict: Verdict
    eventual_dominance_shift: float

    def passes(self) -> bool:
        return self.verdict is not Verdict.UNSUPPORTED


def _sign_tol(p: Problem) -> float:
    return 1e-12 * (1.0 + float(np.max(np.diag(p.sigma))))


def classify(p: Problem) -> AssumptionReport:
    """Evaluate every sufficiency condition for the stage characterization.

    - substitutes: the precision matrix has non-positive off-diagonals
      (every pair of sources has non-negative partial correlation);
    - complements: the prior covariance has non-positive off-diagonals and
      sigma @ alpha is non-negative;
    - diagonal dominance: each precision row's diagonal weakly exceeds the
      sum of off-diagonal magnitudes (strict variant: strictly exceeds);
    - K = 2 only: the two prior state/source covariances sum to >= 0.

    The ``suff_2k3`` flag records the simpler covariance-side bound
    sigma_ii >= (2K-3)|sigma_ij|, which implies diagonal dominance.
    """
    eps = _sign_tol(p)
    k = p.n_sources
    sigma, prec = p.sigma, p.precision

    off_prec = prec - np.diag(np.diag(prec))
    substitutes = bool(np.all(off_prec <= eps))

    off_sigma = sigma - np.diag(np.diag(sigma))
    complements = bool(np.all(off_sigma <= eps) and np.all(p.prior_state_cov >= -eps))

    off_abs_sums = np.sum(np.abs(off_prec), axis=1)
    diag_prec = np.diag(prec)
    dominance = bool(np.all(diag_prec >= off_abs_sums - eps))
    strict_dominance = bool(np.all(diag_prec > off_abs_sums + eps))
    shift = float(max(0.0, np.max(off_abs_sums - diag_prec)))

    factor = 2 * k - 3
    max_off = np.max(np.abs(off_sigma), axis=1)
    suff_2k3 = bool(np.all(np.diag(sigma) >= factor * max_off - eps))

    k2_cov_sum = bool(np.sum(p.prior_state_cov) >= -eps) if k == 2 else None

    if k == 2 and k2_cov_sum:
        verdict = Verdict.K2_THEOREM
    elif substitutes or complements or dominance:
        verdict = Verdict.GENERAL_THEOREM
    else:
        verdict = Verdict.UNSUPPORTED

    return AssumptionReport(
        k2_cov_sum=k2_cov_sum,
        perpetual_substitutes=substitutes,
        perpetual_complements=complements,
        diagonal_dominance=dominance,
        strict_diagonal_dominance=strict_dominance,
        suff_2k3=suff_2k3,
        verdict=verdict,
        eventual_dominance_shift=shift,
    )
