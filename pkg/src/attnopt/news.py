"""Competition between two oppositely-biased news sources.

Each source chooses a bias intensity and a noise level; a reader then
allocates attention optimally over time, which the two-source closed form
characterizes completely.  Source payoffs are discounted attention minus
a quadratic penalty for deviating from the bias bliss point.  The
symmetric equilibrium has a closed form; a grid best-response scan
certifies it numerically (and exhibits the known profitable double
deviation when the bias incentive is weak).
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from ._utils import map_chunked
from .core import Problem
from .errors import ExistenceNotGuaranteedWarning, InvalidParamError

# Above this value of lambda * kappa^2 the symmetric profile is known to
# be immune to double deviations; below 9/16 it certainly is not.
EXISTENCE_THRESHOLD = 1.6


@dataclass(frozen=True)
class NewsGameParams:
    """Primitives: prior stds of the state and of the partisan benefit,
    bias incentive strength, bias bliss point and the discount rate."""

    sigma_omega: float
    sigma_b: float = 1.0
    lam: float = 1.0
    kappa: float = 1.0
    r: float = 1.0

    def __post_init__(self):
        if min(self.sigma_omega, self.sigma_b, self.kappa, self.r) <= 0:
            raise InvalidParamError("sigma_omega, sigma_b, kappa and r must be positive")
        if self.lam < 0:
            raise InvalidParamError("bias incentive must be non-negative")


@dataclass(frozen=True)
class NewsOutcome:
    phi_star: float
    zeta_star: float
    t1_star: float
    shares: tuple[float, float]
    payoffs: tuple[float, float]
    existence_guaranteed: bool


def transform_to_core(g: NewsGameParams, phi, zeta) -> Problem:
    """Rewrite the biased-reporting game as a two-attribute problem.

    Attribute i is the (unit-noise-normalized) content of source i's
    report; the state decomposes over them with weights proportional to
    the opposing biases.  Both prior state/attribute covariances equal
    sigma_omega^2 / zeta_i > 0, so the two-source condition always holds.
    """
    p1, p2 = float(phi[0]), float(phi[1])
    z1, z2 = float(zeta[0]), float(zeta[1])
    if min(p1, p2, z1, z2) <= 0:
        raise InvalidParamError("biases and noise levels must be positive")
    so2 = g.sigma_omega**2
    sb2 = g.sigma_b**2
    sigma = np.array(
        [
            [(so2 + p1 * p1 * sb2) / (z1 * z1), (so2 - p1 * p2 * sb2) / (z1 * z2)],
            [(so2 - p1 * p2 * sb2) / (z1 * z2), (so2 + p2 * p2 * sb2) / (z2 * z2)],
        ]
    )
    alpha = np.array([z1 * p2, z2 * p1]) / (p1 + p2)
    return Problem(sigma, alpha)


def _stage_one_length(g: NewsGameParams, phi_fast, phi_slow, zeta_fast, zeta_slow):
    """First-stage length when the 'fast' (lower-noise) source is read first."""
    if phi_fast <= 0.0:
        return math.inf
    return zeta_fast * (zeta_slow - zeta_fast) / (
        g.sigma_b**2 * phi_fast * (phi_fast + phi_slow)
    )


def reader_attention(g: NewsGameParams, phi, zeta) -> tuple[float, tuple[float, float]]:
    """First-stage length and long-run attention shares, in source order.

    The lower-noise source is read exclusively first; the long-run share
    of source i is zeta_i phi_j / (zeta_1 phi_2 + zeta_2 phi_1).
    """
    p1, p2 = float(phi[0]), float(phi[1])
    z1, z2 = float(zeta[0]), float(zeta[1])
    if min(p1, p2, z1, z2) <= 0:
        raise InvalidParamError("biases and noise levels must be positive")
    if z1 <= z2:
        t1 = _stage_one_length(g, p1, p2, z1, z2)
    else:
        t1 = _stage_one_length(g, p2, p1, z2, z1)
    denom = z1 * p2 + z2 * p1
    return float(t1), (z1 * p2 / denom, z2 * p1 / denom)


def source_payoffs(g: NewsGameParams, phi, zeta) -> tuple[float, float]:
    """Discounted attention minus the bias penalty, for each source.

    The slow source collects only its discounted long-run share; the fast
    source additionally collects the whole first stage.  phi_i = 0 is
    handled as the limit (the other source's attribute drops out of the
    state, so the unbiased source keeps all long-run attention).
    """
    p1, p2 = float(phi[0]), float(phi[1])
    z1, z2 = float(zeta[0]), float(zeta[1])
    if min(p1, p2) < 0 or min(z1, z2) <= 0:
        raise InvalidParamError("noise must be positive and biases non-negative")
    if p1 == 0.0 and p2 == 0.0:
        raise InvalidParamError("at most one source may be exactly unbiased")
    penalty1 = g.lam * (g.kappa - p1) ** 2
    penalty2 = g.lam * (g.kappa - p2) ** 2
    denom = z1 * p2 + z2 * p1
    share1 = z1 * p2 / denom
    if z1 <= z2:
        t1 = _stage_one_length(g, p1, p2, z1, z2)
        disc = math.exp(-g.r * t1) if math.isfinite(t1) else 0.0
        att1 = 1.0 - disc * (1.0 - share1)
    else:
        t1 = _stage_one_length(g, p2, p1, z2, z1)
        disc = math.exp(-g.r * t1) if math.isfinite(t1) else 0.0
        att1 = disc * share1
    return att1 - penalty1, (1.0 - att1) - penalty2


def equilibrium(g: NewsGameParams) -> NewsOutcome:
    """Closed-form symmetric equilibrium of the bias/precision game.

    phi* = (kappa + sqrt(kappa^2 - 1/(2 lam)))/2 and
    zeta* = sigma_b phi* / sqrt(r).  Guaranteed to be an equilibrium when
    lam kappa^2 >= 1.6; below that the formula value is still returned but
    flagged (and warned), since profitable double deviations may exist.
    """
    disc = g.kappa**2 - 1.0 / (2.0 * g.lam) if g.lam > 0 else -math.inf
    if disc < 0:
        raise InvalidParamError(
            "bias incentive too weak: lam * kappa^2 must be at least 1/2 "
            "for the equilibrium formula to be real"
        )
    phi_star = 0.5 * (g.kappa + math.sqrt(disc))
    zeta_star = g.sigma_b * phi_star / math.sqrt(g.r)
    guaranteed = g.lam * g.kappa**2 >= EXISTENCE_THRESHOLD
    if not guaranteed:
        warnings.warn(
            "lam * kappa^2 < 1.6: pure-strategy existence is not guaranteed",
            ExistenceNotGuaranteedWarning,
            stacklevel=2,
        )
    payoff = 0.5 - g.lam * (g.kappa - phi_star) ** 2
    return NewsOutcome(
        phi_star=phi_star,
        zeta_star=zeta_star,
        t1_star=0.0,
        shares=(0.5, 0.5),
        payoffs=(payoff, payoff),
        existence_guaranteed=guaranteed,
    )


def _deviation_payoffs(g: NewsGameParams, phi_dev, zeta_dev, phi_opp, zeta_opp):
    """Vectorized deviator payoff over arrays of (phi_dev, zeta_dev)."""
    pd = np.asarray(phi_dev, dtype=np.float64)
    zd = np.asarray(zeta_dev, dtype=np.float64)
    sb2 = g.sigma_b**2
    penalty = g.lam * (g.kappa - pd) ** 2
    denom = zd * phi_opp + zeta_opp * pd
    share = np.divide(zd * phi_opp, denom, out=np.ones_like(denom), where=denom > 0)
    fast = zd <= zeta_opp
    with np.errstate(divide="ignore", invalid="ignore"):
        t1_fast = np.where(
            pd > 0, zd * (zeta_opp - zd) / (sb2 * pd * (pd + phi_opp)), np.inf
        )
    t1_slow = zeta_opp * (zd - zeta_opp) / (sb2 * phi_opp * (phi_opp + pd))
    att = np.where(
        fast,
        1.0 - np.exp(-g.r * np.where(fast, t1_fast, 0.0)) * (1.0 - share),
        np.exp(-g.r * np.where(fast, 0.0, t1_slow)) * share,
    )
    return att - penalty


@dataclass(frozen=True)
class DeviationScan:
    """Best-response grid certificate for a candidate profile."""

    max_gain: float
    best_phi: float
    best_zeta: float
    equilibrium_payoff: float
    n_phi: int
    n_zeta: int


def verify_equilibrium(
    g: NewsGameParams,
    n_phi: int = 200,
    n_zeta: int = 200,
    phi_max: float | None = None,
    zeta_max: float | None = None,
    zeta_decades: float = 3.0,
) -> DeviationScan:
    """Scan unilateral (bias, noise) deviations against the formula profile.

    By symmetry one scan covers both sources.  The bias axis is linear on
    [0, 3 kappa]; the noise axis logarithmic up to 3 zeta*.  Returns the
    largest payoff gain found; <= ~1e-6 certifies the equilibrium at this
    resolution, while a clearly positive value exhibits a profitable
    deviation (expected when lam kappa^2 < 1.6).
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExistenceNotGuaranteedWarning)
        eq = equilibrium(g)
    phi_hi = 3.0 * g.kappa if phi_max is None else phi_max
    zeta_hi = 3.0 * eq.zeta_star if zeta_max is None else zeta_max
    phis = np.linspace(0.0, phi_hi, n_phi)
    zetas = np.geomspace(zeta_hi * 10.0 ** (-zeta_decades), zeta_hi, n_zeta)
    base = float(
        _deviation_payoffs(g, eq.phi_star, eq.zeta_star, eq.phi_star, eq.zeta_star)
    )

    def row(z):
        return _deviation_payoffs(g, phis, np.full_like(phis, z), eq.phi_star, eq.zeta_star)

    gains = np.vstack(map_chunked(row, zetas)) - base
    flat = int(np.argmax(gains))
    i_z, i_p = divmod(flat, phis.size)
    return DeviationScan(
        max_gain=float(gains[i_z, i_p]),
        best_phi=float(phis[i_p]),
        best_zeta=float(zetas[i_z]),
        equilibrium_payoff=base,
        n_phi=n_phi,
        n_zeta=n_zeta,
    )
