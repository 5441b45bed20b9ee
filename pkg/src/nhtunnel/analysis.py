"""Tunneling phase time, Hartman profiles and the large-N factorization of T."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .errors import BranchAmbiguityError, NumericalError, OBCArcError, PreconditionError
from .model import BarrierModel, LeadSpec, ScatteringProblem
from .scatter import Method, solve, transmission_scan
from .spectra import barrier_roots, beta_s_phase_derivative

__all__ = [
    "SpectralScan",
    "HartmanProfile",
    "AsymptoticFactor",
    "phase_time",
    "spectral_scan",
    "hartman_profile",
    "asymptotic_factor",
    "HARTMAN_MAX_SLOPE",
    "NO_HARTMAN_MIN_SLOPE",
]

DEFAULT_DQ = 1e-4
# verdict thresholds, in units of 1/kappa per unit cell
HARTMAN_MAX_SLOPE = 1e-3
NO_HARTMAN_MIN_SLOPE = 1e-2
SLOPE_AGREEMENT = 0.10

Verdict = Literal["hartman", "no_hartman", "inconclusive"]


def phase_time(
    model: BarrierModel,
    lead: LeadSpec,
    N: int,
    q: float,
    dq: float = DEFAULT_DQ,
    method: Method = "direct",
) -> float:
    """Group delay from site 0 to the first right-lead site.

    ``tau = -(d phi_t / dq) / (2 kappa sin q)`` by a central difference of the
    transmission phase, unwrapped locally between the two stencil points.
    """
    if not (0 < q - dq and q + dq < np.pi):
        raise PreconditionError(f"stencil q +- dq must lie in (0, pi), got q={q}, dq={dq}")
    T_lo = solve(ScatteringProblem(model, lead, N, q - dq), method).T
    T_hi = solve(ScatteringProblem(model, lead, N, q + dq), method).T
    if T_lo == 0 or T_hi == 0:
        raise BranchAmbiguityError("transmission vanishes inside the stencil")
    dphi = float(np.angle(T_hi / T_lo))
    if abs(dphi) > np.pi / 2:
        raise BranchAmbiguityError(
            f"transmission phase jumps by {dphi:.3f} rad across the stencil; reduce dq"
        )
    return -dphi / (2 * dq * 2 * lead.kappa * np.sin(q))


@dataclass(frozen=True)
class SpectralScan:
    q_grid: np.ndarray
    T_values: np.ndarray
    phase_unwrapped: np.ndarray
    tau: np.ndarray  # NaN at the two end points


def spectral_scan(
    model: BarrierModel, lead: LeadSpec, N: int, q_grid: Sequence[float], method: Method = "direct"
) -> SpectralScan:
    q = np.asarray(q_grid, dtype=float)
    pts = transmission_scan(model, lead, N, q, method)
    T = np.array([p.T for p in pts])
    phi = np.unwrap(np.angle(T))
    tau = np.full(len(q), np.nan)
    tau[1:-1] = -(phi[2:] - phi[:-2]) / ((q[2:] - q[:-2]) * 2 * lead.kappa * np.sin(q[1:-1]))
    return SpectralScan(q, T, phi, tau)


@dataclass(frozen=True)
class HartmanProfile:
    N_values: np.ndarray
    tau_values: np.ndarray
    absT2_values: np.ndarray
    predicted_slope: float
    fitted_slope: float
    verdict: Verdict

    def summary(self) -> dict:
        return {
            "verdict": self.verdict,
            "predicted_slope": self.predicted_slope,
            "fitted_slope": self.fitted_slope,
        }


def classify(fitted: float, predicted: float) -> Verdict:
    if abs(fitted) < HARTMAN_MAX_SLOPE and abs(predicted) < HARTMAN_MAX_SLOPE:
        return "hartman"
    if (
        abs(fitted) > NO_HARTMAN_MIN_SLOPE
        and abs(predicted) > NO_HARTMAN_MIN_SLOPE
        and abs(fitted - predicted) <= SLOPE_AGREEMENT * abs(predicted)
    ):
        return "no_hartman"
    return "inconclusive"


def hartman_profile(
    model: BarrierModel,
    lead: LeadSpec,
    q: float,
    N_list: Sequence[int],
    dq: float = DEFAULT_DQ,
    method: Method = "direct",
) -> HartmanProfile:
    """tau(N), |T|^2(N) and a Hartman verdict.

    The fitted slope is a least-squares line through the upper half of
    ``N_list``; the predicted slope is ``-(d arg beta_s/dq) / (2 kappa sin q)``.
    """
    Ns = np.asarray(sorted(set(int(n) for n in N_list)))
    if len(Ns) < 4:
        raise PreconditionError(f"hartman_profile needs at least 4 barrier widths, got {len(Ns)}")
    taus, t2 = [], []
    for N in Ns:
        taus.append(phase_time(model, lead, int(N), q, dq, method))
        t2.append(solve(ScatteringProblem(model, lead, int(N), q), method).absT2)
    taus = np.asarray(taus)
    upper = slice(len(Ns) // 2, None)
    fitted = float(np.polyfit(Ns[upper], taus[upper], 1)[0])
    dphi = beta_s_phase_derivative(model, lead.kappa, q, dq)
    predicted = -dphi / (2 * lead.kappa * np.sin(q))
    return HartmanProfile(Ns, taus, np.asarray(t2), predicted, fitted, classify(fitted, predicted))


@dataclass(frozen=True)
class AsymptoticFactor:
    N_values: np.ndarray
    Ttilde_estimates: np.ndarray
    beta_s: complex
    gap_ratio: float

    @property
    def spread(self) -> float:
        """Largest pairwise relative difference among the last three estimates."""
        tail = self.Ttilde_estimates[-3:]
        d = np.abs(tail[:, None] - tail[None, :])
        return float(d.max() / np.abs(tail[-1]))


def asymptotic_factor(
    model: BarrierModel,
    lead: LeadSpec,
    q: float,
    N_list: Sequence[int],
    method: Method = "direct",
) -> AsymptoticFactor:
    """``T(N) beta_s^-N`` for each N; only meaningful off the OBC arc."""
    E0 = 2 * lead.kappa * np.cos(q)
    rs = barrier_roots(model, E0)
    if rs.gap_ratio <= 1 + 1e-9:
        raise OBCArcError(
            f"|beta_s+1|/|beta_s| = {rs.gap_ratio:.12g} at E0={E0:.6g}: the energy lies on the "
            "open-boundary spectrum and T does not factor as T~ beta_s^N"
        )
    Ns = np.asarray(sorted(set(int(n) for n in N_list)))
    if len(Ns) < 3:
        raise PreconditionError("asymptotic_factor needs at least 3 barrier widths")
    log_bs = np.log(complex(rs.beta_s))
    tt = np.array(
        [solve(ScatteringProblem(model, lead, int(N), q), method).T * np.exp(-N * log_bs) for N in Ns]
    )
    if not np.all(np.isfinite(tt)):
        raise NumericalError("non-finite T~ estimate")
    return AsymptoticFactor(Ns, tt, rs.beta_s, rs.gap_ratio)
