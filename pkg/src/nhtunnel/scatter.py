"""Stationary scattering across the barrier at ``E0 = 2 kappa cos q``.

Two independent routes solve the same boundary-value problem:

* :func:`solve_direct` eliminates the leads analytically and solves the
  ``M N + 2`` lattice equations for ``(R, psi_inside, T)``;
* :func:`solve_ansatz` expands the barrier wave function on the evanescent
  roots ``beta_l`` and solves only the ``s + r + 2`` junction equations.

Transmission is referenced to the first right-lead site, i.e. the right lead
carries ``T exp(-i q (n - N - 1))``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
import scipy.linalg as sla

from .errors import (
    DegenerateRootsError,
    InputError,
    NumericalError,
    PreconditionError,
    SingularSystemError,
)
from .model import BarrierModel, LeadSpec, ScatteringProblem
from .spectra import OPACITY_TOL, RootSet, barrier_roots

__all__ = [
    "ScatteringSolution",
    "ScanPoint",
    "direct_system",
    "lattice_residual",
    "solve_direct",
    "solve_ansatz",
    "solve",
    "transmission_scan",
]

RCOND_MIN = 1e-13
# a true double root comes back from the companion matrix split by ~sqrt(eps),
# so the separation test must sit well above 1e-8 to catch it
SIMPLE_ROOT_TOL = 1e-6

Method = Literal["direct", "ansatz"]


@dataclass(frozen=True)
class ScatteringSolution:
    problem: ScatteringProblem
    R: complex
    T: complex
    interior: np.ndarray  # psi[n, a] (direct) or G_l (ansatz)
    method: str
    residual: float
    rcond: float

    @property
    def absT2(self) -> float:
        return abs(self.T) ** 2


def direct_system(problem: ScatteringProblem) -> tuple[np.ndarray, np.ndarray]:
    """Dense lattice equations ``A x = b`` with ``x = (R, psi_(1,1) .. psi_(N,M), T)``."""
    model, N, q = problem.model, problem.N, problem.q
    kappa, E0, M = problem.lead.kappa, problem.E0, model.M
    n_unk = M * N + 2
    A = np.zeros((n_unk, n_unk), dtype=complex)
    b = np.zeros(n_unk, dtype=complex)
    t_col = n_unk - 1

    def col(n, a):
        return 1 + (n - 1) * M + (a - 1)

    # left lead site 0 with psi_-1 = e^{iq} + R e^{-iq}
    A[0, 0] = E0 - kappa * np.exp(-1j * q)
    A[0, col(1, 1)] = -kappa
    b[0] = kappa * np.exp(1j * q) - E0
    for n in range(1, N + 1):
        for a in range(1, M + 1):
            row = col(n, a)
            A[row, row] += E0 - model.onsite[a - 1]
            for h in model.hoppings:
                if h.to_site == a and 1 <= n + h.d <= N:
                    A[row, col(n + h.d, h.from_site)] -= h.amplitude
    # junction couplings to psi_0 = 1 + R and psi_(N+1) = T
    A[col(1, 1), 0] -= kappa
    b[col(1, 1)] += kappa
    A[col(N, M), t_col] -= kappa
    # right lead site N+1 with psi_(N+2) = T e^{-iq}
    A[t_col, t_col] = E0 - kappa * np.exp(-1j * q)
    A[t_col, col(N, M)] = -kappa
    return A, b


def _defect(A, x, b) -> float:
    return float(np.max(np.abs(A @ x - b)) / max(1.0, np.max(np.abs(x))))


def lattice_residual(problem: ScatteringProblem, R: complex, psi: np.ndarray, T: complex) -> float:
    """Largest lattice-equation defect, relative to ``max(1, max |amplitude|)``."""
    A, b = direct_system(problem)
    x = np.concatenate(([R], np.asarray(psi).ravel(), [T]))
    return _defect(A, x, b)


def _lu_solve(A: np.ndarray, b: np.ndarray, what: str) -> tuple[np.ndarray, float]:
    # column equilibration so rcond reflects the problem, not the unknowns' units
    colscale = np.max(np.abs(A), axis=0)
    colscale[colscale == 0] = 1.0
    As = A / colscale
    lu, piv = sla.lu_factor(As, check_finite=True)
    anorm = np.linalg.norm(As, 1)
    rcond = float(sla.lapack.zgecon(lu, anorm, norm="1")[0]) if np.all(np.diag(lu)) else 0.0
    if not rcond >= RCOND_MIN:
        cond = np.inf if rcond == 0 else 1 / rcond
        raise SingularSystemError(
            f"{what} is singular (condition number {cond:.3g}); possible bound state at this energy",
            cond=cond,
        )
    return sla.lu_solve((lu, piv), b) / colscale, rcond


def solve_direct(problem: ScatteringProblem) -> ScatteringSolution:
    A, b = direct_system(problem)
    x, rcond = _lu_solve(A, b, "lattice system")
    psi = x[1:-1].reshape(problem.N, problem.model.M)
    residual = _defect(A, x, b)
    return ScatteringSolution(problem, complex(x[0]), complex(x[-1]), psi, "direct", residual, rcond)


def _boundary_sites(model: BarrierModel, N: int) -> list[tuple[int, int]]:
    """Barrier site equations not satisfied automatically by the bulk ansatz."""
    M = model.M
    sites = []
    for n in range(1, N + 1):
        for a in range(1, M + 1):
            edge = (n, a) in ((1, 1), (N, M))
            cut = any(h.to_site == a and not 1 <= n + h.d <= N for h in model.hoppings)
            if edge or cut:
                sites.append((n, a))
    return sites


def _mode_coefficients(roots: RootSet, N: int, m: int, right: bool) -> np.ndarray:
    """Coefficient of each scaled amplitude g_l in psi at cell m.

    Growing modes carry ``(beta_s/beta_l)^N``; rows on the right edge are
    divided by ``beta_s^N``. Everything is evaluated via logarithms so that no
    intermediate power over- or underflows.
    """
    logb = np.log(roots.roots.astype(complex))
    log_bs = logb[roots.s - 1]
    L = len(logb)
    expo = np.empty(L, dtype=complex)
    decay = np.arange(L) < roots.s
    expo[decay] = m * logb[decay]
    expo[~decay] = N * log_bs + (m - N) * logb[~decay]
    if right:
        expo = expo - N * log_bs
    return np.exp(expo)


def solve_ansatz(problem: ScatteringProblem, *, check_opacity: bool = True) -> ScatteringSolution:
    """Junction matching on the evanescent-wave ansatz.

    ``check_opacity=False`` admits roots on the unit circle (a transparent
    barrier); all other preconditions still apply.
    """
    model, N, q = problem.model, problem.N, problem.q
    kappa, E0, M = problem.lead.kappa, problem.E0, model.M
    rs = barrier_roots(model, E0)
    L = len(rs.roots)
    if N <= L:
        raise PreconditionError(f"ansatz requires N > r + s = {L}, got N={N}")
    if check_opacity and np.any(np.abs(np.abs(rs.roots) - 1) <= OPACITY_TOL):
        raise PreconditionError("barrier is not opaque at E0 (a root has |beta| = 1)")
    if rs.min_separation() <= SIMPLE_ROOT_TOL * np.max(np.abs(rs.roots)):
        raise DegenerateRootsError("determinantal roots are not simple; use solve_direct")
    sites = _boundary_sites(model, N)
    if len(sites) != L:
        raise PreconditionError(
            f"hopping structure gives {len(sites)} junction equations for {L} roots; "
            "the evanescent ansatz does not apply, use solve_direct"
        )
    U = rs.eigenvectors
    half = (N + 1) / 2
    # unknowns: R, g_1..g_L, T~
    A = np.zeros((L + 2, L + 2), dtype=complex)
    b = np.zeros(L + 2, dtype=complex)
    A[0, 0] = E0 - kappa * np.exp(-1j * q)
    A[0, 1 : L + 1] = -kappa * U[:, 0] * _mode_coefficients(rs, N, 1, right=False)
    b[0] = kappa * np.exp(1j * q) - E0
    for i, (n, a) in enumerate(sites, start=1):
        right = n > half
        row = np.zeros(L, dtype=complex)
        row += (E0 - model.onsite[a - 1]) * U[:, a - 1] * _mode_coefficients(rs, N, n, right)
        for h in model.hoppings:
            m = n + h.d
            if h.to_site == a and 1 <= m <= N:
                row -= h.amplitude * U[:, h.from_site - 1] * _mode_coefficients(rs, N, m, right)
        A[i, 1 : L + 1] = row
        if (n, a) == (1, 1):
            A[i, 0] -= kappa
            b[i] += kappa
        if (n, a) == (N, M):
            A[i, L + 1] -= kappa
    A[L + 1, L + 1] = E0 - kappa * np.exp(-1j * q)
    A[L + 1, 1 : L + 1] = -kappa * U[:, M - 1] * _mode_coefficients(rs, N, N, right=True)
    x, rcond = _lu_solve(A, b, "matching matrix")

    R, g, Tt = complex(x[0]), x[1 : L + 1], complex(x[-1])
    logb = np.log(rs.roots.astype(complex))
    log_bs = logb[rs.s - 1]
    T = Tt * np.exp(N * log_bs)
    G = g.astype(complex).copy()
    G[rs.s :] *= np.exp(N * (log_bs - logb[rs.s :]))
    psi = np.array([(g * _mode_coefficients(rs, N, m, False)) @ U for m in range(1, N + 1)])
    residual = lattice_residual(problem, R, psi, T)
    return ScatteringSolution(problem, R, complex(T), G, "ansatz", residual, rcond)


def solve(problem: ScatteringProblem, method: Method = "direct") -> ScatteringSolution:
    if method == "direct":
        return solve_direct(problem)
    if method == "ansatz":
        return solve_ansatz(problem)
    raise InputError(f"unknown method {method!r}")


@dataclass(frozen=True)
class ScanPoint:
    q: float
    R: complex
    T: complex
    residual: float
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def transmission_scan(
    model: BarrierModel,
    lead: LeadSpec,
    N: int,
    q_grid: Sequence[float],
    method: Method = "direct",
) -> list[ScanPoint]:
    """Per-q solves; failures are recorded on the point and the scan continues."""
    out = []
    for q in q_grid:
        q = float(q)
        try:
            sol = solve(ScatteringProblem(model, lead, N, q), method)
        except (NumericalError, InputError) as exc:
            out.append(ScanPoint(q, complex(np.nan, np.nan), complex(np.nan, np.nan), np.nan, str(exc)))
            continue
        out.append(ScanPoint(q, sol.R, sol.T, sol.residual))
    return out
