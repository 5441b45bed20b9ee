"""PBC loops, OBC spectra, ordered determinantal roots and opacity diagnostics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.optimize import linear_sum_assignment

from .errors import DegenerateRootsError, NumericalError, PreconditionError, RootTrackingError
from .model import BarrierModel, bloch_hamiltonian, determinant_poly

__all__ = [
    "SpectrumLoops",
    "ObcSpectrum",
    "RootSet",
    "pbc_spectrum",
    "obc_matrix",
    "obc_spectrum",
    "barrier_roots",
    "opacity_check",
    "beta_s_phase_derivative",
]

OPACITY_TOL = 1e-6
# relative modulus difference below which two roots count as equal-modulus
TIE_TOL = 1e-10


@dataclass(frozen=True)
class SpectrumLoops:
    k_grid: np.ndarray
    energies: np.ndarray  # shape (M, nk)


@dataclass(frozen=True)
class ObcSpectrum:
    N: int
    energies: np.ndarray


@dataclass(frozen=True)
class RootSet:
    """Roots of det(E0 - H(beta)) = 0 sorted by modulus, with eigenvectors.

    ``s`` is the number of roots on the decaying side of the split used by the
    scattering ansatz (the lowest power of the determinant, which equals the
    largest left hopping order for single-band and dimer chains).
    """

    E0: complex
    roots: np.ndarray
    eigenvectors: np.ndarray  # shape (s + r, M); row l is U^(l+1)
    s: int
    r: int
    modulus_ties: bool

    @property
    def beta_s(self) -> complex:
        return complex(self.roots[self.s - 1])

    @property
    def gap_ratio(self) -> float:
        return float(abs(self.roots[self.s]) / abs(self.roots[self.s - 1]))

    def min_separation(self) -> float:
        b = self.roots
        d = np.abs(b[:, None] - b[None, :])
        d[np.diag_indices_from(d)] = np.inf
        return float(d.min())


def pbc_spectrum(model: BarrierModel, nk: int = 256) -> SpectrumLoops:
    """Bloch bands on ``|beta| = 1``; bands are followed by nearest-match along k."""
    if nk < 16:
        raise PreconditionError(f"pbc_spectrum needs nk >= 16, got {nk}")
    k = 2 * np.pi * np.arange(nk) / nk
    M = model.M
    E = np.empty((M, nk), dtype=complex)
    for j, kj in enumerate(k):
        try:
            ev = np.linalg.eigvals(bloch_hamiltonian(model, np.exp(1j * kj)))
        except np.linalg.LinAlgError as exc:
            raise NumericalError(f"eigen-solver failed at k={kj}: {exc}") from None
        if j == 0:
            E[:, 0] = np.sort_complex(ev)
        elif M == 1:
            E[:, j] = ev
        else:
            _, cols = linear_sum_assignment(np.abs(E[:, j - 1][:, None] - ev[None, :]))
            E[:, j] = ev[cols]
    return SpectrumLoops(k, E)


def obc_matrix(model: BarrierModel, N: int) -> np.ndarray:
    """Dense ``M N x M N`` open-chain Hamiltonian (no leads)."""
    M = model.M
    H = np.zeros((M * N, M * N), dtype=complex)
    for n in range(N):
        for a in range(M):
            H[n * M + a, n * M + a] += model.onsite[a]
        for h in model.hoppings:
            m = n + h.d
            if 0 <= m < N:
                H[n * M + h.to_site - 1, m * M + h.from_site - 1] += h.amplitude
    return H


def obc_spectrum(model: BarrierModel, N: int) -> ObcSpectrum:
    if N < 1:
        raise PreconditionError(f"obc_spectrum needs N >= 1, got {N}")
    try:
        ev = sla.eigvals(obc_matrix(model, N))
    except (np.linalg.LinAlgError, sla.LinAlgError) as exc:
        raise NumericalError(f"eigen-solver failed for N={N}: {exc}") from None
    return ObcSpectrum(N, ev[np.lexsort((ev.imag, ev.real))])


def _order_roots(roots: np.ndarray) -> tuple[np.ndarray, bool]:
    """Ascending modulus; equal-modulus groups ordered by phase in [0, 2 pi)."""
    roots = roots[np.argsort(np.abs(roots), kind="stable")]
    mods = np.abs(roots)
    out, ties = [], False
    i = 0
    while i < len(roots):
        j = i + 1
        while j < len(roots) and mods[j] - mods[i] <= TIE_TOL * mods[j]:
            j += 1
        group = roots[i:j]
        if len(group) > 1:
            ties = True
            group = group[np.argsort(np.mod(np.angle(group), 2 * np.pi), kind="stable")]
        out.extend(group)
        i = j
    return np.asarray(out, dtype=complex), ties


def _null_vector(A: np.ndarray) -> np.ndarray:
    if A.shape == (1, 1):
        return np.ones(1, dtype=complex)
    _, sv, vh = np.linalg.svd(A)
    if sv[-2] <= 1e-8 * sv[0]:
        raise DegenerateRootsError(
            "nullspace of E0 - H(beta) has dimension > 1 (degenerate band crossing)"
        )
    u = vh[-1].conj()
    u = u / np.linalg.norm(u)
    first = np.nonzero(np.abs(u) > 1e-10)[0][0]
    return u * (abs(u[first]) / u[first])


def barrier_roots(model: BarrierModel, E0: complex) -> RootSet:
    """Companion-matrix roots of the determinantal Laurent polynomial at ``E0``."""
    E0 = complex(E0)
    P = determinant_poly(model, E0)
    s_det, r_det = -P.low, P.high
    if s_det < 1 or r_det < 1:
        raise NumericalError(
            f"determinant has no {'negative' if s_det < 1 else 'positive'} powers of beta "
            "at this energy (root at 0 or infinity)"
        )
    roots = np.roots(P.poly_coeffs())
    if len(roots) != s_det + r_det:
        raise NumericalError("leading or trailing determinant coefficient vanishes")
    roots, ties = _order_roots(roots)
    M = model.M
    vecs = np.array([_null_vector(E0 * np.eye(M) - bloch_hamiltonian(model, b)) for b in roots])
    return RootSet(E0, roots, vecs, s_det, r_det, ties)


def opacity_check(model: BarrierModel, E0: complex, tol: float = OPACITY_TOL) -> bool:
    rs = barrier_roots(model, E0)
    return bool(np.all(np.abs(np.abs(rs.roots) - 1) > tol))


def _track(target: complex, candidates: np.ndarray) -> int:
    d = np.abs(candidates - target)
    order = np.argsort(d)
    best = d[order[0]]
    if len(d) > 1 and d[order[1]] < 10 * best:
        raise RootTrackingError(
            f"ambiguous root tracking near beta={target:.6g}: "
            f"best distance {best:.3g}, second {d[order[1]]:.3g}"
        )
    return int(order[0])


def beta_s_phase_derivative(
    model: BarrierModel, kappa: float, q: float, dq: float = 1e-4
) -> float:
    """Central-difference ``d arg(beta_s) / dq`` at ``E0 = 2 kappa cos q``.

    The root is followed from ``q`` to ``q +- dq`` by nearest match rather than
    by re-sorting, so the estimate stays on one analytic branch.
    """
    if not (0 < q - dq and q + dq < np.pi):
        raise PreconditionError(f"stencil q +- dq must lie in (0, pi), got q={q}, dq={dq}")
    center = barrier_roots(model, 2 * kappa * np.cos(q))
    target = center.beta_s
    stencil = []
    for qq in (q - dq, q + dq):
        rs = barrier_roots(model, 2 * kappa * np.cos(qq))
        if np.any(np.abs(np.abs(rs.roots) - 1) <= OPACITY_TOL):
            raise PreconditionError(f"barrier is not opaque at q={qq} (a root has |beta| = 1)")
        if not rs.gap_ratio > 1:
            raise PreconditionError(f"|beta_s| < |beta_s+1| fails at q={qq}")
        idx = _track(target, rs.roots)
        if idx != rs.s - 1:
            raise RootTrackingError(
                f"tracked root at q={qq} is beta_{idx + 1}, not beta_s (s={rs.s})"
            )
        stencil.append(rs.roots[idx])
    lo, hi = stencil
    return float(np.angle(hi / lo) / (2 * dq))
