"""Random barrier generators shared by the property tests."""
import numpy as np

from nhtunnel.errors import InputError, NumericalError
from nhtunnel.model import BarrierModel, LeadSpec, ScatteringProblem, rice_mele, single_band
from nhtunnel.spectra import OPACITY_TOL, barrier_roots


def _c(rng, scale=1.0, complex_=True):
    z = rng.uniform(-scale, scale)
    if complex_:
        z = z + 1j * rng.uniform(-scale, scale)
    return z


def random_model(rng) -> BarrierModel:
    complex_ = rng.random() < 0.5
    if rng.random() < 0.5:
        s, r = rng.integers(1, 3, size=2)
        t = {d: _c(rng, 1.0, complex_) for d in range(-s, r + 1)}
        t[0] = _c(rng, 2.5, complex_)
        return single_band(t)
    return rice_mele(*(_c(rng, 1.0, complex_) for _ in range(4)), _c(rng, 1.0, complex_), _c(rng, 1.0, complex_))


def random_hermitian_model(rng) -> BarrierModel:
    if rng.random() < 0.5:
        s = int(rng.integers(1, 3))
        t = {0: rng.uniform(-2.5, 2.5)}
        for d in range(1, s + 1):
            t[d] = _c(rng)
            t[-d] = np.conj(t[d])
        return single_band(t)
    t1, rho2 = _c(rng), _c(rng)
    return rice_mele(t1, np.conj(t1), np.conj(rho2), rho2, rng.uniform(-1, 1), rng.uniform(-1, 1))


def ansatz_ready(problem: ScatteringProblem) -> bool:
    """Preconditions of the evanescent-wave solver, checked independently."""
    try:
        rs = barrier_roots(problem.model, problem.E0)
    except (NumericalError, InputError):
        return False
    b = rs.roots
    if np.any(np.abs(np.abs(b) - 1) <= 1e-3):  # comfortably opaque
        return False
    d = np.abs(b[:, None] - b[None, :])
    np.fill_diagonal(d, np.inf)
    if d.min() <= 1e-4 * np.abs(b).max():
        return False
    return problem.N > len(b)


def random_valid_problems(count: int, seed: int):
    """``count`` problems meeting the ansatz preconditions, plus the rejection count."""
    rng = np.random.default_rng(seed)
    out, rejected = [], 0
    while len(out) < count:
        model = random_model(rng)
        N = int(rng.integers(model.s + model.r + 1, 21))
        p = ScatteringProblem(model, LeadSpec(float(rng.uniform(0.5, 1.5))), N, float(rng.uniform(0.2, np.pi - 0.2)))
        if ansatz_ready(p):
            out.append(p)
        else:
            rejected += 1
    return out, rejected
