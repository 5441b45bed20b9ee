"""Barrier and lead data model, Bloch Hamiltonian and determinantal polynomial.

Conventions
-----------
A barrier is ``N`` unit cells of ``M`` sites (1-based site labels). A hopping
entry ``(d, from_site, to_site, amplitude)`` couples site ``from_site`` of cell
``n + d`` into the equation of site ``to_site`` of cell ``n``::

    E psi[n, to] = onsite[to] psi[n, to] + sum amplitude * psi[n + d, from]

so that the Bloch Hamiltonian is ``H[to, from] = sum amplitude * beta**d``.
For ``M = 1`` the entry with offset ``d`` is the hopping ``t_d`` of the
single-band Laurent Hamiltonian ``H(beta) = sum_d t_d beta**d``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import jsonschema
import numpy as np

from .errors import ModelError, PreconditionError

__all__ = [
    "HoppingEntry",
    "BarrierModel",
    "LeadSpec",
    "ScatteringProblem",
    "LaurentPoly",
    "single_band",
    "rice_mele",
    "parse_model",
    "load_config",
    "serialize_model",
    "bloch_hamiltonian",
    "determinant_poly",
]


@dataclass(frozen=True)
class HoppingEntry:
    d: int
    from_site: int
    to_site: int
    amplitude: complex

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.d, self.from_site, self.to_site)


@dataclass(frozen=True)
class BarrierModel:
    """Unit cell of the barrier superlattice.

    ``s`` and ``r`` are derived: the largest left (negative offset) and right
    (positive offset) hopping orders over all matrix elements.
    """

    sites_per_cell: int
    onsite: tuple[complex, ...]
    hoppings: tuple[HoppingEntry, ...]
    s: int = field(init=False)
    r: int = field(init=False)

    def __post_init__(self):
        M = self.sites_per_cell
        if not isinstance(M, (int, np.integer)) or M < 1:
            raise ModelError(f"sites_per_cell must be a positive integer, got {M!r}")
        onsite = tuple(complex(v) for v in self.onsite)
        if len(onsite) != M:
            raise ModelError(
                f"onsite has {len(onsite)} entries but sites_per_cell is {M}"
            )
        hops = tuple(
            h if isinstance(h, HoppingEntry) else HoppingEntry(*h) for h in self.hoppings
        )
        seen = set()
        for h in hops:
            if not (1 <= h.from_site <= M and 1 <= h.to_site <= M):
                raise ModelError(f"hopping {h.key} has a site index outside 1..{M}")
            if complex(h.amplitude) == 0:
                raise ModelError(f"hopping {h.key} has zero amplitude; omit it instead")
            if h.key in seen:
                raise ModelError(f"duplicate hopping key (d, from, to) = {h.key}")
            seen.add(h.key)
        hops = tuple(
            HoppingEntry(int(h.d), int(h.from_site), int(h.to_site), complex(h.amplitude))
            for h in hops
        )
        left = [-h.d for h in hops if h.d < 0]
        right = [h.d for h in hops if h.d > 0]
        if not left or not right:
            raise ModelError(
                "no extremal hopping: need at least one entry with d < 0 and one with d > 0"
            )
        object.__setattr__(self, "onsite", onsite)
        object.__setattr__(self, "hoppings", hops)
        object.__setattr__(self, "s", max(left))
        object.__setattr__(self, "r", max(right))

    @property
    def M(self) -> int:
        return self.sites_per_cell

    def is_hermitian(self, tol: float = 1e-14) -> bool:
        if any(abs(v.imag) > tol for v in self.onsite):
            return False
        amps = {h.key: h.amplitude for h in self.hoppings}
        for (d, a, b), amp in amps.items():
            partner = amps.get((-d, b, a))
            if a == b and d == 0:
                if abs(amp.imag) > tol:
                    return False
                continue
            if partner is None or abs(partner - amp.conjugate()) > tol:
                return False
        return True

    def scale(self) -> float:
        """Largest energy scale among on-site terms and hoppings."""
        vals = [abs(v) for v in self.onsite] + [abs(h.amplitude) for h in self.hoppings]
        return max(vals)


@dataclass(frozen=True)
class LeadSpec:
    kappa: float = 1.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ModelError(f"lead hopping kappa must be > 0, got {self.kappa!r}")


@dataclass(frozen=True)
class ScatteringProblem:
    model: BarrierModel
    lead: LeadSpec
    N: int
    q: float

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise PreconditionError(f"barrier width must satisfy N >= 1, got N={self.N}")
        if not 0 < self.q < np.pi:
            raise PreconditionError(
                f"incident wave number must satisfy 0 < q < pi (positive group velocity), got q={self.q}"
            )

    @property
    def E0(self) -> float:
        return 2 * self.lead.kappa * np.cos(self.q)

    @property
    def v_g(self) -> float:
        return 2 * self.lead.kappa * np.sin(self.q)


def single_band(t: dict[int, complex]) -> BarrierModel:
    """M = 1 barrier from the Laurent coefficients ``{offset: t_offset}``."""
    onsite = complex(t.get(0, 0.0))
    hops = [HoppingEntry(d, 1, 1, complex(a)) for d, a in sorted(t.items()) if d != 0 and a != 0]
    return BarrierModel(1, (onsite,), tuple(hops))


def rice_mele(t1, t2, rho1, rho2, delta_a=0.0, delta_b=0.0) -> BarrierModel:
    """Two-site dimer chain with H = [[dA, t1 + rho2/beta], [t2 + rho1*beta, dB]]."""
    hops = [
        HoppingEntry(0, 2, 1, t1),
        HoppingEntry(-1, 2, 1, rho2),
        HoppingEntry(0, 1, 2, t2),
        HoppingEntry(1, 1, 2, rho1),
    ]
    return BarrierModel(2, (delta_a, delta_b), tuple(h for h in hops if h.amplitude != 0))


# -- model files ------------------------------------------------------------

_COMPLEX = {
    "type": "array",
    "items": {"type": "number"},
    "minItems": 2,
    "maxItems": 2,
}

MODEL_SCHEMA = {
    "type": "object",
    "required": ["sites_per_cell", "onsite", "hoppings"],
    "properties": {
        "sites_per_cell": {"type": "integer", "minimum": 1},
        "onsite": {"type": "array", "items": _COMPLEX},
        "hoppings": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["d", "from", "to", "amp"],
                "properties": {
                    "d": {"type": "integer"},
                    "from": {"type": "integer", "minimum": 1},
                    "to": {"type": "integer", "minimum": 1},
                    "amp": _COMPLEX,
                },
                "additionalProperties": False,
            },
        },
        "lead_kappa": {"type": "number", "exclusiveMinimum": 0},
    },
}


def _load_json(config_text: str | dict) -> dict:
    if isinstance(config_text, dict):
        data = config_text
    else:
        try:
            data = json.loads(config_text)
        except json.JSONDecodeError as exc:
            raise ModelError(f"model file is not valid JSON: {exc}") from None
    try:
        jsonschema.validate(data, MODEL_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ModelError(f"schema violation at {where}: {exc.message}") from None
    return data


def parse_model(config_text: str | dict) -> BarrierModel:
    """Parse and validate a model file (JSON text or an already-decoded dict)."""
    data = _load_json(config_text)
    onsite = tuple(complex(re, im) for re, im in data["onsite"])
    hops = []
    for h in data["hoppings"]:
        amp = complex(*h["amp"])
        if amp == 0:
            # zero entries are dropped, a model made only of them has no extremal hopping
            continue
        hops.append(HoppingEntry(h["d"], h["from"], h["to"], amp))
    return BarrierModel(data["sites_per_cell"], onsite, tuple(hops))


def load_config(config_text: str | dict) -> tuple[BarrierModel, LeadSpec]:
    data = _load_json(config_text)
    return parse_model(data), LeadSpec(float(data.get("lead_kappa", 1.0)))


def serialize_model(model: BarrierModel, lead: LeadSpec | None = None) -> str:
    doc = {
        "sites_per_cell": model.sites_per_cell,
        "onsite": [[v.real, v.imag] for v in model.onsite],
        "hoppings": [
            {"d": h.d, "from": h.from_site, "to": h.to_site, "amp": [h.amplitude.real, h.amplitude.imag]}
            for h in model.hoppings
        ],
    }
    if lead is not None:
        doc["lead_kappa"] = lead.kappa
    return json.dumps(doc, indent=2)


# -- Bloch Hamiltonian and determinant ---------------------------------------


def bloch_hamiltonian(model: BarrierModel, beta: complex) -> np.ndarray:
    beta = complex(beta)
    if beta == 0:
        raise PreconditionError("bloch_hamiltonian is undefined at beta = 0")
    H = np.diag(np.asarray(model.onsite, dtype=complex))
    for h in model.hoppings:
        H[h.to_site - 1, h.from_site - 1] += h.amplitude * beta**h.d
    return H


@dataclass(frozen=True)
class LaurentPoly:
    """``sum_{l=low}^{high} coeffs[l - low] * beta**l``."""

    low: int
    coeffs: np.ndarray

    @property
    def high(self) -> int:
        return self.low + len(self.coeffs) - 1

    def coeff(self, l: int) -> complex:
        if self.low <= l <= self.high:
            return complex(self.coeffs[l - self.low])
        return 0j

    def __call__(self, beta):
        beta = np.asarray(beta, dtype=complex)
        powers = np.arange(self.low, self.high + 1)
        return np.sum(self.coeffs * beta[..., None] ** powers, axis=-1)

    def poly_coeffs(self) -> np.ndarray:
        """Ordinary polynomial ``beta**(-low) * P(beta)``, highest power first."""
        return self.coeffs[::-1].copy()


def determinant_poly(model: BarrierModel, E0: complex, trim_tol: float = 1e-12) -> LaurentPoly:
    """Laurent coefficients of ``det(E0 - H(beta))``.

    For ``M = 1`` the coefficients are read off the hoppings directly. For
    ``M > 1`` the determinant is sampled at roots of unity over the widest
    possible band ``[-M s, M r]`` and interpolated by DFT; numerically vanishing
    outer coefficients (relative ``trim_tol``) are then dropped.
    """
    E0 = complex(E0)
    s, r, M = model.s, model.r, model.M
    if M == 1:
        c = np.zeros(s + r + 1, dtype=complex)
        for h in model.hoppings:
            c[h.d + s] -= h.amplitude
        c[s] += E0 - model.onsite[0]
        return LaurentPoly(-s, c)

    lo, hi = -M * s, M * r
    K = hi - lo + 1
    k = np.arange(K)
    betas = np.exp(2j * np.pi * k / K)
    eye = np.eye(M)
    vals = np.array([np.linalg.det(E0 * eye - bloch_hamiltonian(model, b)) for b in betas])
    c = np.fft.fft(vals * betas ** (-lo)) / K
    big = np.max(np.abs(c))
    keep = np.nonzero(np.abs(c) > trim_tol * big)[0]
    c = c[keep[0] : keep[-1] + 1]
    return LaurentPoly(lo + int(keep[0]), c)
