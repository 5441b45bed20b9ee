"""Named parameter sets for the reference barriers and their default scenarios."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .model import BarrierModel, LeadSpec, rice_mele, single_band
from .timedomain import WavepacketConfig, auto_config

__all__ = ["Preset", "PRESETS", "get_preset"]


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    model: BarrierModel
    lead: LeadSpec
    q: float
    N: int
    N_list: tuple[int, ...]
    # wave-packet scenario
    n0: float
    w0: float
    probe_site: int
    wave_N_list: tuple[int, ...]

    def wavepacket_config(self, **overrides) -> WavepacketConfig:
        kw = dict(n0=self.n0, w0=self.w0, probe_site=self.probe_site, q=self.q)
        kw.update(overrides)
        return auto_config(self.lead, **kw)


_HALF_PI = np.pi / 2
_KAPPA = LeadSpec(1.0)

_hn = single_band({-1: 1.0, 0: 1.85, 1: 0.8})
_hn_diss = single_band({-1: 1.0, 0: 2.1 - 0.2j, 1: 1.0})
_ghn = single_band({-2: 0.275, -1: -0.8667, 0: -2.3627, 1: -0.9184, 2: 0.25})
_rm = dict(t1=0.8, t2=1.0, rho1=0.5, rho2=0.7)
_long_diss = single_band({-2: 0.4, -1: 1.0, 0: 1.5 - 0.3j, 1: 1.0, 2: 0.3})

_HN_WAVE = dict(n0=-400.0, w0=150.0, probe_site=20, wave_N_list=(4, 6, 8, 10, 12))
_GHN_WAVE = dict(n0=-190.0, w0=80.0, probe_site=20, wave_N_list=(6, 8, 10, 12))
_RM_WAVE = dict(n0=-190.0, w0=80.0, probe_site=40, wave_N_list=(5, 7, 9, 11, 13, 15))
_SPECTRAL = dict(q=_HALF_PI, N=10, N_list=tuple(range(2, 31)))


def _p(name, description, model, spectral=_SPECTRAL, wave=_HN_WAVE):
    return Preset(name, description, model, _KAPPA, **spectral, **wave)


PRESETS: dict[str, Preset] = {
    p.name: p
    for p in [
        _p("fig2a", "dissipative on-site barrier, reciprocal hopping (no Hartman effect)", _hn_diss),
        _p("fig2b", "Hatano-Nelson barrier with non-reciprocal hopping", _hn),
        _p("fig3", "Hatano-Nelson barrier, wave-packet geometry", _hn),
        _p("fig3c", "dissipative barrier, wave-packet geometry", _hn_diss),
        _p("fig4", "next-nearest-neighbour non-reciprocal barrier", _ghn, wave=_GHN_WAVE),
        _p("fig5", "next-nearest-neighbour barrier, wave-packet geometry", _ghn, wave=_GHN_WAVE),
        _p("fig6b", "non-reciprocal Rice-Mele dimer chain", rice_mele(**_rm), wave=_RM_WAVE),
        _p("fig6c", "PT-symmetric Rice-Mele chain", rice_mele(**_rm, delta_a=0.1j, delta_b=-0.1j), wave=_RM_WAVE),
        _p("fig6d", "Rice-Mele chain with loss on one sublattice", rice_mele(**_rm, delta_b=-0.1j), wave=_RM_WAVE),
        _p("fig7", "non-reciprocal Rice-Mele chain, wave-packet geometry", rice_mele(**_rm), wave=_RM_WAVE),
        _p(
            "sec41diss",
            "dissipative long-range barrier with an isolated stationary point of arg beta_s",
            _long_diss,
            spectral=dict(q=1.7, N=10, N_list=tuple(range(2, 31))),
        ),
    ]
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise InputError(f"unknown preset {name!r}; choose from {', '.join(sorted(PRESETS))}") from None
