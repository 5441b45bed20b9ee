"""Command-line front end.

Exit status: 0 on success, 1 on input errors (bad flags, unknown preset,
malformed model file, violated preconditions), 2 on numerical failures.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import analysis, scatter, spectra, timedomain
from .errors import InputError, NumericalError
from .model import LeadSpec, ScatteringProblem, load_config
from .output import write_json, write_table
from .presets import get_preset

EXIT_OK, EXIT_INPUT, EXIT_NUMERICAL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit with 2, which is reserved
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def parse_int_list(text: str) -> list[int]:
    """``"a..b"`` (inclusive) and comma lists, combinable: ``"2..5,8,10"``."""
    out = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = part.split("..")
                lo, hi = int(lo), int(hi)
                if hi < lo:
                    raise InputError(f"empty range {part!r}")
                out.extend(range(lo, hi + 1))
            elif part:
                out.append(int(part))
    except ValueError:
        raise InputError(f"cannot parse N list {text!r}; use a..b or comma-separated integers") from None
    if not out:
        raise InputError("empty N list")
    return out


def parse_qgrid(text: str) -> np.ndarray:
    try:
        lo, hi, count = text.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise InputError(f"cannot parse q grid {text!r}; expected lo:hi:count") from None
    if count < 1:
        raise InputError("q grid needs a positive point count")
    return np.linspace(lo, hi, count)


def parse_leads(text: str) -> tuple[int, int]:
    try:
        left, right = (int(v) for v in text.split(","))
    except ValueError:
        raise InputError(f"cannot parse lead lengths {text!r}; expected L,R") from None
    return left, right


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    src = common.add_mutually_exclusive_group(required=True)
    src.add_argument("--model", type=Path, help="model file (JSON)")
    src.add_argument("--preset", help="named preset, e.g. fig2b")
    common.add_argument("--N", help="barrier widths: a..b or comma list")
    common.add_argument("--q", type=float, help="incident Bloch wave number in (0, pi)")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    p = _Parser(prog="nhtunnel", description="Non-Hermitian barrier tunneling: spectra, scattering, phase times.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("spectra", parents=[common], help="PBC loops, OBC spectrum, roots at E0")
    s.add_argument("--nk", type=int, default=256)

    s = sub.add_parser("scatter", parents=[common], help="R and T per (q, N)")
    s.add_argument("--qgrid", help="lo:hi:count")
    s.add_argument("--method", choices=("direct", "ansatz"), default="direct")

    s = sub.add_parser("hartman", parents=[common], help="tau(N), |T|^2(N) and verdict")
    s.add_argument("--dq", type=float, default=analysis.DEFAULT_DQ)
    s.add_argument("--method", choices=("direct", "ansatz"), default="direct")

    s = sub.add_parser("asymptotic", parents=[common], help="T(N) beta_s^-N convergence")
    s.add_argument("--method", choices=("direct", "ansatz"), default="direct")

    s = sub.add_parser("wavepacket", parents=[common], help="time-domain peak advancement")
    s.add_argument("--dt", type=float)
    s.add_argument("--tmax", type=float)
    s.add_argument("--probe", type=int)
    s.add_argument("--leads", help="lead lengths L,R")
    s.add_argument("--n0", type=float, help="initial packet centre")
    s.add_argument("--w0", type=float, help="packet width")
    s.add_argument("--snapshots", type=int, metavar="STRIDE", help="also write |psi(n, t)| every STRIDE steps")
    return p


class _Scenario:
    """Model plus defaults, from a preset or a model file."""

    def __init__(self, args):
        self.preset = None
        if args.preset:
            self.preset = get_preset(args.preset)
            self.model, self.lead = self.preset.model, self.preset.lead
        else:
            try:
                text = args.model.read_text(encoding="utf-8")
            except OSError as exc:
                raise InputError(f"cannot read model file: {exc}") from None
            self.model, self.lead = load_config(text)
        self.args = args

    @property
    def q(self) -> float:
        if self.args.q is not None:
            return self.args.q
        return self.preset.q if self.preset else np.pi / 2

    def N_list(self, default_attr: str) -> list[int]:
        if self.args.N:
            return parse_int_list(self.args.N)
        if self.preset is None:
            raise InputError("--N is required with --model")
        val = getattr(self.preset, default_attr)
        return [val] if isinstance(val, int) else list(val)


def _cmd_spectra(sc: _Scenario, args) -> str:
    fmt = args.format
    loops = spectra.pbc_spectrum(sc.model, args.nk)
    rows = [
        (k, b + 1, E.real, E.imag)
        for b in range(loops.energies.shape[0])
        for k, E in zip(loops.k_grid, loops.energies[b])
    ]
    write_table(args.out / "pbc.csv", ("k", "band", "ReE", "ImE"), rows, fmt)
    N = sc.N_list("N")[-1]
    obc = spectra.obc_spectrum(sc.model, N)
    write_table(
        args.out / "obc.csv",
        ("index", "ReE", "ImE"),
        [(i, E.real, E.imag) for i, E in enumerate(obc.energies)],
        fmt,
    )
    E0 = 2 * sc.lead.kappa * np.cos(sc.q)
    rs = spectra.barrier_roots(sc.model, E0)
    write_table(
        args.out / "roots.csv",
        ("l", "ReBeta", "ImBeta", "absBeta"),
        [(l + 1, b.real, b.imag, abs(b)) for l, b in enumerate(rs.roots)],
        fmt,
    )
    opaque = bool(np.all(np.abs(np.abs(rs.roots) - 1) > spectra.OPACITY_TOL))
    return (
        f"E0={E0:.6g} opaque={opaque} beta_s={rs.beta_s:.6g} gap_ratio={rs.gap_ratio:.6g} "
        f"max|Im E_obc|(N={N})={np.max(np.abs(obc.energies.imag)):.3g}"
    )


def _cmd_scatter(sc: _Scenario, args) -> str:
    if args.qgrid:
        q_grid = parse_qgrid(args.qgrid)
    else:
        q_grid = np.array([sc.q])
    Ns = sc.N_list("N")
    rows, failures, last = [], 0, None
    for N in Ns:
        if len(q_grid) == 1:
            # single point: let errors propagate with their own exit status
            sol = scatter.solve(ScatteringProblem(sc.model, sc.lead, N, float(q_grid[0])), args.method)
            pts = [scatter.ScanPoint(sol.problem.q, sol.R, sol.T, sol.residual)]
        else:
            pts = scatter.transmission_scan(sc.model, sc.lead, N, q_grid, args.method)
        for p in pts:
            failures += not p.ok
            rows.append((p.q, N, p.R.real, p.R.imag, p.T.real, p.T.imag, abs(p.T) ** 2, p.residual, args.method))
            last = p
    write_table(
        args.out / "scatter.csv",
        ("q", "N", "ReR", "ImR", "ReT", "ImT", "absT2", "residual", "method"),
        rows,
        args.format,
    )
    if failures == len(rows):
        raise NumericalError(f"all {failures} scattering solves failed")
    msg = f"{len(rows)} points written, {failures} failed"
    if len(rows) == 1:
        msg = f"|T|^2={abs(last.T) ** 2:.10g} |R|^2={abs(last.R) ** 2:.10g} residual={last.residual:.2e}"
    return msg


def _cmd_hartman(sc: _Scenario, args) -> str:
    prof = analysis.hartman_profile(sc.model, sc.lead, sc.q, sc.N_list("N_list"), args.dq, args.method)
    rows = [
        (int(N), tau, t2, np.log10(t2))
        for N, tau, t2 in zip(prof.N_values, prof.tau_values, prof.absT2_values)
    ]
    write_table(args.out / "hartman.csv", ("N", "tau", "absT2", "log10_absT2"), rows, args.format)
    write_json(args.out / "hartman_summary.json", prof.summary())
    return (
        f"verdict {prof.verdict} predicted_slope={prof.predicted_slope:.6g} "
        f"fitted_slope={prof.fitted_slope:.6g}"
    )


def _cmd_asymptotic(sc: _Scenario, args) -> str:
    fac = analysis.asymptotic_factor(sc.model, sc.lead, sc.q, sc.N_list("N_list"), args.method)
    rows = [(int(N), t.real, t.imag, abs(t)) for N, t in zip(fac.N_values, fac.Ttilde_estimates)]
    write_table(args.out / "asymptotic.csv", ("N", "ReTtilde", "ImTtilde", "absTtilde"), rows, args.format)
    write_json(
        args.out / "asymptotic_summary.json",
        {"beta_s": fac.beta_s, "gap_ratio": fac.gap_ratio, "spread": fac.spread},
    )
    return f"beta_s={fac.beta_s:.6g} gap_ratio={fac.gap_ratio:.6g} spread={fac.spread:.3g}"


def _wavepacket_config(sc: _Scenario, args) -> timedomain.WavepacketConfig:
    p = sc.preset
    n0 = args.n0 if args.n0 is not None else (p.n0 if p else None)
    w0 = args.w0 if args.w0 is not None else (p.w0 if p else None)
    probe = args.probe if args.probe is not None else (p.probe_site if p else None)
    if n0 is None or w0 is None or probe is None:
        raise InputError("--n0, --w0 and --probe are required with --model")
    cfg = timedomain.auto_config(sc.lead, n0, w0, probe, q=sc.q, t_max=args.tmax)
    if args.leads:
        left, right = parse_leads(args.leads)
        cfg = replace(cfg, left_lead_len=left, right_lead_len=right)
    if args.dt is not None:
        cfg = replace(cfg, dt=args.dt)
    return cfg


def _cmd_wavepacket(sc: _Scenario, args) -> str:
    cfg = _wavepacket_config(sc, args)
    Ns = sc.N_list("wave_N_list")
    peaks = []
    for N in Ns:
        rec = timedomain.simulate(sc.model, sc.lead, N, cfg, snapshot_stride=args.snapshots)
        peaks.append(rec.peak_time)
        write_table(
            args.out / f"probe_N{N}.csv",
            ("t", "abs_psi", "abs_psi_normalized"),
            zip(rec.times, rec.magnitudes, rec.normalized),
            args.format,
        )
        if args.snapshots:
            sites = timedomain.lattice_sites(sc.model, N, cfg)
            rows = ((t, int(n), a) for t, snap in zip(rec.snapshot_times, rec.snapshots) for n, a in zip(sites, snap))
            write_table(args.out / f"snapshots_N{N}.csv", ("t", "n", "abs_psi"), rows, args.format)
    summary = {"N": Ns, "peak_time": peaks}
    msg = "peak times " + " ".join(f"N={N}:{t:.6g}" for N, t in zip(Ns, peaks))
    if len(Ns) >= 2:
        rate = (peaks[-2] - peaks[-1]) / (Ns[-1] - Ns[-2])
        summary["rate"] = rate
        msg += f" rate={rate:.6g}"
    write_json(args.out / "wavepacket_summary.json", summary)
    return msg


_COMMANDS = {
    "spectra": _cmd_spectra,
    "scatter": _cmd_scatter,
    "hartman": _cmd_hartman,
    "asymptotic": _cmd_asymptotic,
    "wavepacket": _cmd_wavepacket,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sc = _Scenario(args)
        print(_COMMANDS[args.command](sc, args))
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
