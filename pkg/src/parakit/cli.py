"""Deterministic command-line front end.

Every subcommand resolves its configuration from defaults, an optional
JSON config file, and explicit flags (in that precedence order), writes
its outputs plus a manifest echoing the fully resolved configuration,
and renders a figure next to the delimited output unless --no-plot is
given.  Identical configuration and seed produce byte-identical CSV and
JSON outputs; re-running from a manifest reproduces a run exactly.

Exit codes: 0 success, 2 configuration error, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .chain import MAX_DENSE_LENGTH, ChainSpec, build_hamiltonian_clock, diagonalize
from .effective import closed_form_second, decimate_fully, spectrum_comparison
from .gates import (
    dynamical_gate,
    gate_for_theta,
    hierarchy_level,
    witness_chain,
)
from .magic import (
    coverage_stats,
    nearest_strange_report,
    sample_words,
    strange_states,
    wigner,
)
from .rydberg import (
    BerryLoop,
    RydbergParams,
    adiabatic_eliminate,
    berry_phase_closed,
    berry_phase_numeric,
    evolve,
    rotating_hamiltonian,
)

OUTDIR_ENV = "PARAKIT_OUTDIR"


class ConfigError(Exception):
    """Raised for any invalid or unknown configuration value."""


# ---------------------------------------------------------------------------
# configuration plumbing

SCHEMAS: dict[str, dict[str, object]] = {
    "spectrum": {
        "L": 2, "f": "0.0", "J": "1.0", "phi": np.pi / 6, "phi_hat": np.pi / 6,
    },
    "effective": {
        "J": 1.0, "f_grid": "0.0:0.3:0.01", "phi": np.pi / 6, "phi_hat": np.pi / 6,
    },
    "gate-level": {
        "theta": "", "beta_t": "", "k_max": 8,
    },
    "sample": {
        "n": 5000, "len": 50, "theta": 1.0, "alphabet": "full",
        "seed": 7, "workers": 1, "bins": 12,
    },
    "magic-report": {
        "n": 10000, "len": 50, "theta": 1.0, "seed": 7, "workers": 1, "dmax": 0.2,
    },
    "rydberg-evolve": {
        "omega1": 1.0, "omega2": 1.0, "omega3": 1.0, "omega4": 1.0,
        "delta1": 0.0, "delta2": 0.0, "delta3": 20.0, "delta4": 20.0,
        "phi1": 0.0, "phi2": 0.0, "phi3": 0.0, "phi4": 0.0,
        "T": 10.0, "dt": 0.002, "psi0": 0, "stride": 10, "eliminated": False,
    },
    "rydberg-berry": {
        "envelope": 0.6, "omega23": 1.6, "branch": 1, "duration": 100.0,
        "ladder": 3,
    },
}


def _load_config_file(path: str, command: str) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    if "config" in data and "command" in data:  # a manifest from a previous run
        if data["command"] != command:
            raise ConfigError(
                f"manifest was written by subcommand {data['command']!r}, "
                f"not {command!r}"
            )
        data = data["config"]
        if not isinstance(data, dict):
            raise ConfigError("manifest 'config' entry must be a JSON object")
    return data


def resolve_config(command: str, file_config: dict, cli_values: dict) -> dict:
    """defaults < config file < explicit CLI flags, unknown keys rejected."""
    schema = SCHEMAS[command]
    config = dict(schema)
    for key, value in file_config.items():
        if key not in schema:
            raise ConfigError(f"unknown config key: {key!r}")
        config[key] = value
    for key, value in cli_values.items():
        if value is not None:
            config[key] = value
    return config


def _write_manifest(out_dir: Path, command: str, config: dict) -> Path:
    manifest = {
        "artifact": "parakit",
        "version": __version__,
        "command": command,
        "config": config,
    }
    path = out_dir / f"{command}_manifest.json"
    _write_json(path, manifest)
    return path


def _write_json(path: Path, obj) -> Path:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")
    return path


def _write_csv(path: Path, header: list[str], rows: list[list]) -> Path:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return path


def _float_list(text: str, count: int | None = None, name: str = "value") -> tuple[float, ...]:
    try:
        vals = tuple(float(x) for x in str(text).split(","))
    except ValueError as exc:
        raise ConfigError(f"{name}: cannot parse {text!r} as comma-separated floats") from exc
    if count is not None and len(vals) not in (1, count):
        raise ConfigError(f"{name}: expected 1 or {count} values, got {len(vals)}")
    if count is not None and len(vals) == 1:
        vals = vals * count
    return vals


def _grid(text: str) -> np.ndarray:
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"f_grid: expected start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"f_grid: cannot parse {text!r}") from exc
    if step <= 0 or stop < start:
        raise ConfigError("f_grid: need step > 0 and stop >= start")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(n)


# ---------------------------------------------------------------------------
# subcommand implementations

def run_spectrum(config: dict, out_dir: Path, plot: bool) -> None:
    L = int(config["L"])
    if not 1 <= L <= MAX_DENSE_LENGTH:
        raise ConfigError(
            f"L: chain length {L} outside [1, {MAX_DENSE_LENGTH}]; "
            f"the dense solver is capped at 3^{MAX_DENSE_LENGTH}"
        )
    f = _float_list(config["f"], L, "f")
    J = _float_list(config["J"], max(L - 1, 1), "J")[: max(L - 1, 0)]
    try:
        spec = ChainSpec(L=L, f=f, J=J, phi=float(config["phi"]),
                         phi_hat=float(config["phi_hat"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    result = diagonalize(build_hamiltonian_clock(spec))
    f_txt = ";".join(repr(x) for x in spec.f)
    j_txt = ";".join(repr(x) for x in spec.J)
    rows = [
        [f_txt, j_txt, repr(spec.phi), repr(spec.phi_hat), idx,
         float(e), int(p)]
        for idx, (e, p) in enumerate(zip(result.eigenvalues, result.parity_labels))
    ]
    _write_csv(out_dir / "spectrum.csv",
               ["f", "J", "phi", "phi_hat", "level_index", "eigenvalue", "parity_label"],
               rows)
    if plot:
        from .plotting import spectrum_figure

        spectrum_figure(result.eigenvalues, result.parity_labels, out_dir / "spectrum.png")


def run_effective(config: dict, out_dir: Path, plot: bool) -> None:
    J = float(config["J"])
    template = ChainSpec(L=2, f=(0.0, 0.0), J=(J,), phi=float(config["phi"]),
                         phi_hat=float(config["phi_hat"]))
    rows = spectrum_comparison(template, _grid(config["f_grid"]))
    csv_rows = [
        [repr(r.f), *(repr(x) for x in r.exact), *(repr(x) for x in r.perturbative),
         int(r.flag_nonperturbative)]
        for r in rows
    ]
    _write_csv(out_dir / "effective.csv",
               ["f", "E0_exact", "E1_exact", "E2_exact",
                "E0_pert", "E1_pert", "E2_pert", "flag_nonperturbative"],
               csv_rows)
    # both coupling conventions side by side: the perturbative product rule
    # and the strong-bond decimation rule with its factor 1/2 per bond
    mid = float(np.median([r.f for r in rows]))
    spec_mid = ChainSpec(L=2, f=(mid, mid), J=(J,), phi=template.phi,
                         phi_hat=template.phi_hat)
    summary = {
        "f_reference": mid,
        "perturbative_coupling": closed_form_second(spec_mid).coupling,
        "decimation_coupling": decimate_fully(spec_mid) if mid > 0 else 0.0,
    }
    _write_json(out_dir / "effective_summary.json", summary)
    if plot:
        from .plotting import comparison_figure

        comparison_figure(rows, out_dir / "effective.png")


def run_gate_level(config: dict, out_dir: Path, plot: bool) -> None:
    theta_txt = str(config["theta"]).strip()
    beta_txt = str(config["beta_t"]).strip()
    if bool(theta_txt) == bool(beta_txt):
        raise ConfigError("gate-level needs exactly one of theta (fraction of 2pi) or beta_t")
    if theta_txt:
        try:
            frac = Fraction(theta_txt)
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"theta: cannot parse {theta_txt!r} as a fraction") from exc
        theta = 2 * np.pi * float(frac)
        gate = gate_for_theta(theta)
        payload = {"theta": theta, "theta_fraction_of_2pi": str(frac)}
    else:
        try:
            beta_t = float(beta_txt)
        except ValueError as exc:
            raise ConfigError(f"beta_t: cannot parse {beta_txt!r} as a float") from exc
        dyn = dynamical_gate(beta_t)
        gate, theta = dyn.matrix, dyn.theta
        payload = {"theta": theta, "beta_t": beta_t}
    k_max = int(config["k_max"])
    verdict = hierarchy_level(gate, k_max)
    payload["k_max"] = k_max
    payload["level"] = verdict.level
    payload["witness_chain"] = witness_chain(gate, k_max) if not verdict.exceeded else None
    _write_json(out_dir / "gate_level.json", payload)
    sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def run_sample(config: dict, out_dir: Path, plot: bool) -> None:
    records = sample_words(
        seed=int(config["seed"]), n=int(config["n"]), length=int(config["len"]),
        theta=float(config["theta"]), alphabet=str(config["alphabet"]),
        workers=int(config["workers"]),
    )
    rows = [
        [r.word_index, repr(r.alpha), repr(r.beta), repr(r.gamma),
         repr(r.delta1), repr(r.delta2), repr(r.score_m), repr(r.wigner_min),
         repr(r.dist[0]), repr(r.dist[1]), repr(r.dist[2])]
        for r in records
    ]
    _write_csv(out_dir / "samples.csv",
               ["word_index", "alpha", "beta", "gamma", "delta1", "delta2",
                "score_M", "wigner_min", "dist_Sa", "dist_Sb", "dist_Sc"],
               rows)
    _write_json(out_dir / "coverage.json",
                coverage_stats(records, bins=int(config["bins"])).as_dict())
    if plot:
        from .plotting import sample_figures

        sample_figures(records, out_dir / "sample_magnitude.png",
                       out_dir / "sample_phase.png")


def run_magic_report(config: dict, out_dir: Path, plot: bool) -> None:
    records = sample_words(
        seed=int(config["seed"]), n=int(config["n"]), length=int(config["len"]),
        theta=float(config["theta"]), workers=int(config["workers"]),
    )
    nearest = nearest_strange_report(records)
    strange = {}
    for label, state in zip(("Sa", "Sb", "Sc"), strange_states()):
        rho = np.outer(state, state.conj())
        table = wigner(rho)
        strange[label] = {
            "amplitudes_real": state.real.tolist(),
            "amplitudes_imag": state.imag.tolist(),
            "wigner_min": float(table.min()),
            "score_m": float(3 * table.max()),
        }
    report = {
        "n": int(config["n"]),
        "len": int(config["len"]),
        "seed": int(config["seed"]),
        "strange_states": strange,
        "nearest_samples": nearest,
        "negative_fraction": sum(r.wigner_min < 0 for r in records) / len(records),
    }
    _write_json(out_dir / "magic_report.json", report)
    if plot:
        from .plotting import near_strange_figure

        coords = {
            label: (info["amplitudes_real"][1] ** 2 + info["amplitudes_imag"][1] ** 2,
                    info["amplitudes_real"][2] ** 2 + info["amplitudes_imag"][2] ** 2)
            for label, info in strange.items()
        }
        near_strange_figure(records, coords, out_dir / "magic_report.png",
                            dmax=float(config["dmax"]))


def run_rydberg_evolve(config: dict, out_dir: Path, plot: bool) -> None:
    try:
        params = RydbergParams(
            omega=tuple(float(config[f"omega{k}"]) for k in range(1, 5)),
            delta=tuple(float(config[f"delta{k}"]) for k in range(1, 5)),
            phase=tuple(float(config[f"phi{k}"]) for k in range(1, 5)),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    eliminated = bool(config["eliminated"])
    try:
        H = adiabatic_eliminate(params) if eliminated else rotating_hamiltonian(params)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    dim = H.shape[0]
    psi0_cfg = config["psi0"]
    if isinstance(psi0_cfg, str) and "," in psi0_cfg:
        amps = _float_list(psi0_cfg, name="psi0")
        if len(amps) != dim:
            raise ConfigError(f"psi0: expected {dim} amplitudes")
        psi0 = np.asarray(amps, dtype=complex)
    else:
        idx = int(psi0_cfg)
        if not 0 <= idx < dim:
            raise ConfigError(f"psi0: level index {idx} outside [0, {dim - 1}]")
        psi0 = np.zeros(dim, dtype=complex)
        psi0[idx] = 1.0
    try:
        traj = evolve(H, psi0, duration=float(config["T"]),
                      dt=float(config["dt"]), sample_stride=int(config["stride"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    pops = traj.populations()
    rows = []
    for t, state, p in zip(traj.times, traj.states, pops):
        p4 = list(p) + [0.0] * (4 - dim)
        rows.append([
            repr(float(t)), *(repr(float(x)) for x in p4),
            repr(float(np.angle(state[2]))),
            repr(float(np.angle(state[3]))) if dim == 4 else repr(0.0),
        ])
    _write_csv(out_dir / "trajectory.csv",
               ["t", "p0", "p1", "p2", "p3", "arg_c2", "arg_c3"], rows)
    if plot:
        from .plotting import trajectory_figure

        trajectory_figure(traj.times, pops, out_dir / "populations.png")


def run_rydberg_berry(config: dict, out_dir: Path, plot: bool) -> None:
    envelope = float(config["envelope"])
    duration = float(config["duration"])
    try:
        loop = BerryLoop(
            envelope=lambda t: envelope,
            phase=lambda t: 2 * np.pi * t / duration,
            duration=duration,
            splitting=float(config["omega23"]),
            branch=int(config["branch"]),
        )
        gamma_closed = berry_phase_closed(loop)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    ladder = []
    gamma_numeric = None
    for k in range(int(config["ladder"])):
        T = duration * 2**k
        gn = berry_phase_numeric(loop, duration=T)
        residual = abs(float((gn - gamma_closed + np.pi) % (2 * np.pi) - np.pi))
        ladder.append({"duration": T, "gamma_numeric": gn, "residual": residual})
        if gamma_numeric is None:
            gamma_numeric = gn
    report = {
        "gamma_closed": gamma_closed,
        "gamma_numeric": gamma_numeric,
        "T": duration,
        "residual": ladder[0]["residual"],
        "ladder": ladder,
    }
    _write_json(out_dir / "berry.json", report)
    if plot:
        from .plotting import berry_figure

        berry_figure(report, out_dir / "berry.png")


RUNNERS = {
    "spectrum": run_spectrum,
    "effective": run_effective,
    "gate-level": run_gate_level,
    "sample": run_sample,
    "magic-report": run_magic_report,
    "rydberg-evolve": run_rydberg_evolve,
    "rydberg-berry": run_rydberg_berry,
}


# ---------------------------------------------------------------------------
# argument parsing

def _add_common(sub: argparse.ArgumentParser):
    sub.add_argument("--config", help="JSON config file or manifest from a previous run")
    sub.add_argument("--out-dir", help=f"output directory (default ${OUTDIR_ENV} or ./parakit-out)")
    sub.add_argument("--no-plot", action="store_true", help="skip figure rendering")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parakit",
        description="Parafermion-chain workbench: spectra, effective gates, "
                    "magic sampling, and four-level Rydberg dynamics.",
    )
    parser.add_argument("--version", action="version", version=f"parakit {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("spectrum", help="diagonalize a chain and emit its parity-resolved spectrum")
    p.add_argument("--L", type=int)
    p.add_argument("--f", help="flip couplings, scalar or comma list")
    p.add_argument("--J", help="bond couplings, scalar or comma list")
    p.add_argument("--phi", type=float)
    p.add_argument("--phi-hat", dest="phi_hat", type=float)
    _add_common(p)

    p = subs.add_parser("effective", help="exact-versus-perturbative splitting table over an f grid")
    p.add_argument("--J", type=float)
    p.add_argument("--f-grid", dest="f_grid", help="start:stop:step")
    p.add_argument("--phi", type=float)
    p.add_argument("--phi-hat", dest="phi_hat", type=float)
    _add_common(p)

    p = subs.add_parser("gate-level", help="classify a dynamical gate in the Clifford hierarchy")
    p.add_argument("--theta", help="diagonal phase as a fraction of 2 pi, e.g. 1/9")
    p.add_argument("--beta-t", dest="beta_t", help="evolution angle of the interaction")
    p.add_argument("--k-max", dest="k_max", type=int)
    _add_common(p)

    p = subs.add_parser("sample", help="sample random words and emit state diagnostics")
    p.add_argument("--n", type=int)
    p.add_argument("--len", type=int)
    p.add_argument("--theta", type=float)
    p.add_argument("--alphabet", choices=["full", "clifford"])
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--bins", type=int)
    _add_common(p)

    p = subs.add_parser("magic-report", help="nearest-strange-state capability report")
    p.add_argument("--n", type=int)
    p.add_argument("--len", type=int)
    p.add_argument("--theta", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--dmax", type=float)
    _add_common(p)

    ryd = subs.add_parser("rydberg", help="four-level Rydberg simulations")
    ryd_subs = ryd.add_subparsers(dest="rydberg_command", required=True)

    p = ryd_subs.add_parser("evolve", help="propagate the rotating-frame dynamics")
    p.add_argument("--omega", help="four Rabi frequencies, comma list "
                                   "(expands to config keys omega1..omega4)")
    p.add_argument("--delta", help="four detunings, comma list (delta1..delta4)")
    p.add_argument("--phases", help="four field phases, comma list (phi1..phi4)")
    p.add_argument("--duration", dest="T", type=float, help="evolution time T")
    p.add_argument("--dt", type=float)
    p.add_argument("--psi0", help="initial level index or comma amplitudes")
    p.add_argument("--stride", type=int)
    p.add_argument("--eliminated", action="store_const", const=True, default=None,
                   help="use the three-level eliminated Hamiltonian")
    _add_common(p)

    p = ryd_subs.add_parser("berry", help="closed-versus-numeric Berry phase for a circular loop")
    p.add_argument("--envelope", type=float)
    p.add_argument("--omega23", type=float)
    p.add_argument("--branch", type=int, choices=[1, -1])
    p.add_argument("--duration", type=float)
    p.add_argument("--ladder", type=int)
    _add_common(p)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.command
    if command == "rydberg":
        command = f"rydberg-{args.rydberg_command}"
    schema = SCHEMAS[command]
    cli_values = {k: v for k, v in vars(args).items() if k in schema}
    if command == "rydberg-evolve":
        try:
            _expand_list_flags(args, cli_values)
        except ConfigError as exc:
            sys.stderr.write(f"parakit: config error: {exc}\n")
            return 2
    try:
        file_config = _load_config_file(args.config, command) if args.config else {}
        config = resolve_config(command, file_config, cli_values)
        out_dir = Path(
            args.out_dir
            or os.environ.get(OUTDIR_ENV)
            or "parakit-out"
        )
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
            RUNNERS[command](config, out_dir, plot=not args.no_plot)
            _write_manifest(out_dir, command, _jsonable(config))
        except OSError as exc:
            sys.stderr.write(f"parakit: I/O failure: {exc}\n")
            return 3
    except ConfigError as exc:
        sys.stderr.write(f"parakit: config error: {exc}\n")
        return 2
    return 0


def _expand_list_flags(args, cli_values: dict) -> None:
    """Turn the comma-list convenience flags into the per-field config keys."""
    for flag, prefix in (("omega", "omega"), ("delta", "delta"), ("phases", "phi")):
        raw = getattr(args, flag, None)
        if raw is None:
            continue
        values = _float_list(raw, 4, flag)
        for k, value in enumerate(values, start=1):
            cli_values[f"{prefix}{k}"] = value


def _jsonable(config: dict) -> dict:
    out = {}
    for key, value in config.items():
        if isinstance(value, (np.floating, np.integer)):
            value = value.item()
        out[key] = value
    return out


if __name__ == "__main__":
    sys.exit(main())
