"""Command-line front end.

Subcommands (each takes --config <path> --out <path>):

  eval          single reduced triple-twisted amplitude -> JSON
  oracle-check  oracle vs closed form over seeded random configurations -> JSON
  map           q-integrated (m1, m2) intensity map -> CSV (+ optional gnuplot script)
  field         transverse field samples on a polar grid -> CSV

Exit codes: 0 success, 1 threshold failure, 2 invalid config, 3 degenerate
support, 4 degenerate oracle sample, 5 quadrature failure.

All floats are emitted in shortest round-trip form (at most 17 significant
digits), so identical configs produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, fields

import numpy as np

from .amplitudes import reduced_triple_amplitude
from .errors import ConvergenceError, DegenerateJacobianError, DegenerateSupportError
from .kinematics import (
    CollisionGeometry,
    TwistedState,
    angle_set,
    field_amplitude,
    triangle_geometry,
)
from .numerics import QuadratureSpec, RootFindSpec, gauss_legendre_nodes
from .oracle import draw_support_samples, oracle_amplitude
from .wavepackets import WavePacketProfile, intensity_map

EXIT_OK = 0
EXIT_THRESHOLD = 1
EXIT_CONFIG = 2
EXIT_DEGENERATE_SUPPORT = 3
EXIT_DEGENERATE_ORACLE = 4
EXIT_QUADRATURE = 5

_KZ_FACTOR = 50.0  # the reduced problem is k_z independent; any paraxial value works


@dataclass(frozen=True)
class RunConfig:
    """All physical and numerical parameters, one JSON document."""

    m: int = 5
    theta: float = 0.2
    kappa0: float = 1.0
    kappa01: float = 1.0
    kappa02: float = 0.5
    sigma_rel: float = 0.2
    q: float = 0.0
    m1_min: int = -5
    m1_max: int = 15
    m2_min: int = -10
    m2_max: int = 10
    seed: int = 0
    sample_count: int = 100
    threshold: float = 1e-8
    r_max: float = 10.0
    grid_n: int = 16
    field_packet: bool = False
    plot_script: bool = False
    q_nodes: int = 64
    map_cell_rtol: float = 1e-2
    quadrature: QuadratureSpec = QuadratureSpec(node_count=24, rel_tol=1e-6)
    root_find: RootFindSpec = RootFindSpec()


def load_config(path: str) -> tuple[RunConfig | None, list[str]]:
    """Parse a JSON config; returns (config, violations)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        return None, [f"cannot read config: {exc}"]
    if not isinstance(raw, dict):
        return None, ["config must be a JSON object"]

    violations: list[str] = []
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(raw) - known)
    violations.extend(f"unknown config key: {k!r}" for k in unknown)

    kwargs = {}
    for key, value in raw.items():
        if key not in known:
            continue
        if key == "quadrature":
            try:
                kwargs[key] = QuadratureSpec(**value)
            except (TypeError, ValueError) as exc:
                violations.append(f"quadrature: {exc}")
        elif key == "root_find":
            try:
                kwargs[key] = RootFindSpec(**value)
            except (TypeError, ValueError) as exc:
                violations.append(f"root_find: {exc}")
        else:
            kwargs[key] = value
    if violations:
        return None, violations
    try:
        return RunConfig(**kwargs), []
    except (TypeError, ValueError) as exc:
        return None, [f"config: {exc}"]


def _validate_common(cfg: RunConfig) -> list[str]:
    out = []
    if not 0.0 < cfg.theta < 0.5 * math.pi:
        out.append("theta must satisfy 0 < theta < pi/2")
    for name in ("kappa0", "kappa01", "kappa02"):
        if getattr(cfg, name) <= 0.0:
            out.append(f"{name} must be positive")
    if cfg.sigma_rel <= 0.0:
        out.append("sigma_rel must be positive")
    return out


def validate(cfg: RunConfig, command: str) -> list[str]:
    """Every violated precondition of the target command, as messages."""
    out = _validate_common(cfg)
    if command == "eval":
        if cfg.m1_min != cfg.m1_max:
            out.append("eval requires m1_min == m1_max (a single m1)")
        if cfg.m2_min != cfg.m2_max:
            out.append("eval requires m2_min == m2_max (a single m2)")
        if abs(cfg.q) >= cfg.kappa0 * math.sin(cfg.theta):
            out.append("|q| >= kappa0*sin(theta): outside the allowed q region")
    elif command == "map":
        if cfg.m1_min > cfg.m1_max:
            out.append("m1_min must not exceed m1_max")
        if cfg.m2_min > cfg.m2_max:
            out.append("m2_min must not exceed m2_max")
        if cfg.q_nodes < 2:
            out.append("q_nodes must be >= 2")
        if cfg.map_cell_rtol <= 0.0:
            out.append("map_cell_rtol must be positive")
    elif command == "oracle-check":
        if cfg.sample_count < 1:
            out.append("sample_count must be >= 1")
        if cfg.threshold < 0.0:
            out.append("threshold must be non-negative")
    elif command == "field":
        if cfg.grid_n < 2:
            out.append("grid_n must be >= 2")
        if cfg.r_max <= 0.0:
            out.append("r_max must be positive")
    return out


def _initial_state(cfg: RunConfig) -> TwistedState:
    return TwistedState.massless(cfg.kappa0, cfg.m, _KZ_FACTOR * cfg.kappa0)


def _geometry(cfg: RunConfig) -> CollisionGeometry:
    return CollisionGeometry(
        theta=cfg.theta,
        q=cfg.q,
        initial=_initial_state(cfg),
        kappa1=cfg.kappa01,
        kappa2=cfg.kappa02,
    )


def _profiles(cfg: RunConfig):
    return (
        WavePacketProfile(cfg.kappa0, cfg.sigma_rel * cfg.kappa0),
        WavePacketProfile(cfg.kappa01, cfg.sigma_rel * cfg.kappa01),
        WavePacketProfile(cfg.kappa02, cfg.sigma_rel * cfg.kappa02),
    )


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _json_document(payload: dict) -> str:
    return json.dumps(payload, indent=2) + "\n"


def cmd_eval(cfg: RunConfig, out_path: str) -> int:
    geom = _geometry(cfg)
    m1, m2 = cfg.m1_min, cfg.m2_min
    try:
        amp = reduced_triple_amplitude(geom, cfg.m, m1, m2)
    except DegenerateSupportError as exc:
        print(f"degenerate support: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE_SUPPORT
    angles = angle_set(geom)
    tri = triangle_geometry(cfg.kappa0, angles.xi, cfg.kappa01, cfg.kappa02)

    def opt(x: float):
        return None if (x is None or math.isnan(x)) else x

    payload = {
        "value_re": amp.value.real,
        "value_im": amp.value.imag,
        "phase_power": amp.phase_power,
        "in_support": amp.in_support,
        "xi": angles.xi,
        "phi_star": angles.phi_star,
        "phi_tilde_star": angles.phi_tilde_star,
        "area": opt(tri.area),
        "delta1": opt(tri.delta1),
        "delta2": opt(tri.delta2),
    }
    _write_text(out_path, _json_document(payload))
    return EXIT_OK


def cmd_oracle_check(cfg: RunConfig, out_path: str) -> int:
    rng = np.random.default_rng(cfg.seed)
    samples = draw_support_samples(rng, cfg.sample_count, theta=cfg.theta)
    ratios = []
    excluded = []
    for index, (geom, m, m1, m2) in enumerate(samples):
        closed = reduced_triple_amplitude(geom, m, m1, m2)
        try:
            result = oracle_amplitude(geom, m, m1, m2, spec=cfg.root_find)
        except DegenerateJacobianError as exc:
            excluded.append({"sample": index, "reason": str(exc)})
            continue
        ratios.append(result.amplitude / closed.value)

    report: dict = {"samples": cfg.sample_count, "threshold": cfg.threshold}
    if ratios:
        arr = np.array(ratios)
        mean = complex(arr.mean())
        dispersion = float(np.sqrt(np.mean(np.abs(arr - mean) ** 2)) / abs(mean))
        max_dev = float(np.max(np.abs(arr / mean - 1.0)))
        report.update(
            {
                "ratio_mean_re": mean.real,
                "ratio_mean_im": mean.imag,
                "dispersion": dispersion,
                "max_rel_deviation": max_dev,
                "per_sample_re": [r.real for r in ratios],
                "per_sample_im": [r.imag for r in ratios],
            }
        )
        passed = dispersion < cfg.threshold
    else:
        report.update({"dispersion": None, "max_rel_deviation": None})
        passed = False
    report["excluded_degenerate"] = excluded
    report["passed"] = bool(passed)
    _write_text(out_path, _json_document(report))
    if excluded:
        return EXIT_DEGENERATE_ORACLE
    return EXIT_OK if passed else EXIT_THRESHOLD


_FLOAT9 = "{:.9g}".format


def _map_csv(rows) -> str:
    lines = ["m1,m2,intensity"]
    lines.extend(f"{m1},{m2},{_FLOAT9(v)}" for m1, m2, v in rows)
    return "\n".join(lines) + "\n"


_PLOT_TEMPLATE = """set datafile separator ','
set key off
set xlabel 'm1'
set ylabel 'm2'
set title 'relative scattering intensity'
half = 0.48
plot '{csv}' skip 1 using 1:2:(half*sqrt($3)):(half*sqrt($3)) with boxxyerror fs solid lc rgb 'navy'
"""


def cmd_map(cfg: RunConfig, out_path: str) -> int:
    try:
        result = intensity_map(
            _profiles(cfg),
            _geometry_template(cfg),
            cfg.m,
            (cfg.m1_min, cfg.m1_max),
            (cfg.m2_min, cfg.m2_max),
            cfg.quadrature,
            q_nodes=cfg.q_nodes,
        )
    except ConvergenceError as exc:
        print(f"quadrature failure: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE
    csv_text = _map_csv(result.rows())
    if result.metadata["max_cell_rel_delta"] > cfg.map_cell_rtol:
        _write_text(out_path + ".partial", csv_text)
        bad = int(np.sum(result.metadata["cell_rel_delta"] > cfg.map_cell_rtol))
        print(
            f"quadrature failure: {bad} cell(s) above map_cell_rtol = {cfg.map_cell_rtol}; "
            f"partial results in {out_path}.partial",
            file=sys.stderr,
        )
        return EXIT_QUADRATURE
    _write_text(out_path, csv_text)
    if cfg.plot_script:
        _write_text(out_path + ".gp", _PLOT_TEMPLATE.format(csv=out_path))
    return EXIT_OK


def _geometry_template(cfg: RunConfig) -> CollisionGeometry:
    return CollisionGeometry(
        theta=cfg.theta,
        q=0.0,
        initial=_initial_state(cfg),
        kappa1=cfg.kappa01,
        kappa2=cfg.kappa02,
    )


def cmd_field(cfg: RunConfig, out_path: str) -> int:
    radii = np.linspace(0.0, cfg.r_max, cfg.grid_n)
    azimuths = np.linspace(0.0, 2.0 * math.pi, cfg.grid_n, endpoint=False)
    if cfg.field_packet:
        profile = WavePacketProfile(cfg.kappa0, cfg.sigma_rel * cfg.kappa0)
        lo, hi = profile.support
        x, w = gauss_legendre_nodes(64)
        kappas = 0.5 * (hi + lo) + 0.5 * (hi - lo) * x
        weights = 0.5 * (hi - lo) * w * profile.value(kappas)
        states = [TwistedState.massless(float(k), cfg.m, _KZ_FACTOR * cfg.kappa0) for k in kappas]

        def sample(r, phi):
            return sum(
                wt * field_amplitude(st, r, phi) for wt, st in zip(weights, states)
            )

    else:
        state = _initial_state(cfg)

        def sample(r, phi):
            return field_amplitude(state, r, phi)

    lines = ["r,phi,re,im"]
    for r in radii:
        for phi in azimuths:
            value = sample(float(r), float(phi))
            lines.append(f"{_FLOAT9(float(r))},{_FLOAT9(float(phi))},{value.real!r},{value.imag!r}")
    _write_text(out_path, "\n".join(lines) + "\n")
    return EXIT_OK


_COMMANDS = {
    "eval": cmd_eval,
    "oracle-check": cmd_oracle_check,
    "map": cmd_map,
    "field": cmd_field,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="vortexscatter",
        description="Twisted-beam on plane-wave scattering: amplitudes, oracle checks, intensity maps",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="JSON configuration file")
        p.add_argument("--out", required=True, help="output file path")
    args = parser.parse_args(argv)

    cfg, violations = load_config(args.config)
    if cfg is not None:
        violations = validate(cfg, args.command)
    if violations:
        for v in violations:
            print(f"config invalid: {v}", file=sys.stderr)
        return EXIT_CONFIG
    return _COMMANDS[args.command](cfg, args.out)


if __name__ == "__main__":
    raise SystemExit(main())
