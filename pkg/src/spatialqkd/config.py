"""Run configuration: file loading, defaults and command-line precedence.

A run is described by a single TOML document with the tables source,
detector, channel, attack, simulation and run; every key is optional
and falls back to the reference configuration. Command-line flags
override file values, which override defaults. Unknown tables or keys
are rejected rather than ignored so that typos cannot silently revert
a parameter to its default.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - python < 3.11
    import tomli as tomllib

import numpy as np

from .adversary import AttackParams
from .detection import DEFAULT_ARRAY_COVERAGE, ChannelParams, DetectorArrayParams
from .errors import ConfigurationError
from .pdc_model import (DEFAULT_PAIR_PROBABILITY, DEFAULT_PUMP_FWHM_MM,
                        DEFAULT_PUMP_WAVELENGTH_NM, DEFAULT_REFRACTIVE_INDEX,
                        SourceParams, degenerate_wavenumber, waist_from_fwhm)

_SCHEMA: dict[str, set[str]] = {
    "source": {"pump_wavelength_nm", "pump_fwhm_mm", "waist_w0_mm",
               "crystal_length_mm", "refractive_index", "wavenumber_K",
               "mismatch_delta", "pair_probability"},
    "detector": {"pixels", "efficiency", "dark_count_prob", "coverage"},
    "channel": {"throughput_alice", "throughput_bob", "loss_db",
                "distance_km", "extinction_db_per_km"},
    "attack": {"intercept_fraction"},
    "simulation": {"pulses", "seed", "batch_size", "workers"},
    "run": {"out_dir", "grid", "mode"},
}


@dataclass(frozen=True)
class SweepSpec:
    """A swept variable parsed from VAR=lo:hi:steps."""

    name: str
    lo: float
    hi: float
    steps: int

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.steps)


def parse_sweep(text: str) -> SweepSpec:
    """Parse a sweep request of the form VAR=lo:hi:steps."""
    try:
        name, spec = text.split("=", 1)
        lo_s, hi_s, steps_s = spec.split(":")
        lo, hi, steps = float(lo_s), float(hi_s), int(steps_s)
    except ValueError as exc:
        raise ConfigurationError(
            f"could not parse sweep {text!r}; expected VAR=lo:hi:steps") from exc
    if steps < 1:
        raise ConfigurationError("sweep needs at least one step")
    if not name:
        raise ConfigurationError("sweep variable name is empty")
    return SweepSpec(name=name.strip(), lo=lo, hi=hi, steps=steps)


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration for one command invocation."""

    source: SourceParams
    array: DetectorArrayParams
    channel: ChannelParams
    attack: AttackParams
    pulses: int
    seed: int
    batch_size: int
    workers: int
    out_dir: Path
    grid: int
    mode: str
    sweep: SweepSpec | None = None

    def describe(self) -> dict[str, Any]:
        """Flat key/value view of every resolved parameter, for headers."""
        return {
            "source.pump_wavelength_nm": self.source.pump_wavelength,
            "source.waist_w0_mm": self.source.waist_w0,
            "source.crystal_length_mm": self.source.crystal_length,
            "source.wavenumber_K": self.source.wavenumber_K,
            "source.mismatch_delta": self.source.mismatch_delta,
            "source.pair_probability": self.source.pair_probability,
            "detector.pixels": self.array.n_pixels,
            "detector.efficiency": self.array.efficiency,
            "detector.dark_count_prob": self.array.dark_count_prob,
            "detector.coverage": self.array.coverage,
            "channel.throughput_alice": self.channel.throughput_alice,
            "channel.throughput_bob": self.channel.throughput_bob,
            "channel.loss_db": self.channel.loss_db,
            "attack.intercept_fraction": self.attack.intercept_fraction,
            "simulation.pulses": self.pulses,
            "simulation.seed": self.seed,
            "simulation.batch_size": self.batch_size,
            "simulation.workers": self.workers,
            "run.out_dir": str(self.out_dir),
            "run.grid": self.grid,
            "run.mode": self.mode,
        }


def load_config_file(path: str | Path) -> dict:
    """Read and schema-check a TOML configuration document."""
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"config file {path} does not exist")
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"config file {path} is not valid TOML: {exc}") \
            from exc
    for table, entries in data.items():
        if table not in _SCHEMA:
            raise ConfigurationError(f"unknown config table [{table}]")
        if not isinstance(entries, dict):
            raise ConfigurationError(f"[{table}] must be a table of keys")
        unknown = set(entries) - _SCHEMA[table]
        if unknown:
            raise ConfigurationError(
                f"unknown key(s) in [{table}]: {', '.join(sorted(unknown))}")
    return data


def _build_source(section: Mapping[str, Any]) -> SourceParams:
    if "pump_fwhm_mm" in section and "waist_w0_mm" in section:
        raise ConfigurationError(
            "give either pump_fwhm_mm or waist_w0_mm, not both")
    if "refractive_index" in section and "wavenumber_K" in section:
        raise ConfigurationError(
            "give either refractive_index or wavenumber_K, not both")
    wavelength = float(section.get("pump_wavelength_nm",
                                   DEFAULT_PUMP_WAVELENGTH_NM))
    if "waist_w0_mm" in section:
        waist = float(section["waist_w0_mm"])
    else:
        waist = waist_from_fwhm(float(section.get("pump_fwhm_mm",
                                                  DEFAULT_PUMP_FWHM_MM)))
    if "wavenumber_K" in section:
        wavenumber = float(section["wavenumber_K"])
    else:
        wavenumber = degenerate_wavenumber(
            wavelength, float(section.get("refractive_index",
                                          DEFAULT_REFRACTIVE_INDEX)))
    try:
        return SourceParams(
            waist_w0=waist,
            crystal_length=float(section.get("crystal_length_mm", 2.0)),
            wavenumber_K=wavenumber,
            pump_wavelength=wavelength,
            mismatch_delta=float(section.get("mismatch_delta", 0.0)),
            pair_probability=float(section.get("pair_probability",
                                               DEFAULT_PAIR_PROBABILITY)))
    except ValueError as exc:
        raise ConfigurationError(f"invalid source parameters: {exc}") from exc


def _build_array(section: Mapping[str, Any], pixels_override: int | None) -> \
        DetectorArrayParams:
    pixels = pixels_override if pixels_override is not None else \
        int(section.get("pixels", 128))
    try:
        return DetectorArrayParams(
            n_pixels=pixels,
            efficiency=float(section.get("efficiency", 0.6)),
            dark_count_prob=float(section.get("dark_count_prob", 1e-6)),
            coverage=float(section.get("coverage", DEFAULT_ARRAY_COVERAGE)))
    except ValueError as exc:
        raise ConfigurationError(f"invalid detector parameters: {exc}") from exc


def _build_channel(section: Mapping[str, Any]) -> ChannelParams:
    ways = [k for k in ("throughput_bob", "loss_db", "distance_km")
            if k in section]
    if len(ways) > 1:
        raise ConfigurationError(
            f"channel specified more than one way: {', '.join(ways)}")
    t_alice = float(section.get("throughput_alice", 1.0))
    try:
        if "loss_db" in section:
            return ChannelParams.from_loss_db(float(section["loss_db"]),
                                              throughput_alice=t_alice)
        if "distance_km" in section:
            return ChannelParams.from_distance_km(
                float(section["distance_km"]),
                extinction_db_per_km=float(
                    section.get("extinction_db_per_km", 1.0)),
                throughput_alice=t_alice)
        return ChannelParams(
            throughput_alice=t_alice,
            throughput_bob=float(section.get("throughput_bob", 1.0)))
    except ValueError as exc:
        raise ConfigurationError(f"invalid channel parameters: {exc}") from exc


def resolve_config(file_data: Mapping[str, Any] | None = None, *,
                   out_dir: str | None = None, seed: int | None = None,
                   pulses: int | None = None, pixels: int | None = None,
                   grid: int | None = None, mode: str | None = None,
                   sweep: str | None = None) -> RunConfig:
    """Merge defaults, a parsed config file and command-line overrides.

    Precedence is flags over file over defaults. Raises
    ConfigurationError for contradictory or invalid settings.
    """
    data = dict(file_data or {})
    source = _build_source(data.get("source", {}))
    array = _build_array(data.get("detector", {}), pixels)
    channel = _build_channel(data.get("channel", {}))

    attack_section = data.get("attack", {})
    try:
        attack = AttackParams(intercept_fraction=float(
            attack_section.get("intercept_fraction", 0.0)))
    except ValueError as exc:
        raise ConfigurationError(f"invalid attack parameters: {exc}") from exc

    sim = data.get("simulation", {})
    run = data.get("run", {})
    resolved_pulses = pulses if pulses is not None else int(sim.get("pulses", 0))
    resolved_seed = seed if seed is not None else int(sim.get("seed", 0))
    resolved_mode = mode if mode is not None else str(run.get("mode", "1d"))
    if resolved_mode not in ("1d", "2d"):
        raise ConfigurationError(f"mode must be '1d' or '2d', got {resolved_mode!r}")
    resolved_grid = grid if grid is not None else int(run.get("grid", 1024))
    if resolved_grid < 2 or resolved_grid & (resolved_grid - 1):
        raise ConfigurationError(
            f"grid size must be a power of two, got {resolved_grid}")
    if resolved_seed < 0:
        raise ConfigurationError("seed must be nonnegative")

    return RunConfig(
        source=source, array=array, channel=channel, attack=attack,
        pulses=resolved_pulses, seed=resolved_seed,
        batch_size=int(sim.get("batch_size", 1_000_000)),
        workers=int(sim.get("workers", 1)),
        out_dir=Path(out_dir if out_dir is not None
                     else run.get("out_dir", "spatialqkd-out")),
        grid=resolved_grid, mode=resolved_mode,
        sweep=parse_sweep(sweep) if sweep is not None else None)
