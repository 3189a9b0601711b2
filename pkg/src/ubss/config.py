"""Experiment configuration: file format, defaults, and derived settings.

Config files are flat key-value text with section headers, for example:

    [signal]
    chip_len = 161
    frame_len = 644
    total_len = 2898
    n_sources = 3
    seed = 11
    occupancy = 1.0
    pulse_orders = 0, 1, 2

    [mixing]
    matrix = 0.4 0.6 0.3 ; 0.8 0.1 0.5

    [estimation]
    quantum = 1e-4
    peak_fraction = 0.1

    [run]
    overlap_mode = at_most_two
    output_dir = out/exp1

Matrix rows are separated by semicolons, entries by whitespace.  The matrix
value "random" draws a reproducible matrix instead (optional keys: rows,
seed).  activity_eps may be set to an absolute threshold; by default every
stage derives it as 1e-6 times the largest |x1| it sees.
"""

from __future__ import annotations

import configparser
import enum
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .signals import PulseSpec, ThUwbConfig, validate_mixing_matrix

DEFAULT_QUANTUM = 1e-4
DEFAULT_PEAK_FRACTION = 0.1
ACTIVITY_REL = 1e-6
SEED_ENV_VAR = "UBSS_SEED"


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


class OverlapMode(enum.Enum):
    AT_MOST_TWO = "at_most_two"
    ALLOW_THREE = "allow_three"


@dataclass
class ExperimentConfig:
    th_uwb: ThUwbConfig
    pulses: list[PulseSpec]
    mixing: np.ndarray | None
    overlap_mode: OverlapMode
    output_dir: Path
    mixing_rows: int = 2
    mixing_seed: int | None = None
    quantum: float = DEFAULT_QUANTUM
    peak_fraction: float = DEFAULT_PEAK_FRACTION
    activity_eps: float | None = None


def default_activity_eps(x1: np.ndarray) -> float:
    """Relative activity threshold: 1e-6 times the largest |x1|."""
    peak = float(np.max(np.abs(np.asarray(x1, dtype=float))))
    if peak == 0.0:
        raise ValueError("cannot derive an activity threshold from an all-zero channel")
    return ACTIVITY_REL * peak


def hop_windows_for_mode(
    mode: OverlapMode, n_sources: int, n_chips: int
) -> list[tuple[int, int]] | None:
    """Per-source chip windows realizing the configured overlap cap.

    ALLOW_THREE hops every source over the whole frame.  AT_MOST_TWO staggers
    the sources: the first and last source hop over two-chip windows sharing
    chip 1, every middle source keeps a fixed chip of its own, so no chip is
    reachable by more than two sources.  Needs n_sources + 1 chips per frame.
    """
    if mode is OverlapMode.ALLOW_THREE or n_sources <= 2:
        return None
    if n_chips < n_sources + 1:
        raise ConfigError(
            f"at_most_two needs at least {n_sources + 1} chips per frame, got {n_chips}"
        )
    # first and last source share chip 1, middles sit alone on chips 3, 4, ...
    middles = [(3 + k, 1) for k in range(n_sources - 2)]
    return [(0, 2)] + middles + [(1, 2)]


def random_mixing(n_sources: int, rows: int, seed: int) -> np.ndarray:
    """Reproducible random mixing matrix with well-separated column ratios.

    Entries are uniform in [0.1, 1.0); columns are redrawn until all pairwise
    first-row-normalized ratios differ by at least 0.05, keeping the ratio
    histogram modes distinguishable.
    """
    if rows < 2:
        raise ConfigError(f"a mixing matrix needs at least 2 rows, got {rows}")
    rng = np.random.default_rng([seed, 0xA])
    a = rng.uniform(0.1, 1.0, size=(rows, n_sources))
    for _ in range(1000):
        ratios = a[1] / a[0]
        bad = None
        for i in range(n_sources):
            for j in range(i + 1, n_sources):
                if abs(ratios[i] - ratios[j]) < 0.05:
                    bad = j
                    break
            if bad is not None:
                break
        if bad is None:
            return validate_mixing_matrix(a, ratio_model=True)
        a[:, bad] = rng.uniform(0.1, 1.0, size=rows)
    raise ConfigError("could not draw a mixing matrix with separated column ratios")


def parse_matrix(text: str) -> np.ndarray:
    """Parse semicolon-separated rows of whitespace-separated numbers."""
    rows = []
    for r, chunk in enumerate(text.split(";")):
        entries = chunk.split()
        if not entries:
            raise ConfigError(f"matrix row {r + 1} is empty")
        try:
            rows.append([float(e) for e in entries])
        except ValueError as exc:
            raise ConfigError(f"matrix row {r + 1}: {exc}") from None
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ConfigError("matrix rows have unequal lengths")
    return np.array(rows)


def _get(section, key, cast, default=None, required=False):
    if key not in section:
        if required:
            raise ConfigError(f"[{section.name}] is missing required key {key!r}")
        return default
    raw = section[key]
    try:
        return cast(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{section.name}] {key} = {raw!r}: {exc}") from None


def _int_list(raw: str) -> list[int]:
    return [int(tok) for tok in raw.replace(",", " ").split()]


def _float_list(raw: str) -> list[float]:
    return [float(tok) for tok in raw.replace(",", " ").split()]


def load_config(path, seed_override: int | None = None) -> ExperimentConfig:
    """Read an experiment config file; seed_override replaces the file seed."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path) as fh:
            parser.read_file(fh, source=str(path))
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path}: {exc}") from None

    for name in ("signal", "run"):
        if name not in parser:
            raise ConfigError(f"config {path} is missing the [{name}] section")
    sig = parser["signal"]
    seed = seed_override if seed_override is not None else _get(sig, "seed", int, required=True)
    try:
        th = ThUwbConfig(
            chip_len=_get(sig, "chip_len", int, required=True),
            frame_len=_get(sig, "frame_len", int, required=True),
            total_len=_get(sig, "total_len", int, required=True),
            n_sources=_get(sig, "n_sources", int, required=True),
            seed=seed,
            occupancy=_get(sig, "occupancy", float, default=1.0),
        )
    except ValueError as exc:
        raise ConfigError(f"[signal]: {exc}") from None

    orders = _get(sig, "pulse_orders", _int_list, default=[k % 3 for k in range(th.n_sources)])
    amplitudes = _get(sig, "pulse_amplitudes", _float_list, default=[1.0] * th.n_sources)
    if len(orders) != th.n_sources or len(amplitudes) != th.n_sources:
        raise ConfigError(
            f"[signal] pulse_orders/pulse_amplitudes must list {th.n_sources} values"
        )
    try:
        pulses = [
            PulseSpec(order=o, width_samples=th.chip_len, amplitude=amp)
            for o, amp in zip(orders, amplitudes)
        ]
    except ValueError as exc:
        raise ConfigError(f"[signal]: {exc}") from None

    mixing = None
    mixing_rows = 2
    mixing_seed = None
    if "mixing" in parser:
        mx = parser["mixing"]
        raw = mx.get("matrix", "random").strip()
        mixing_rows = _get(mx, "rows", int, default=2)
        mixing_seed = _get(mx, "seed", int, default=None)
        if raw.lower() != "random":
            try:
                mixing = validate_mixing_matrix(parse_matrix(raw))
            except ValueError as exc:
                raise ConfigError(f"[mixing] matrix: {exc}") from None
            if mixing.shape[1] != th.n_sources:
                raise ConfigError(
                    f"[mixing] matrix has {mixing.shape[1]} columns for {th.n_sources} sources"
                )

    est = parser["estimation"] if "estimation" in parser else {}
    quantum = _get(est, "quantum", float, default=DEFAULT_QUANTUM) if est else DEFAULT_QUANTUM
    peak_fraction = (
        _get(est, "peak_fraction", float, default=DEFAULT_PEAK_FRACTION)
        if est
        else DEFAULT_PEAK_FRACTION
    )
    activity_eps = _get(est, "activity_eps", float, default=None) if est else None
    if quantum <= 0.0:
        raise ConfigError(f"[estimation] quantum must be positive, got {quantum}")
    if not 0.0 < peak_fraction < 1.0:
        raise ConfigError(f"[estimation] peak_fraction must lie in (0, 1), got {peak_fraction}")
    if activity_eps is not None and activity_eps <= 0.0:
        raise ConfigError(f"[estimation] activity_eps must be positive, got {activity_eps}")

    run = parser["run"]
    mode_raw = _get(run, "overlap_mode", str, default=OverlapMode.AT_MOST_TWO.value)
    try:
        mode = OverlapMode(mode_raw)
    except ValueError:
        valid = ", ".join(m.value for m in OverlapMode)
        raise ConfigError(f"[run] overlap_mode must be one of {valid}, got {mode_raw!r}") from None
    out_dir = Path(_get(run, "output_dir", str, required=True))

    return ExperimentConfig(
        th_uwb=th,
        pulses=pulses,
        mixing=mixing,
        overlap_mode=mode,
        output_dir=out_dir,
        mixing_rows=mixing_rows,
        mixing_seed=mixing_seed,
        quantum=quantum,
        peak_fraction=peak_fraction,
        activity_eps=activity_eps,
    )
