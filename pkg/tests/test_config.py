import numpy as np
import pytest

from ubss import (
    ConfigError,
    OverlapMode,
    default_activity_eps,
    hop_windows_for_mode,
    load_config,
    random_mixing,
)
from ubss.config import parse_matrix

FULL_CFG = """\
[signal]
chip_len = 10
frame_len = 40
total_len = 120
n_sources = 3
seed = 11
occupancy = 0.75
pulse_orders = 0, 1, 2
pulse_amplitudes = 1.0, 2.0, 0.5

[mixing]
matrix = 0.4 0.6 0.3 ; 0.8 0.1 0.5

[estimation]
quantum = 2e-4
peak_fraction = 0.2
activity_eps = 1e-9

[run]
overlap_mode = allow_three
output_dir = out/full
"""

MINIMAL_CFG = """\
[signal]
chip_len = 10
frame_len = 40
total_len = 120
n_sources = 3
seed = 7

[run]
output_dir = out/minimal
"""


def _write(tmp_path, text, name="exp.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_load_config_full(tmp_path):
    cfg = load_config(_write(tmp_path, FULL_CFG))
    assert cfg.th_uwb.chip_len == 10
    assert cfg.th_uwb.frame_len == 40
    assert cfg.th_uwb.total_len == 120
    assert cfg.th_uwb.n_sources == 3
    assert cfg.th_uwb.seed == 11
    assert cfg.th_uwb.occupancy == 0.75
    assert [p.order for p in cfg.pulses] == [0, 1, 2]
    assert [p.amplitude for p in cfg.pulses] == [1.0, 2.0, 0.5]
    assert all(p.width_samples == 10 for p in cfg.pulses)
    assert np.array_equal(cfg.mixing, [[0.4, 0.6, 0.3], [0.8, 0.1, 0.5]])
    assert cfg.quantum == 2e-4
    assert cfg.peak_fraction == 0.2
    assert cfg.activity_eps == 1e-9
    assert cfg.overlap_mode is OverlapMode.ALLOW_THREE
    assert str(cfg.output_dir) == "out/full"


def test_load_config_defaults(tmp_path):
    cfg = load_config(_write(tmp_path, MINIMAL_CFG))
    assert cfg.th_uwb.occupancy == 1.0
    assert [p.order for p in cfg.pulses] == [0, 1, 2]
    assert [p.amplitude for p in cfg.pulses] == [1.0, 1.0, 1.0]
    assert cfg.mixing is None
    assert cfg.mixing_rows == 2
    assert cfg.mixing_seed is None
    assert cfg.quantum == 1e-4
    assert cfg.peak_fraction == 0.1
    assert cfg.activity_eps is None
    assert cfg.overlap_mode is OverlapMode.AT_MOST_TWO


def test_load_config_seed_override(tmp_path):
    path = _write(tmp_path, MINIMAL_CFG)
    assert load_config(path).th_uwb.seed == 7
    assert load_config(path, seed_override=42).th_uwb.seed == 42


def test_load_config_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read config"):
        load_config(tmp_path / "absent.cfg")


def test_load_config_missing_sections(tmp_path):
    with pytest.raises(ConfigError, match=r"missing the \[signal\] section"):
        load_config(_write(tmp_path, "[run]\noutput_dir = out\n"))
    with pytest.raises(ConfigError, match=r"missing the \[run\] section"):
        load_config(_write(tmp_path, MINIMAL_CFG.split("[run]")[0]))


def test_load_config_missing_and_bad_keys(tmp_path):
    broken = MINIMAL_CFG.replace("chip_len = 10\n", "")
    with pytest.raises(ConfigError, match="missing required key 'chip_len'"):
        load_config(_write(tmp_path, broken))
    broken = MINIMAL_CFG.replace("chip_len = 10", "chip_len = ten")
    with pytest.raises(ConfigError, match=r"\[signal\] chip_len = 'ten'"):
        load_config(_write(tmp_path, broken))
    broken = MINIMAL_CFG.replace("frame_len = 40", "frame_len = 45")
    with pytest.raises(ConfigError, match="multiple of chip_len"):
        load_config(_write(tmp_path, broken))


def test_load_config_pulse_list_length(tmp_path):
    broken = MINIMAL_CFG.replace("seed = 7", "seed = 7\npulse_orders = 0, 1")
    with pytest.raises(ConfigError, match="must list 3 values"):
        load_config(_write(tmp_path, broken))


def test_load_config_matrix_errors(tmp_path):
    bad = FULL_CFG.replace("0.4 0.6 0.3 ; 0.8 0.1 0.5", "0.4 0.6 ; 0.8 0.1")
    with pytest.raises(ConfigError, match="2 columns for 3 sources"):
        load_config(_write(tmp_path, bad))
    bad = FULL_CFG.replace("0.4 0.6 0.3 ; 0.8 0.1 0.5", "1 2 4 ; 2 4 8")
    with pytest.raises(ConfigError, match=r"\[mixing\] matrix: .*parallel"):
        load_config(_write(tmp_path, bad))


def test_load_config_estimation_bounds(tmp_path):
    bad = FULL_CFG.replace("quantum = 2e-4", "quantum = 0")
    with pytest.raises(ConfigError, match="quantum must be positive"):
        load_config(_write(tmp_path, bad))
    bad = FULL_CFG.replace("peak_fraction = 0.2", "peak_fraction = 1.5")
    with pytest.raises(ConfigError, match="peak_fraction must lie in"):
        load_config(_write(tmp_path, bad))
    bad = FULL_CFG.replace("activity_eps = 1e-9", "activity_eps = -1")
    with pytest.raises(ConfigError, match="activity_eps must be positive"):
        load_config(_write(tmp_path, bad))


def test_load_config_overlap_mode(tmp_path):
    bad = FULL_CFG.replace("overlap_mode = allow_three", "overlap_mode = sometimes")
    with pytest.raises(ConfigError, match="overlap_mode must be one of"):
        load_config(_write(tmp_path, bad))


def test_config_error_is_value_error():
    assert issubclass(ConfigError, ValueError)


def test_parse_matrix():
    m = parse_matrix("1 2 ; 3 4")
    assert np.array_equal(m, [[1.0, 2.0], [3.0, 4.0]])
    with pytest.raises(ConfigError, match="row 2 is empty"):
        parse_matrix("1 2 ;")
    with pytest.raises(ConfigError, match="unequal lengths"):
        parse_matrix("1 2 ; 3")
    with pytest.raises(ConfigError, match="matrix row 1"):
        parse_matrix("1 x ; 3 4")


def test_hop_windows_for_mode():
    # unrestricted hopping when overlaps are allowed or cannot exceed two
    assert hop_windows_for_mode(OverlapMode.ALLOW_THREE, 3, 4) is None
    assert hop_windows_for_mode(OverlapMode.AT_MOST_TWO, 2, 4) is None
    windows = hop_windows_for_mode(OverlapMode.AT_MOST_TWO, 3, 4)
    assert windows == [(0, 2), (3, 1), (1, 2)]
    windows = hop_windows_for_mode(OverlapMode.AT_MOST_TWO, 4, 6)
    assert windows == [(0, 2), (3, 1), (4, 1), (1, 2)]
    with pytest.raises(ConfigError, match="at least 4 chips per frame, got 3"):
        hop_windows_for_mode(OverlapMode.AT_MOST_TWO, 3, 3)


def test_hop_windows_cap_reachable_chips():
    # no chip is reachable by more than two sources, but one shared chip exists
    for n_sources, n_chips in ((3, 4), (4, 5), (5, 8)):
        windows = hop_windows_for_mode(OverlapMode.AT_MOST_TWO, n_sources, n_chips)
        reach = {}
        for k, (start, count) in enumerate(windows):
            assert 0 <= start and start + count <= n_chips
            for c in range(start, start + count):
                reach.setdefault(c, []).append(k)
        assert max(len(v) for v in reach.values()) == 2


def test_random_mixing_reproducible_and_separated():
    a = random_mixing(4, 2, 123)
    b = random_mixing(4, 2, 123)
    assert np.array_equal(a, b)
    assert a.shape == (2, 4)
    assert np.all((a >= 0.1) & (a < 1.0))
    ratios = np.sort(a[1] / a[0])
    assert np.min(np.diff(ratios)) >= 0.05
    assert not np.array_equal(a, random_mixing(4, 2, 124))
    with pytest.raises(ConfigError, match="at least 2 rows"):
        random_mixing(3, 1, 0)


def test_default_activity_eps():
    x1 = np.array([0.0, -2.0, 1.0])
    assert default_activity_eps(x1) == pytest.approx(2e-6, rel=1e-12)
    with pytest.raises(ValueError, match="all-zero channel"):
        default_activity_eps(np.zeros(5))
