"""Smoke tests for the python bindings."""

import json
import math

import pytest

import occsim


def test_distance_from_pixels_hand_value():
    # 100 cm^2 panel, 400 pixels, 16 mm lens, 4 um pitch -> 20 m
    assert occsim.distance_from_pixels(0.01, 400.0, 0.016, 4e-6) == pytest.approx(20.0)


def test_triangulation_round_trip():
    h, c, d = 10.0, 5.0, 25.0
    a1 = math.hypot(c, h)
    a2 = math.hypot(d + c, h)
    h_hat, c_hat, in_band = occsim.triangulate(a1, a2, d)
    assert in_band
    assert c_hat == pytest.approx(c, rel=1e-9)
    assert h_hat == pytest.approx(h, rel=1e-9)


def test_xor_truth_table():
    assert [occsim.decode_frame(a, b) for a, b in ((0, 0), (0, 1), (1, 0), (1, 1))] == [0, 1, 1, 0]


def test_ber_law():
    assert occsim.ber_s2psk(0.1, 1.0) == pytest.approx(0.18)
    assert occsim.led_state_error_prob(4.0) == pytest.approx(0.02275013, rel=1e-4)
    with pytest.raises(Exception):
        occsim.ber_s2psk(0.6, 2.0)


def test_channel_gain_and_sinr():
    h = occsim.channel_gain(1.0, 0.036 * 0.024, 20.0, 0.0, 0.0)
    assert h == pytest.approx(6.875e-7, rel=1e-3)
    assert occsim.sinr(0.5, 1.0, 1e-6, 1.0, 1e-15, 100.0) == pytest.approx(2.5)


def test_chip_roundtrip_noiseless():
    bits = [0, 1, 1, 0, 1, 0, 0, 1] * 4
    assert occsim.roundtrip_chips(bits, 0.0, 1) == bits


def test_manchester():
    bits = [1, 0, 1, 1]
    chips = occsim.manchester_encode(bits)
    assert occsim.manchester_decode(chips) == bits
    assert occsim.manchester_decode([1, 1]) is None


def test_run_simulation():
    config = {
        "seed": 5,
        "duration_s": 4.0,
        "camera": {
            "megapixels": 10,
            "frame_rate_hz": 30,
            "exposure_s": 0.0005,
            "fov_horizontal_deg": 120,
            "max_range_m": 150,
        },
        "streetlights": {
            "count": 16,
            "spacing_m": 25,
            "lamp_height_m": 7,
            "lateral_offset_m": 5,
            "panel": {"width_m": 0.3, "height_m": 0.3},
        },
        "localization": {"assumed_sl_panel_area_m2": 0.09},
        "vehicles": [
            {"id": 100, "host": True, "start_along_road_m": 30, "speed_kmh": 30},
            {"id": 200, "start_along_road_m": 42, "speed_kmh": 30},
        ],
    }
    summary = occsim.run_simulation(json.dumps(config))
    assert summary["frames"] == 120
    assert summary["fv_range"]["sample_count"] > 0
    assert summary["fv_range"]["average_error_m"] < 0.5
    # same seed, same result
    again = occsim.run_simulation(json.dumps(config))
    assert again == summary


def test_config_error_names_field():
    with pytest.raises(Exception, match="vehicles"):
        occsim.run_simulation(json.dumps({"vehicles": []}))
