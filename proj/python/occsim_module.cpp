#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "occsim/config_io.hpp"
#include "occsim/localization.hpp"
#include "occsim/occ.hpp"
#include "occsim/pipeline.hpp"
#include "occsim/sweeps.hpp"

namespace py = pybind11;
using namespace occsim;

namespace {

py::dict stats_dict(const ErrorStats& s) {
    py::dict d;
    d["average_error_m"] = s.average_error_m;
    d["maximum_error_m"] = s.maximum_error_m;
    d["accuracy_percent"] = s.accuracy_percent;
    d["sample_count"] = s.sample_count;
    return d;
}

} // namespace

PYBIND11_MODULE(_occsim, m) {
    m.doc() = "Vehicle localization by optical camera communication and photogrammetry";

    // Photogrammetric ranging and triangulation.
    m.def(
        "distance_from_pixels",
        [](double area_m2, double pixel_count, double focal_m, double pitch_m) {
            return distance_from_pixels(area_m2, pixel_count,
                                        CameraIntrinsics::from_pixel_pitch(focal_m, pitch_m, 1, 1));
        },
        py::arg("area_m2"), py::arg("pixel_count"), py::arg("focal_m"), py::arg("pitch_m"),
        "Range from occupied pixel area: D = (F/rho) * sqrt(A / n)");
    m.def("horizontal_standoff", &horizontal_standoff, py::arg("direct_distance_m"),
          py::arg("mount_height_diff_m"));
    m.def(
        "longitudinal_offset",
        [](double a1, double a2, double d) {
            const auto r = longitudinal_offset(a1, a2, d);
            return py::make_tuple(r.value, r.in_band);
        },
        py::arg("a1"), py::arg("a2"), py::arg("spacing_m"),
        "Returns (c, in_band); c = ((a2^2 - a1^2) - d^2) / (2 d)");
    m.def("lateral_distance", &lateral_distance, py::arg("a1"), py::arg("c"));
    m.def(
        "triangulate",
        [](double a1, double a2, double d) {
            const auto c = longitudinal_offset(a1, a2, d);
            return py::make_tuple(lateral_distance(a1, c.value), c.value, c.in_band);
        },
        py::arg("a1"), py::arg("a2"), py::arg("spacing_m"),
        "Full inversion: returns (h, c, in_band)");
    m.def(
        "bearing_from_displacement",
        [](double displacement_px, double focal_m, double pitch_m) {
            return bearing_from_displacement(
                displacement_px, CameraIntrinsics::from_pixel_pitch(focal_m, pitch_m, 1, 1));
        },
        py::arg("displacement_px"), py::arg("focal_m"), py::arg("pitch_m"));
    m.def(
        "continuous_pixel_area",
        [](double area_m2, double distance_m, double focal_m, double pitch_m) {
            LedPanelSpec panel;
            panel.width_m = std::sqrt(area_m2);
            panel.height_m = std::sqrt(area_m2);
            return continuous_pixel_area(panel, distance_m,
                                         CameraIntrinsics::from_pixel_pitch(focal_m, pitch_m, 1, 1));
        },
        py::arg("area_m2"), py::arg("distance_m"), py::arg("focal_m"), py::arg("pitch_m"));

    // S2-PSK link operations.
    m.def(
        "decode_frame", [](int s1, int s2) { return s1 ^ s2; }, py::arg("s1"), py::arg("s2"),
        "XOR demodulation of one frame sample");
    m.def("channel_gain", &channel_gain, py::arg("lambertian_m"), py::arg("receiver_area_m2"),
          py::arg("distance_m"), py::arg("incidence_rad"), py::arg("irradiation_rad"),
          py::arg("concentrator_gain") = 1.0, py::arg("filter_transmission") = 1.0);
    m.def(
        "sinr",
        [](double kappa, double power_w, double gain, double t, double n0, double bandwidth,
           const std::vector<double>& interferers) {
            ChannelParams ch;
            ch.kappa = kappa;
            ch.power_conversion_t = t;
            ch.noise_psd_w_per_hz = n0;
            ch.bandwidth_hz = bandwidth;
            return sinr(ch, gain, power_w, interferers);
        },
        py::arg("kappa"), py::arg("optical_power_w"), py::arg("channel_gain"),
        py::arg("power_conversion_t"), py::arg("noise_psd_w_per_hz"), py::arg("bandwidth_hz"),
        py::arg("interferer_gains") = std::vector<double>{});
    m.def("led_state_error_prob", &led_state_error_prob, py::arg("sinr"));
    m.def("ber_s2psk", &ber_s2psk, py::arg("p_e"), py::arg("alpha") = 1.0);
    m.def("payload_bit_rate", &payload_bit_rate, py::arg("frame_rate_hz"));
    m.def(
        "manchester_encode",
        [](const std::vector<std::uint8_t>& bits) { return manchester_encode(bits); },
        py::arg("bits"));
    m.def(
        "manchester_decode",
        [](const std::vector<std::uint8_t>& chips) -> py::object {
            const auto bits = manchester_decode(chips);
            if (!bits) return py::none();
            return py::cast(*bits);
        },
        py::arg("chips"));
    m.def(
        "roundtrip_chips",
        [](const std::vector<std::uint8_t>& bits, double p_e, std::uint64_t seed) {
            auto waveform = make_waveform(bits, 120.0, 30.0);
            std::mt19937_64 rng(seed);
            const auto samples = transmit_and_sample(waveform, p_e, 30.0, bits.size(), rng);
            std::vector<std::uint8_t> decoded;
            decoded.reserve(samples.size());
            for (const auto& s : samples) decoded.push_back(decode_frame(s));
            return decoded;
        },
        py::arg("bits"), py::arg("p_e") = 0.0, py::arg("seed") = 1,
        "Encode, sample once per frame, and XOR-decode a chip sequence");

    // Scenario pipeline and sweeps, driven by the JSON config format.
    m.def(
        "run_simulation",
        [](const std::string& config_json) {
            const ScenarioConfig cfg = load_scenario(config_json);
            const PipelineResult res = run_pipeline(cfg);
            py::dict d;
            d["frames"] = res.trace.size();
            d["hv_position"] = stats_dict(res.hv_stats);
            d["fv_range"] = stats_dict(res.fv_range_stats);
            d["fv_world"] = stats_dict(res.fv_world_stats);
            return d;
        },
        py::arg("config_json"), "Run a scenario from its JSON text; returns summary stats");
    m.def(
        "run_sweep",
        [](const std::string& config_json) {
            const ExperimentSpec spec = load_experiment(config_json);
            const SweepTable table = sweep(spec);
            py::dict d;
            d["parameter"] = table.parameter;
            d["columns"] = table.columns;
            d["rows"] = table.rows;
            return d;
        },
        py::arg("config_json"), "Run a parameter sweep from its JSON text; returns the table");
    m.def(
        "frame_csv",
        [](const std::string& config_json) {
            const ScenarioConfig cfg = load_scenario(config_json);
            const PipelineResult res = run_pipeline(cfg);
            std::ostringstream out;
            write_frame_csv(out, cfg, res);
            return out.str();
        },
        py::arg("config_json"), "Per-frame estimate CSV for a scenario");
}
