#include "occsim/sweeps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "occsim/errors.hpp"

namespace occsim {

const char* sweep_parameter_name(SweepParameter p) {
    switch (p) {
        case SweepParameter::sensor_resolution: return "sensor_resolution_mp";
        case SweepParameter::exposure_time: return "exposure_time_s";
        case SweepParameter::fv_speed: return "fv_speed_kmh";
        case SweepParameter::sl_spacing: return "sl_spacing_m";
        case SweepParameter::sinr: return "sinr_db";
        case SweepParameter::led_power: return "led_power_w";
    }
    return "unknown";
}

std::optional<SweepParameter> parse_sweep_parameter(const std::string& name) {
    if (name == "sensor_resolution") return SweepParameter::sensor_resolution;
    if (name == "exposure_time") return SweepParameter::exposure_time;
    if (name == "fv_speed") return SweepParameter::fv_speed;
    if (name == "sl_spacing") return SweepParameter::sl_spacing;
    if (name == "sinr") return SweepParameter::sinr;
    if (name == "led_power") return SweepParameter::led_power;
    return std::nullopt;
}

void ExperimentSpec::validate() const {
    if (values.empty()) throw ConfigError("sweep.values", "must be nonempty");
    if (trials < 1) throw ConfigError("sweep.trials", "must be at least 1");
    for (double v : values) {
        switch (parameter) {
            case SweepParameter::sensor_resolution:
                if (v < 1.0 || v > 10.0)
                    throw ConfigError("sweep.values", "resolution must be 1-10 megapixels");
                break;
            case SweepParameter::exposure_time:
                if (v < 1.0 / 2000.0 - 1e-9 || v > 1.0 / 15.0 + 1e-9)
                    throw ConfigError("sweep.values", "exposure must be within 1/2000..1/15 s");
                break;
            case SweepParameter::fv_speed:
                if (v < 0.0 || v > 110.0)
                    throw ConfigError("sweep.values", "vehicle speed must be within 0..110 km/h");
                break;
            case SweepParameter::sl_spacing:
                if (v < 10.0 || v > 150.0)
                    throw ConfigError("sweep.values", "streetlight spacing must be within 10..150 m");
                break;
            case SweepParameter::sinr:
                break;
            case SweepParameter::led_power:
                if (v <= 0.0) throw ConfigError("sweep.values", "LED power must be positive");
                break;
        }
    }
    if (parameter == SweepParameter::sl_spacing && !base.streetlight_line)
        throw ConfigError("streetlights", "spacing sweep needs the generated streetlight line form");
    base.validate();
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t value_index, std::uint64_t trial) {
    // splitmix64 over a mixed key
    std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (value_index * 1000003ull + trial + 1ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

ScenarioConfig scenario_for_trial(const ExperimentSpec& spec, std::size_t value_index, int trial) {
    ScenarioConfig cfg = spec.base;
    const double value = spec.values[value_index];
    switch (spec.parameter) {
        case SweepParameter::sensor_resolution:
            cfg.camera.intrinsics = CameraIntrinsics::from_megapixels(
                cfg.camera.intrinsics.focal_length_m, cfg.camera.intrinsics.sensor_width_m,
                cfg.camera.intrinsics.sensor_height_m, value);
            break;
        case SweepParameter::exposure_time:
            cfg.camera.exposure.exposure_s = value;
            break;
        case SweepParameter::fv_speed:
            for (auto& v : cfg.vehicles)
                if (!v.is_host) v.speed_mps = kmh_to_mps(value);
            break;
        case SweepParameter::sl_spacing: {
            auto& line = *cfg.streetlight_line;
            const double covered = line.count * line.spacing_m;
            line.spacing_m = value;
            line.count = std::max(2, static_cast<int>(std::ceil(covered / value)) + 1);
            break;
        }
        case SweepParameter::sinr:
        case SweepParameter::led_power:
            break; // link-level sweeps don't run scenarios
    }

    const std::uint64_t seed = derive_seed(spec.rng_seed, value_index, static_cast<std::uint64_t>(trial));
    cfg.rng_seed = seed;

    // Jitter start phases so trials sample different raster alignments: the
    // host moves within one spacing, the gaps to other vehicles by +/- 25 cm.
    // The jitter is a function of the trial alone, so sweeping a value against
    // a fixed trial compares like against like.
    std::mt19937_64 jitter(derive_seed(spec.rng_seed, 0xA5A5, trial));
    auto uniform = [&jitter]() { return static_cast<double>(jitter() >> 11) * 0x1.0p-53; };
    double spacing = 25.0;
    if (cfg.streetlight_line) spacing = cfg.streetlight_line->spacing_m;
    const double host_shift = uniform() * spacing;
    for (auto& v : cfg.vehicles) {
        if (v.is_host)
            v.start_along_road_m += host_shift;
        else
            v.start_along_road_m += host_shift + 0.5 * (uniform() - 0.5);
    }
    return cfg;
}

namespace {

SweepTable link_ber_sweep(const ExperimentSpec& spec) {
    SweepTable table;
    table.parameter = sweep_parameter_name(spec.parameter);
    const ChannelParams& ch = spec.base.link.channel;
    const double alpha = spec.base.link.alpha;

    if (spec.parameter == SweepParameter::sinr) {
        // BER vs SINR for a set of Gaussian channel-filter spreads.
        const double sigmas[] = {0.1, 0.5, 1.0};
        table.columns = {"sinr_db", "ber_sigma_0.1", "ber_sigma_0.5", "ber_sigma_1.0",
                         "ber_mc_sigma_0.5"};
        for (std::size_t vi = 0; vi < spec.values.size(); ++vi) {
            const double snr_db = spec.values[vi];
            const double snr = std::pow(10.0, snr_db / 10.0);
            std::vector<double> row{snr_db};
            for (double sc : sigmas)
                row.push_back(ber_s2psk(led_state_error_prob(sinr_with_filter_penalty(snr, sc)), alpha));
            // Monte-Carlo check at the base spread.
            const double p_e = led_state_error_prob(sinr_with_filter_penalty(snr, 0.5));
            std::mt19937_64 rng(derive_seed(spec.rng_seed, vi, 0));
            const std::size_t n_bits = 20000u * static_cast<std::size_t>(spec.trials);
            std::size_t errors = 0;
            for (std::size_t i = 0; i < n_bits; ++i) {
                const std::uint8_t tx = static_cast<std::uint8_t>(rng() & 1u);
                std::uint8_t s1 = static_cast<std::uint8_t>(rng() & 1u);
                std::uint8_t s2 = tx ? static_cast<std::uint8_t>(1 - s1) : s1;
                if (bernoulli(rng, p_e)) s1 ^= 1u;
                if (bernoulli(rng, p_e)) s2 ^= 1u;
                if ((s1 ^ s2) != tx) ++errors;
            }
            row.push_back(static_cast<double>(errors) / static_cast<double>(n_bits));
            table.rows.push_back(std::move(row));
        }
        return table;
    }

    // LED power vs BER at several data speeds; the modulation bandwidth
    // scales with the chip rate (two chips per payload bit).
    const double rates_bps[] = {1.0, 2.0, 5.0};
    table.columns = {"led_power_w", "ber_1bps", "ber_2bps", "ber_5bps"};
    // Reference link: the first streetlight as seen from the host start.
    const ScenarioConfig& base = spec.base;
    Scene scene = base.build_scene();
    const auto visible = visible_beacons(scene, base.camera.mount_height_m,
                                         base.camera.fov_horizontal_rad, base.camera.max_range_m);
    double gain = 0.0;
    for (const auto& b : visible) {
        const double h = channel_gain(b.panel.lambertian_order, base.camera.intrinsics.sensor_area_m2(),
                                      b.direct_distance_m, b.incidence_rad, b.irradiation_rad,
                                      ch.concentrator_gain, ch.filter_transmission);
        gain = std::max(gain, h);
    }
    if (gain <= 0.0) throw ConfigError("scenario", "led_power sweep needs a visible beacon");
    for (double power : spec.values) {
        std::vector<double> row{power};
        for (double rate : rates_bps) {
            ChannelParams c = ch;
            c.bandwidth_hz = 2.0 * rate;
            const double snr = sinr_with_filter_penalty(sinr(c, gain, power), base.link.sigma_c);
            row.push_back(ber_s2psk(led_state_error_prob(snr), alpha));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace

SweepTable sweep(const ExperimentSpec& spec) {
    spec.validate();
    if (spec.parameter == SweepParameter::sinr || spec.parameter == SweepParameter::led_power)
        return link_ber_sweep(spec);

    SweepTable table;
    table.parameter = sweep_parameter_name(spec.parameter);
    table.columns = {table.parameter,
                     "avg_error_cm",
                     "max_error_cm",
                     "avg_world_error_cm",
                     "max_world_error_cm",
                     "accuracy_percent",
                     "samples"};

    // The average aggregates all samples; the maximum error comes from a
    // single run, so repeated trials contribute the mean of per-trial maxima.
    for (std::size_t vi = 0; vi < spec.values.size(); ++vi) {
        double range_sum = 0.0, range_max_sum = 0.0;
        double world_sum = 0.0, world_max_sum = 0.0;
        double accuracy_sum = 0.0;
        std::size_t range_n = 0, world_n = 0;
        for (int trial = 0; trial < spec.trials; ++trial) {
            const ScenarioConfig cfg = scenario_for_trial(spec, vi, trial);
            const PipelineResult res = run_pipeline(cfg);
            range_sum += res.fv_range_stats.average_error_m * res.fv_range_stats.sample_count;
            range_n += res.fv_range_stats.sample_count;
            range_max_sum += res.fv_range_stats.maximum_error_m;
            world_sum += res.fv_world_stats.average_error_m * res.fv_world_stats.sample_count;
            world_n += res.fv_world_stats.sample_count;
            world_max_sum += res.fv_world_stats.maximum_error_m;
            accuracy_sum += res.hv_stats.accuracy_percent;
        }
        const double avg_range = range_n ? range_sum / static_cast<double>(range_n) : 0.0;
        const double avg_world = world_n ? world_sum / static_cast<double>(world_n) : 0.0;
        table.rows.push_back({spec.values[vi], avg_range * 100.0,
                              range_max_sum / spec.trials * 100.0, avg_world * 100.0,
                              world_max_sum / spec.trials * 100.0, accuracy_sum / spec.trials,
                              static_cast<double>(range_n)});
    }
    return table;
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out << ',';
        out << table.columns[i];
    }
    out << '\n';
    char buf[64];
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            std::snprintf(buf, sizeof buf, "%.9g", row[i]);
            out << buf;
        }
        out << '\n';
    }
}

} // namespace occsim
