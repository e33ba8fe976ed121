#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "occsim/pipeline.hpp"

namespace occsim {

enum class SweepParameter : std::uint8_t {
    sensor_resolution, // megapixels
    exposure_time,     // seconds
    fv_speed,          // km/h
    sl_spacing,        // meters
    sinr,              // dB, link-level BER curve
    led_power          // watts, link-level BER curve
};

const char* sweep_parameter_name(SweepParameter p);
std::optional<SweepParameter> parse_sweep_parameter(const std::string& name);

struct ExperimentSpec {
    ScenarioConfig base;
    SweepParameter parameter = SweepParameter::sensor_resolution;
    std::vector<double> values;
    int trials = 1;
    std::uint64_t rng_seed = 1;

    void validate() const; // keeps values within hardware-plausible ranges
};

/// One row per swept value; the first column is always the swept value.
struct SweepTable {
    std::string parameter;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// Runs the experiment: one row per swept value, aggregated over trials
/// with per-trial derived seeds. Deterministic for a fixed spec.
SweepTable sweep(const ExperimentSpec& spec);

void write_sweep_csv(std::ostream& out, const SweepTable& table);

/// Per-trial scenario with derived seed and jittered start phases.
ScenarioConfig scenario_for_trial(const ExperimentSpec& spec, std::size_t value_index, int trial);

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t value_index, std::uint64_t trial);

} // namespace occsim
