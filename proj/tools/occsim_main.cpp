#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "occsim/config_io.hpp"
#include "occsim/errors.hpp"
#include "occsim/pipeline.hpp"
#include "occsim/plot.hpp"
#include "occsim/sweeps.hpp"

namespace {

constexpr int kExitConfig = 10;
constexpr int kExitIo = 11;
constexpr int kExitTrace = 12;

namespace fs = std::filesystem;

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw occsim::IoError("cannot write " + path.string());
    return out;
}

int run_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed) {
    occsim::ScenarioConfig cfg = occsim::load_scenario_file(config_path);
    if (seed) cfg.rng_seed = *seed;
    const occsim::PipelineResult result = occsim::run_pipeline(cfg);

    fs::create_directories(out_dir);
    {
        auto out = open_out(fs::path(out_dir) / "frames.csv");
        occsim::write_frame_csv(out, cfg, result);
    }
    {
        auto out = open_out(fs::path(out_dir) / "summary.csv");
        occsim::write_summary_csv(out, result);
    }
    if (cfg.emit_link_trace) {
        auto out = open_out(fs::path(out_dir) / "occ_trace.csv");
        occsim::write_trace_csv(out, result.link_trace);
    }
    std::printf("simulated %zu frames; hv avg err %.4g m, fv range avg err %.4g m\n",
                result.trace.size(), result.hv_stats.average_error_m,
                result.fv_range_stats.average_error_m);
    return 0;
}

int run_sweep(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed, bool plot) {
    occsim::ExperimentSpec spec = occsim::load_experiment_file(config_path);
    if (seed) spec.rng_seed = *seed;
    const occsim::SweepTable table = occsim::sweep(spec);

    fs::create_directories(out_dir);
    const std::string stem = occsim::sweep_parameter_name(spec.parameter);
    {
        auto out = open_out(fs::path(out_dir) / (stem + ".csv"));
        occsim::write_sweep_csv(out, table);
    }
    if (plot) {
        auto out = open_out(fs::path(out_dir) / (stem + ".svg"));
        occsim::write_sweep_svg(out, table, stem);
    }
    std::printf("sweep %s: %zu values x %d trials\n", stem.c_str(), table.rows.size(), spec.trials);
    return 0;
}

int run_decode(const std::string& trace_path) {
    std::ifstream in(trace_path);
    if (!in) throw occsim::IoError("cannot open trace file: " + trace_path);
    const auto records = occsim::read_trace_csv(in);

    std::map<std::uint32_t, std::pair<std::string, std::pair<std::size_t, std::size_t>>> streams;
    for (const auto& r : records) {
        auto& entry = streams[r.beacon_id];
        const int bit = occsim::decode_frame({r.s1, r.s2, r.time_s});
        entry.first.push_back(static_cast<char>('0' + bit));
        if (r.tx_chip >= 0) {
            ++entry.second.second;
            if (bit != r.tx_chip) ++entry.second.first;
        }
    }
    for (const auto& [id, entry] : streams) {
        std::printf("beacon %u: %s\n", id, entry.first.c_str());
        if (entry.second.second > 0)
            std::printf("beacon %u BER: %.6g (%zu/%zu bits)\n", id,
                        static_cast<double>(entry.second.first) /
                            static_cast<double>(entry.second.second),
                        entry.second.first, entry.second.second);
    }
    return 0;
}

int run_distance(double area_cm2, double pixels, double focal_mm, double pitch_um) {
    occsim::CameraIntrinsics intr = occsim::CameraIntrinsics::from_pixel_pitch(
        focal_mm * 1e-3, pitch_um * 1e-6, 1, 1);
    const double d = occsim::distance_from_pixels(area_cm2 * 1e-4, pixels, intr);
    std::printf("%#.4g m\n", d);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vehicle localization simulator: optical camera communication + photogrammetry"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", trace_path;
    std::optional<std::uint64_t> seed;
    bool plot = false;
    double area_cm2 = 0, pixels = 0, focal_mm = 0, pitch_um = 0;

    auto* simulate = app.add_subcommand("simulate", "run one scenario, write per-frame CSV + summary");
    simulate->add_option("config", config_path, "scenario JSON file")->required();
    simulate->add_option("-o,--out", out_dir, "output directory");
    simulate->add_option("--seed", seed, "override the scenario RNG seed");

    auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep, write one CSV per sweep");
    sweep_cmd->add_option("config", config_path, "experiment JSON file")->required();
    sweep_cmd->add_option("-o,--out", out_dir, "output directory");
    sweep_cmd->add_option("--seed", seed, "override the sweep RNG seed");
    sweep_cmd->add_flag("--plot", plot, "also write an SVG chart per sweep");

    auto* decode = app.add_subcommand("decode", "XOR-demodulate a frame trace CSV");
    decode->add_option("trace", trace_path, "trace CSV file")->required();

    auto* distance = app.add_subcommand("distance", "photogrammetric distance from pixel area");
    distance->add_option("--area-cm2", area_cm2, "LED panel area in cm^2")
        ->required()
        ->check(CLI::PositiveNumber);
    distance->add_option("--pixels", pixels, "occupied pixel count n_IS")
        ->required()
        ->check(CLI::PositiveNumber);
    distance->add_option("--focal-mm", focal_mm, "focal length in mm")
        ->required()
        ->check(CLI::PositiveNumber);
    distance->add_option("--pitch-um", pitch_um, "pixel pitch in um")
        ->required()
        ->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return run_simulate(config_path, out_dir, seed);
        if (sweep_cmd->parsed()) return run_sweep(config_path, out_dir, seed, plot);
        if (decode->parsed()) return run_decode(trace_path);
        if (distance->parsed()) return run_distance(area_cm2, pixels, focal_mm, pitch_um);
    } catch (const occsim::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const occsim::TraceFormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitTrace;
    } catch (const occsim::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
