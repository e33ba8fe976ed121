#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "occsim/scene.hpp"

namespace occsim {

/// Decoded beacon identity packet. Physical payload fields are quantized to
/// the packet field widths (streetlights: height in 0.1 m units, spacing in
/// 1 m units; vehicles: single-taillight area in cm^2), so decoding is
/// round-trip stable.
struct BeaconId {
    BeaconKind kind = BeaconKind::streetlight;
    std::uint16_t id = 0;            // 12-bit field
    double lamp_height_m = 0.0;      // SL only
    double spacing_m = 0.0;          // SL only
    double panel_area_m2 = 0.0;      // FV only

    friend bool operator==(const BeaconId&, const BeaconId&) = default;
};

inline constexpr int kHeaderBits = 4;
inline constexpr int kIdBits = 12;
inline constexpr int kPacketBits = 32;  // header + id + two 8-bit fields
inline constexpr int kPacketChips = 2 * kPacketBits;
inline constexpr std::uint8_t kStreetlightHeader = 0b1010;
inline constexpr std::uint8_t kVehicleHeader = 0b0101;

/// Packs a BeaconId into its 32 packet bits (MSB first), quantizing the
/// physical fields.
std::vector<std::uint8_t> pack_beacon_id(const BeaconId& id);

/// Inverse of pack_beacon_id. Returns nullopt when the header matches
/// neither beacon kind.
std::optional<BeaconId> unpack_beacon_id(std::span<const std::uint8_t> bits);

/// IEEE Manchester at the data level: 0 -> 01, 1 -> 10. One chip per camera
/// frame, which is why the deliverable payload rate is frame_rate/2.
std::vector<std::uint8_t> manchester_encode(std::span<const std::uint8_t> bits);
std::optional<std::vector<std::uint8_t>> manchester_decode(std::span<const std::uint8_t> chips);

inline double payload_bit_rate(double frame_rate_hz) { return frame_rate_hz / 2.0; }

/// Two-LED waveform for a chip sequence: LED 1 always emits the Manchester
/// carrier (high for the first half-cycle, low for the second); LED 2 emits
/// the same phase during 0-chips and the inverted phase during 1-chips.
struct S2pskWaveform {
    std::vector<std::uint8_t> bit_sequence; // transmitted chips
    double cycle_period_s = 1.0 / 120.0;    // T
    int cycles_per_bit = 4;                 // N
    double clock_rate_hz = 120.0;           // 1/T

    double bit_interval_s() const { return cycle_period_s * cycles_per_bit; }
    double duration_s() const { return bit_interval_s() * static_cast<double>(bit_sequence.size()); }
};

/// Builds a waveform; the clock must divide into whole cycles per bit and be
/// flicker-free (>= 100 Hz).
S2pskWaveform make_waveform(std::vector<std::uint8_t> bits, double clock_rate_hz, double bit_rate_hz);

/// Per-half-cycle LED states, one entry per carrier cycle.
struct CycleStates {
    std::uint8_t s1_first = 1, s1_second = 0;
    std::uint8_t s2_first = 0, s2_second = 0;
};

std::vector<CycleStates> encode_s2psk(std::span<const std::uint8_t> bits, int cycles_per_bit = 4);

/// Instantaneous LED pair states at time t; the waveform repeats cyclically.
std::pair<std::uint8_t, std::uint8_t> led_states_at(const S2pskWaveform& waveform, double t_s);

struct S2pskFrameSample {
    std::uint8_t s1 = 0;
    std::uint8_t s2 = 0;
    double sample_time_s = 0.0;
};

/// XOR demodulation: same LED states read as bit 0, differing states as 1.
inline std::uint8_t decode_frame(const S2pskFrameSample& sample) {
    return static_cast<std::uint8_t>(sample.s1 ^ sample.s2);
}

/// Optical receiver and noise parameters.
struct ChannelParams {
    double kappa = 0.5;               // optical-to-electric conversion efficiency
    double noise_psd_w_per_hz = 1e-21; // N_0
    double bandwidth_hz = 120.0;      // B
    double power_conversion_t = 1.0;  // P_elec <-> P_opt factor
    double concentrator_gain = 1.0;   // g(theta)
    double filter_transmission = 1.0; // T_s(theta)
};

/// Lambertian channel gain
///   H = (m+1) A_c / (2 pi D^2) * g(theta) T_s(theta) cos^m(phi) cos(theta).
/// Grazing or back-facing geometry (a cosine <= 0) yields zero gain.
double channel_gain(double lambertian_m, double receiver_area_m2, double distance_m,
                    double incidence_rad, double irradiation_rad, double concentrator_gain = 1.0,
                    double filter_transmission = 1.0);

/// SINR = (kappa P H)^2 / (t^2 N_0 B + sum (kappa P H_else)^2). Throws
/// std::domain_error when noise and interference both vanish.
double sinr(const ChannelParams& channel, double channel_gain_h, double optical_power_w,
            std::span<const double> interferer_gains = {});

/// Channel-filter estimation error penalty: effective SINR given the
/// Gaussian blur spread sigma_c.
inline double sinr_with_filter_penalty(double sinr_value, double sigma_c) {
    return sinr_value / (1.0 + sigma_c * sigma_c);
}

/// LED-state error probability of a binary threshold detector,
/// p_e = Q(sqrt(SINR)); 0.5 at zero SINR, strictly decreasing.
double led_state_error_prob(double sinr_value);

/// S2-PSK bit error rate P_e = 2 a p_e (1 - a p_e); alpha is the error rate
/// enhancement. Throws std::domain_error when a*p_e > 1.
double ber_s2psk(double p_e, double alpha);

/// Samples the waveform once per frame, mid-exposure, flipping each LED
/// state independently with probability p_e.
std::vector<S2pskFrameSample> transmit_and_sample(const S2pskWaveform& waveform, double p_e,
                                                  double frame_rate_hz, std::size_t n_frames,
                                                  std::mt19937_64& rng, double exposure_s = 0.0);

/// Draws true with probability p, consuming exactly one engine value.
inline bool bernoulli(std::mt19937_64& rng, double p) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p;
}

/// One frame-trace record: the sampled LED pair for one beacon in one frame.
/// tx_chip is the transmitted ground-truth chip, or -1 when not recorded.
struct TraceRecord {
    double time_s = 0.0;
    std::uint32_t beacon_id = 0;
    std::uint8_t s1 = 0;
    std::uint8_t s2 = 0;
    int tx_chip = -1;
};

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> records);
/// Parses the trace CSV; throws TraceFormatError naming the offending line.
std::vector<TraceRecord> read_trace_csv(std::istream& in);

} // namespace occsim
