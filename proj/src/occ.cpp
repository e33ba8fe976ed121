#include "occsim/occ.hpp"

#include "occsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace occsim {

namespace {

std::uint32_t quantize(double value, double unit, std::uint32_t max_code) {
    const double code = std::round(value / unit);
    return static_cast<std::uint32_t>(std::clamp(code, 0.0, static_cast<double>(max_code)));
}

void push_bits(std::vector<std::uint8_t>& out, std::uint32_t value, int bits) {
    for (int i = bits - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>((value >> i) & 1u));
}

std::uint32_t read_bits(std::span<const std::uint8_t> bits, std::size_t offset, int count) {
    std::uint32_t v = 0;
    for (int i = 0; i < count; ++i) v = (v << 1) | (bits[offset + static_cast<std::size_t>(i)] & 1u);
    return v;
}

} // namespace

std::vector<std::uint8_t> pack_beacon_id(const BeaconId& id) {
    std::vector<std::uint8_t> bits;
    bits.reserve(kPacketBits);
    const bool sl = id.kind == BeaconKind::streetlight;
    push_bits(bits, sl ? kStreetlightHeader : kVehicleHeader, kHeaderBits);
    push_bits(bits, id.id & 0xFFFu, kIdBits);
    if (sl) {
        push_bits(bits, quantize(id.lamp_height_m, 0.1, 255), 8);
        push_bits(bits, quantize(id.spacing_m, 1.0, 255), 8);
    } else {
        push_bits(bits, quantize(id.panel_area_m2, 1e-4, 255), 8); // cm^2
        push_bits(bits, 0, 8);
    }
    return bits;
}

std::optional<BeaconId> unpack_beacon_id(std::span<const std::uint8_t> bits) {
    if (bits.size() != kPacketBits) return std::nullopt;
    const std::uint32_t header = read_bits(bits, 0, kHeaderBits);
    BeaconId id;
    if (header == kStreetlightHeader) {
        id.kind = BeaconKind::streetlight;
    } else if (header == kVehicleHeader) {
        id.kind = BeaconKind::taillight;
    } else {
        return std::nullopt;
    }
    id.id = static_cast<std::uint16_t>(read_bits(bits, kHeaderBits, kIdBits));
    const std::uint32_t f1 = read_bits(bits, kHeaderBits + kIdBits, 8);
    const std::uint32_t f2 = read_bits(bits, kHeaderBits + kIdBits + 8, 8);
    if (id.kind == BeaconKind::streetlight) {
        id.lamp_height_m = f1 * 0.1;
        id.spacing_m = static_cast<double>(f2);
    } else {
        id.panel_area_m2 = f1 * 1e-4;
        (void)f2;
    }
    return id;
}

std::vector<std::uint8_t> manchester_encode(std::span<const std::uint8_t> bits) {
    std::vector<std::uint8_t> chips;
    chips.reserve(bits.size() * 2);
    for (std::uint8_t b : bits) {
        chips.push_back(b ? 1 : 0);
        chips.push_back(b ? 0 : 1);
    }
    return chips;
}

std::optional<std::vector<std::uint8_t>> manchester_decode(std::span<const std::uint8_t> chips) {
    if (chips.size() % 2 != 0) return std::nullopt;
    std::vector<std::uint8_t> bits;
    bits.reserve(chips.size() / 2);
    for (std::size_t i = 0; i < chips.size(); i += 2) {
        if (chips[i] == chips[i + 1]) return std::nullopt; // coding violation
        bits.push_back(chips[i]);
    }
    return bits;
}

S2pskWaveform make_waveform(std::vector<std::uint8_t> bits, double clock_rate_hz,
                            double bit_rate_hz) {
    if (bits.empty()) throw std::invalid_argument("make_waveform: bit sequence must be nonempty");
    if (clock_rate_hz < 100.0)
        throw std::invalid_argument("make_waveform: clock rate below the flicker-free floor (100 Hz)");
    const double cycles = clock_rate_hz / bit_rate_hz;
    const int n = static_cast<int>(std::lround(cycles));
    if (n < 1 || std::abs(cycles - n) > 1e-9)
        throw std::invalid_argument("make_waveform: clock rate must be a whole multiple of the bit rate");
    S2pskWaveform w;
    w.bit_sequence = std::move(bits);
    w.clock_rate_hz = clock_rate_hz;
    w.cycle_period_s = 1.0 / clock_rate_hz;
    w.cycles_per_bit = n;
    return w;
}

std::vector<CycleStates> encode_s2psk(std::span<const std::uint8_t> bits, int cycles_per_bit) {
    if (bits.empty()) throw std::invalid_argument("encode_s2psk: bit sequence must be nonempty");
    std::vector<CycleStates> schedule;
    schedule.reserve(bits.size() * static_cast<std::size_t>(cycles_per_bit));
    for (std::uint8_t b : bits) {
        CycleStates cs;
        cs.s1_first = 1;
        cs.s1_second = 0;
        if (b) {
            cs.s2_first = 0; // inverted phase for bit 1
            cs.s2_second = 1;
        } else {
            cs.s2_first = 1; // same phase for bit 0
            cs.s2_second = 0;
        }
        for (int k = 0; k < cycles_per_bit; ++k) schedule.push_back(cs);
    }
    return schedule;
}

std::pair<std::uint8_t, std::uint8_t> led_states_at(const S2pskWaveform& w, double t_s) {
    const double duration = w.duration_s();
    double t = std::fmod(t_s, duration);
    if (t < 0.0) t += duration;
    const auto bit_index = static_cast<std::size_t>(t / w.bit_interval_s());
    const std::uint8_t bit = w.bit_sequence[std::min(bit_index, w.bit_sequence.size() - 1)];
    const double cycle_phase = std::fmod(t, w.cycle_period_s) / w.cycle_period_s;
    const std::uint8_t s1 = cycle_phase < 0.5 ? 1 : 0;
    const std::uint8_t s2 = bit ? static_cast<std::uint8_t>(1 - s1) : s1;
    return {s1, s2};
}

double channel_gain(double lambertian_m, double receiver_area_m2, double distance_m,
                    double incidence_rad, double irradiation_rad, double concentrator_gain,
                    double filter_transmission) {
    if (distance_m <= 0.0) throw std::invalid_argument("channel_gain: distance must be positive");
    const double cos_theta = std::cos(incidence_rad);
    const double cos_phi = std::cos(irradiation_rad);
    if (cos_theta <= 1e-12 || cos_phi <= 1e-12) return 0.0; // grazing or back-facing
    return (lambertian_m + 1.0) * receiver_area_m2 / (2.0 * kPi * distance_m * distance_m) *
           concentrator_gain * filter_transmission * std::pow(cos_phi, lambertian_m) * cos_theta;
}

double sinr(const ChannelParams& ch, double h, double optical_power_w,
            std::span<const double> interferer_gains) {
    const double signal = ch.kappa * optical_power_w * h;
    double denom = ch.power_conversion_t * ch.power_conversion_t * ch.noise_psd_w_per_hz *
                   ch.bandwidth_hz;
    for (double he : interferer_gains) {
        const double i = ch.kappa * optical_power_w * he;
        denom += i * i;
    }
    if (denom <= 0.0) throw std::domain_error("sinr: noise and interference both vanish");
    return signal * signal / denom;
}

double led_state_error_prob(double sinr_value) {
    if (sinr_value < 0.0) throw std::invalid_argument("led_state_error_prob: SINR must be nonnegative");
    // Q(x) = erfc(x / sqrt(2)) / 2
    return 0.5 * std::erfc(std::sqrt(sinr_value) / std::sqrt(2.0));
}

double ber_s2psk(double p_e, double alpha) {
    const double ap = alpha * p_e;
    if (ap < 0.0 || ap > 1.0) throw std::domain_error("ber_s2psk: alpha * p_e outside [0, 1]");
    return 2.0 * ap * (1.0 - ap);
}

std::vector<S2pskFrameSample> transmit_and_sample(const S2pskWaveform& waveform, double p_e,
                                                  double frame_rate_hz, std::size_t n_frames,
                                                  std::mt19937_64& rng, double exposure_s) {
    if (frame_rate_hz <= 0.0) throw std::invalid_argument("transmit_and_sample: frame rate must be positive");
    std::vector<S2pskFrameSample> samples;
    samples.reserve(n_frames);
    // Mid-exposure sampling; a zero exposure degenerates to mid-frame so the
    // sample never sits exactly on a bit boundary.
    const double offset = exposure_s > 0.0 ? exposure_s / 2.0 : 0.5 / frame_rate_hz;
    for (std::size_t k = 0; k < n_frames; ++k) {
        const double t = static_cast<double>(k) / frame_rate_hz + offset;
        auto [s1, s2] = led_states_at(waveform, t);
        if (bernoulli(rng, p_e)) s1 ^= 1u;
        if (bernoulli(rng, p_e)) s2 ^= 1u;
        samples.push_back({s1, s2, t});
    }
    return samples;
}

void write_trace_csv(std::ostream& out, std::span<const TraceRecord> records) {
    out << "time_s,beacon_id,s1,s2,tx_chip\n";
    char buf[64];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%.9g", r.time_s);
        out << buf << ',' << r.beacon_id << ',' << int(r.s1) << ',' << int(r.s2) << ',';
        if (r.tx_chip >= 0) out << r.tx_chip;
        out << '\n';
    }
}

std::vector<TraceRecord> read_trace_csv(std::istream& in) {
    std::vector<TraceRecord> records;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (!header_seen) {
            header_seen = true;
            if (line.rfind("time_s,", 0) == 0) continue; // header row optional
        }
        std::istringstream ss(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (fields.size() < 4) throw TraceFormatError(line_no, "expected time,beacon,s1,s2");
        TraceRecord r;
        try {
            r.time_s = std::stod(fields[0]);
            r.beacon_id = static_cast<std::uint32_t>(std::stoul(fields[1]));
        } catch (const std::exception&) {
            throw TraceFormatError(line_no, "unparsable numeric field");
        }
        auto parse_state = [&](const std::string& s) -> std::uint8_t {
            if (s == "0") return 0;
            if (s == "1") return 1;
            throw TraceFormatError(line_no, "LED state must be 0 or 1, got '" + s + "'");
        };
        r.s1 = parse_state(fields[2]);
        r.s2 = parse_state(fields[3]);
        if (fields.size() >= 5 && !fields[4].empty()) {
            if (fields[4] == "0" || fields[4] == "1")
                r.tx_chip = fields[4][0] - '0';
            else
                throw TraceFormatError(line_no, "tx_chip must be 0 or 1");
        }
        records.push_back(r);
    }
    return records;
}

} // namespace occsim
