#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <sstream>

#include "occsim/errors.hpp"
#include "occsim/occ.hpp"

using namespace occsim;

namespace {

std::vector<std::uint8_t> bits_of(std::uint32_t value, int count) {
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((value >> (count - 1 - i)) & 1u);
    return bits;
}

std::vector<std::uint8_t> decode_samples(const std::vector<S2pskFrameSample>& samples) {
    std::vector<std::uint8_t> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(decode_frame(s));
    return out;
}

} // namespace

TEST_CASE("bit 0 keeps both LEDs in phase, bit 1 inverts the second") {
    const auto schedule = encode_s2psk(std::vector<std::uint8_t>{0, 1}, 4);
    REQUIRE(schedule.size() == 8);
    for (int cycle = 0; cycle < 4; ++cycle) { // bit 0
        CHECK(schedule[cycle].s1_first == schedule[cycle].s2_first);
        CHECK(schedule[cycle].s1_second == schedule[cycle].s2_second);
    }
    for (int cycle = 4; cycle < 8; ++cycle) { // bit 1
        CHECK(schedule[cycle].s1_first != schedule[cycle].s2_first);
        CHECK(schedule[cycle].s1_second != schedule[cycle].s2_second);
    }
    // LED 1 always carries the Manchester carrier
    for (const auto& cs : schedule) {
        CHECK(cs.s1_first == 1);
        CHECK(cs.s1_second == 0);
    }
}

TEST_CASE("all-zero sequence makes both LED schedules identical") {
    const auto schedule = encode_s2psk(std::vector<std::uint8_t>(8, 0), 4);
    for (const auto& cs : schedule) {
        CHECK(cs.s1_first == cs.s2_first);
        CHECK(cs.s1_second == cs.s2_second);
    }
}

TEST_CASE("waveform sampling matches the phase rule at any instant") {
    const auto w = make_waveform({0, 1, 1, 0}, 120.0, 30.0);
    for (double t = 0.0; t < w.duration_s(); t += 0.0007) {
        auto [s1, s2] = led_states_at(w, t);
        const auto bit_index = static_cast<std::size_t>(t / w.bit_interval_s());
        if (w.bit_sequence[bit_index])
            CHECK(s1 != s2);
        else
            CHECK(s1 == s2);
    }
}

TEST_CASE("XOR demodulation truth table") {
    CHECK(decode_frame({1, 1, 0.0}) == 0);
    CHECK(decode_frame({0, 0, 0.0}) == 0);
    CHECK(decode_frame({1, 0, 0.0}) == 1);
    CHECK(decode_frame({0, 1, 0.0}) == 1);
}

TEST_CASE("waveform construction rejects bad clocking") {
    CHECK_THROWS_AS(make_waveform({1}, 90.0, 30.0), std::invalid_argument);  // flickery
    CHECK_THROWS_AS(make_waveform({1}, 125.0, 30.0), std::invalid_argument); // 4.1667 cycles/bit
    CHECK_THROWS_AS(make_waveform({}, 120.0, 30.0), std::invalid_argument);  // empty
    const auto w = make_waveform({1, 0}, 200.0, 25.0);
    CHECK(w.cycles_per_bit == 8);
    CHECK(w.bit_interval_s() == doctest::Approx(0.04));
}

TEST_CASE("noiseless sampling decodes the transmitted chips exactly") {
    std::mt19937_64 rng(5);
    for (std::uint32_t value = 0; value < (1u << 12); ++value) { // exhaustive length 12
        const auto bits = bits_of(value, 12);
        const auto w = make_waveform(bits, 120.0, 30.0);
        const auto samples = transmit_and_sample(w, 0.0, 30.0, bits.size(), rng);
        CHECK(decode_samples(samples) == bits);
    }
    std::mt19937_64 rng2(6);
    for (int trial = 0; trial < 1000; ++trial) { // random length 32
        std::vector<std::uint8_t> bits(32);
        for (auto& b : bits) b = static_cast<std::uint8_t>(rng2() & 1u);
        const auto w = make_waveform(bits, 120.0, 30.0);
        const auto samples = transmit_and_sample(w, 0.0, 30.0, bits.size(), rng2);
        CHECK(decode_samples(samples) == bits);
    }
}

TEST_CASE("30 fps with Manchester coding delivers 15 bps") {
    CHECK(payload_bit_rate(30.0) == doctest::Approx(15.0));
}

TEST_CASE("channel gain at normal incidence reduces to (m+1)Ac/(2 pi D^2)") {
    const double h = channel_gain(1.0, 0.036 * 0.024, 20.0, 0.0, 0.0);
    CHECK(h == doctest::Approx(2.0 * 8.64e-4 / (2.0 * kPi * 400.0)).epsilon(1e-12));
    CHECK(h == doctest::Approx(6.875e-7).epsilon(1e-3)); // hand substitution
}

TEST_CASE("grazing incidence kills the channel") {
    CHECK(channel_gain(1.0, 8.64e-4, 20.0, kPi / 2.0, 0.0) == 0.0);
    CHECK(channel_gain(1.0, 8.64e-4, 20.0, 0.0, kPi / 2.0) == 0.0);
}

TEST_CASE("channel gain scales exactly as the inverse square of distance") {
    const double base = channel_gain(1.5, 8.64e-4, 10.0, 0.2, 0.3);
    for (double d : {20.0, 30.0, 80.0}) {
        const double h = channel_gain(1.5, 8.64e-4, d, 0.2, 0.3);
        CHECK(h * d * d == doctest::Approx(base * 100.0).epsilon(1e-12));
    }
}

TEST_CASE("SINR quadruples when the gain doubles") {
    ChannelParams ch;
    ch.kappa = 0.5;
    ch.noise_psd_w_per_hz = 1e-15;
    ch.bandwidth_hz = 100.0;
    const double s1 = sinr(ch, 1e-6, 1.0);
    const double s2 = sinr(ch, 2e-6, 1.0);
    CHECK(s2 == doctest::Approx(4.0 * s1).epsilon(1e-12));
}

TEST_CASE("symmetric interference limits SINR to one") {
    ChannelParams ch;
    ch.noise_psd_w_per_hz = 1e-30; // negligible thermal noise
    ch.bandwidth_hz = 1.0;
    const double gains[] = {1e-6};
    CHECK(sinr(ch, 1e-6, 1.0, gains) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("SINR hand value") {
    ChannelParams ch;
    ch.kappa = 0.5;
    ch.power_conversion_t = 1.0;
    ch.noise_psd_w_per_hz = 1e-15;
    ch.bandwidth_hz = 100.0; // t^2 N0 B = 1e-13
    CHECK(sinr(ch, 1e-6, 1.0) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("SINR with no noise and no interference is rejected") {
    ChannelParams ch;
    ch.noise_psd_w_per_hz = 0.0;
    CHECK_THROWS_AS(sinr(ch, 1e-6, 1.0), std::domain_error);
}

TEST_CASE("SINR is monotone in optical power with interference present") {
    ChannelParams ch;
    ch.noise_psd_w_per_hz = 1e-15;
    ch.bandwidth_hz = 100.0;
    const double gains[] = {3e-7};
    double prev = 0.0;
    for (double p : {0.1, 0.5, 1.0, 2.0, 5.0}) {
        const double s = sinr(ch, 1e-6, p, gains);
        CHECK(s > prev);
        prev = s;
    }
}

TEST_CASE("LED state error probability is the Gaussian tail") {
    CHECK(led_state_error_prob(0.0) == doctest::Approx(0.5));
    CHECK(led_state_error_prob(4.0) == doctest::Approx(0.02275013).epsilon(1e-5)); // Q(2)
    CHECK(led_state_error_prob(1e6) < 1e-12);
    double prev = 0.6;
    for (double s : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
        const double p = led_state_error_prob(s);
        CHECK(p < prev);
        CHECK(p <= 0.5);
        CHECK(p > 0.0);
        prev = p;
    }
}

TEST_CASE("S2-PSK BER law hand values") {
    CHECK(ber_s2psk(0.0, 1.0) == 0.0);
    CHECK(ber_s2psk(0.5, 1.0) == doctest::Approx(0.5));
    CHECK(ber_s2psk(0.1, 1.0) == doctest::Approx(0.18));
    CHECK_THROWS_AS(ber_s2psk(0.6, 2.0), std::domain_error);
}

TEST_CASE("Monte-Carlo BER matches the analytic law within 3 sigma") {
    std::mt19937_64 rng(40);
    const std::size_t n = 200000;
    for (double p_e : {0.01, 0.1, 0.3}) {
        std::vector<std::uint8_t> bits(n);
        for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
        const auto w = make_waveform(bits, 120.0, 30.0);
        const auto samples = transmit_and_sample(w, p_e, 30.0, n, rng);
        std::size_t errors = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (decode_frame(samples[i]) != bits[i]) ++errors;
        const double expected = ber_s2psk(p_e, 1.0);
        const double sigma = std::sqrt(expected * (1.0 - expected) / static_cast<double>(n));
        CHECK(std::abs(static_cast<double>(errors) / n - expected) < 3.0 * sigma);
    }
}

TEST_CASE("BER versus SINR is strictly decreasing") {
    double prev = 1.0;
    for (double db = -5.0; db <= 25.0; db += 0.5) {
        const double ber = ber_s2psk(led_state_error_prob(std::pow(10.0, db / 10.0)), 1.0);
        CHECK(ber < prev);
        prev = ber;
    }
}

TEST_CASE("packet headers are disjoint between beacon kinds") {
    CHECK(kStreetlightHeader != kVehicleHeader);
    BeaconId sl{BeaconKind::streetlight, 17, 7.0, 25.0, 0.0};
    BeaconId fv{BeaconKind::taillight, 17, 0.0, 0.0, 0.01};
    const auto sl_bits = pack_beacon_id(sl);
    const auto fv_bits = pack_beacon_id(fv);
    CHECK(std::vector<std::uint8_t>(sl_bits.begin(), sl_bits.begin() + 4) !=
          std::vector<std::uint8_t>(fv_bits.begin(), fv_bits.begin() + 4));
}

TEST_CASE("packet payloads are quantization round-trip stable") {
    BeaconId sl{BeaconKind::streetlight, 42, 7.03, 25.4, 0.0};
    const auto once = unpack_beacon_id(pack_beacon_id(sl));
    REQUIRE(once.has_value());
    CHECK(once->lamp_height_m == doctest::Approx(7.0)); // 0.1 m units
    CHECK(once->spacing_m == doctest::Approx(25.0));    // 1 m units
    const auto twice = unpack_beacon_id(pack_beacon_id(*once));
    REQUIRE(twice.has_value());
    CHECK(*twice == *once); // stable after the first quantization

    BeaconId fv{BeaconKind::taillight, 3000, 0.0, 0.0, 0.01013};
    const auto fv_once = unpack_beacon_id(pack_beacon_id(fv));
    REQUIRE(fv_once.has_value());
    CHECK(fv_once->panel_area_m2 == doctest::Approx(0.0101)); // cm^2 units
    CHECK(fv_once->id == 3000);
}

TEST_CASE("corrupt headers fail to unpack") {
    std::vector<std::uint8_t> bits(kPacketBits, 0);
    bits[0] = 1;
    bits[1] = 1; // header 1100 matches neither kind
    CHECK_FALSE(unpack_beacon_id(bits).has_value());
}

TEST_CASE("Manchester coding round-trips and flags violations") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<std::uint8_t> bits(32);
        for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
        const auto chips = manchester_encode(bits);
        REQUIRE(chips.size() == 64);
        const auto decoded = manchester_decode(chips);
        REQUIRE(decoded.has_value());
        CHECK(*decoded == bits);
        auto corrupted = chips;
        corrupted[10] = corrupted[11]; // break one pair
        CHECK_FALSE(manchester_decode(corrupted).has_value());
    }
}

TEST_CASE("trace CSV round-trips and reports format errors with line numbers") {
    std::vector<TraceRecord> records{{0.0, 7, 1, 1, 0}, {1.0 / 30.0, 7, 1, 0, 1},
                                     {2.0 / 30.0, 7, 0, 0, -1}};
    std::ostringstream out;
    write_trace_csv(out, records);
    std::istringstream in(out.str());
    const auto parsed = read_trace_csv(in);
    REQUIRE(parsed.size() == 3);
    CHECK(parsed[1].s1 == 1);
    CHECK(parsed[1].s2 == 0);
    CHECK(parsed[1].tx_chip == 1);
    CHECK(parsed[2].tx_chip == -1);

    std::istringstream bad("time_s,beacon_id,s1,s2,tx_chip\n0.0,7,1,2,\n");
    try {
        read_trace_csv(bad);
        FAIL("expected TraceFormatError");
    } catch (const TraceFormatError& e) {
        CHECK(e.line() == 2);
    }

    std::istringstream empty("");
    CHECK(read_trace_csv(empty).empty());
    std::istringstream header_only("time_s,beacon_id,s1,s2,tx_chip\n");
    CHECK(read_trace_csv(header_only).empty());
}

TEST_CASE("per-frame XOR demodulation of a short trace") {
    // the (1,1),(1,0),(0,0) stream reads 0,1,0
    const std::vector<TraceRecord> records{{0.0, 9, 1, 1, -1}, {0.1, 9, 1, 0, -1},
                                           {0.2, 9, 0, 0, -1}};
    std::vector<int> bits;
    for (const auto& r : records) bits.push_back(decode_frame({r.s1, r.s2, r.time_s}));
    CHECK(bits == std::vector<int>{0, 1, 0});
}
