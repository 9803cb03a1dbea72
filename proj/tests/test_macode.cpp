#include <doctest.h>

#include <bit>

#include "ncma/macode.hpp"
#include "ncma/rng.hpp"

using namespace ncma;

namespace {

// every size-l index subset of the first n packets, by bitmask walk
std::vector<std::vector<int>> subsets_of_size(int n, int l) {
    std::vector<std::vector<int>> out;
    for (int mask = 0; mask < (1 << n); ++mask) {
        if (std::popcount(unsigned(mask)) != l) continue;
        std::vector<int> idx;
        for (int i = 0; i < n; ++i)
            if (mask >> i & 1) idx.push_back(i);
        out.push_back(idx);
    }
    return out;
}

}  // namespace

TEST_CASE("gf256 arithmetic") {
    gf256::init_tables();
    CHECK(gf256::mul(0, 77) == 0);
    CHECK(gf256::mul(1, 77) == 77);
    CHECK(gf256::mul(0x80, 0x02) == 0x1D);  // x^8 reduces by 0x11D
    CHECK(gf256::mul(0x53, 0x02) == 0xA6);

    for (int a = 1; a < 256; ++a) CHECK(gf256::mul(uint8_t(a), gf256::inv(uint8_t(a))) == 1);

    auto rng = make_rng(31);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int t = 0; t < 200; ++t) {
        uint8_t a = uint8_t(byte(rng)), b = uint8_t(byte(rng)), c = uint8_t(byte(rng));
        CHECK(gf256::mul(a, b) == gf256::mul(b, a));
        CHECK(gf256::mul(a, gf256::mul(b, c)) == gf256::mul(gf256::mul(a, b), c));
        CHECK((gf256::mul(uint8_t(a ^ b), c)) == (gf256::mul(a, c) ^ gf256::mul(b, c)));
    }
}

TEST_CASE("any l of n packets reconstruct the message") {
    MacCodeSpec spec{3, 6, 16};
    auto rng = make_rng(32);
    Bits message = random_bits(size_t(spec.l) * spec.packet_bits, rng);
    auto packets = mac_encode(message, spec);
    REQUIRE(packets.size() == 6);

    auto subsets = subsets_of_size(6, 3);
    REQUIRE(subsets.size() == 20);
    for (const auto& idx : subsets) {
        std::vector<std::pair<int, Bits>> got;
        for (int i : idx) got.emplace_back(i, packets[i]);
        auto decoded = mac_decode(got, spec);
        REQUIRE(decoded.has_value());
        CHECK(*decoded == message);
    }
}

TEST_CASE("the code is systematic") {
    MacCodeSpec spec{4, 9, 24};
    auto rng = make_rng(33);
    Bits message = random_bits(size_t(spec.l) * spec.packet_bits, rng);
    auto packets = mac_encode(message, spec);
    for (int i = 0; i < spec.l; ++i) {
        Bits slice(message.begin() + size_t(i) * spec.packet_bits,
                   message.begin() + size_t(i + 1) * spec.packet_bits);
        CHECK(packets[i] == slice);
    }
}

TEST_CASE("parity-only subsets reconstruct too") {
    MacCodeSpec spec{3, 8, 16};
    auto rng = make_rng(34);
    Bits message = random_bits(size_t(spec.l) * spec.packet_bits, rng);
    auto packets = mac_encode(message, spec);

    auto decoded = mac_decode({{1, packets[1]}, {4, packets[4]}, {5, packets[5]}}, spec);
    REQUIRE(decoded.has_value());
    CHECK(*decoded == message);

    decoded = mac_decode({{5, packets[5]}, {6, packets[6]}, {7, packets[7]}}, spec);
    REQUIRE(decoded.has_value());
    CHECK(*decoded == message);
}

TEST_CASE("re-encoding reproduces every packet") {
    MacCodeSpec spec{5, 12, 16};
    auto rng = make_rng(35);
    Bits message = random_bits(size_t(spec.l) * spec.packet_bits, rng);
    auto packets = mac_encode(message, spec);
    for (int i = 0; i < spec.n_total; ++i) CHECK(mac_reencode(message, spec, i) == packets[i]);
}

TEST_CASE("degenerate shapes") {
    auto rng = make_rng(36);

    MacCodeSpec rep{1, 5, 16};
    Bits one = random_bits(16, rng);
    auto packets = mac_encode(one, rep);
    for (const auto& p : packets) CHECK(p == one);

    MacCodeSpec ident{4, 4, 8};
    Bits msg = random_bits(32, rng);
    auto id_packets = mac_encode(msg, ident);
    auto decoded = mac_decode({{0, id_packets[0]},
                               {1, id_packets[1]},
                               {2, id_packets[2]},
                               {3, id_packets[3]}},
                              ident);
    REQUIRE(decoded.has_value());
    CHECK(*decoded == msg);
}

TEST_CASE("byte positions encode independently") {
    MacCodeSpec spec{3, 6, 32};
    Bits message(size_t(spec.l) * spec.packet_bits, 0);
    for (int k = 0; k < 8; ++k) message[32 + 8 + k] = 1;  // packet 1, byte 1 = 0xFF
    auto packets = mac_encode(message, spec);
    for (size_t pi = 0; pi < packets.size(); ++pi)
        for (int byte = 0; byte < 4; ++byte) {
            bool nonzero = false;
            for (int k = 0; k < 8; ++k) nonzero |= packets[pi][size_t(byte) * 8 + k] != 0;
            if (byte != 1) {
                CHECK_FALSE(nonzero);  // no other byte position may bleed over
            } else {
                // the systematic copy and every parity packet see the byte; the
                // other systematic packets copy zeros (MDS keeps parity
                // coefficients nonzero, so all of 3..5 must light up)
                CHECK(nonzero == (pi == 1 || pi >= 3));
            }
        }
}

TEST_CASE("insufficient or malformed inputs") {
    MacCodeSpec spec{3, 6, 16};
    auto rng = make_rng(37);
    Bits message = random_bits(48, rng);
    auto packets = mac_encode(message, spec);

    CHECK_FALSE(mac_decode({{0, packets[0]}, {1, packets[1]}}, spec).has_value());
    CHECK_FALSE(mac_decode({}, spec).has_value());
    CHECK_THROWS_AS(mac_decode({{0, packets[0]}, {0, packets[0]}, {1, packets[1]}}, spec),
                    std::invalid_argument);
    CHECK_THROWS_AS(mac_decode({{0, Bits(8, 0)}, {1, packets[1]}, {2, packets[2]}}, spec),
                    std::invalid_argument);
    CHECK_THROWS_AS(mac_decode({{7, packets[0]}, {1, packets[1]}, {2, packets[2]}}, spec),
                    std::invalid_argument);

    CHECK_THROWS_AS((MacCodeSpec{0, 6, 16}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((MacCodeSpec{3, 2, 16}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((MacCodeSpec{3, 6, 12}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((MacCodeSpec{3, 500, 16}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(mac_encode(Bits(20, 0), spec), std::invalid_argument);
}
