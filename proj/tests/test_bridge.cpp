#include <doctest.h>

#include <algorithm>
#include <array>
#include <bit>
#include <map>

#include "ncma/bridge.hpp"
#include "ncma/rng.hpp"

using namespace ncma;

namespace {

// Reference for phy_bridge: close the supplied equations under XOR and read
// off which unit labels appear.  Exponential in spirit but tiny label spaces
// keep it exact.
std::map<uint8_t, Bits> xor_span(const std::vector<DecodedEquation>& eqs) {
    std::map<uint8_t, Bits> span;
    for (const auto& eq : eqs) {
        if (span.count(eq.label)) continue;
        std::map<uint8_t, Bits> grown = span;
        grown[eq.label] = eq.mac;
        for (const auto& [lbl, bits] : span) {
            uint8_t combined = lbl ^ eq.label;
            if (combined && !grown.count(combined)) grown[combined] = xor_bits(bits, eq.mac);
        }
        span = std::move(grown);
        // closure: keep folding until no new label appears
        bool changed = true;
        while (changed) {
            changed = false;
            for (const auto& [l1, b1] : span) {
                for (const auto& [l2, b2] : span) {
                    uint8_t c = l1 ^ l2;
                    if (c && !span.count(c)) {
                        span[c] = xor_bits(b1, b2);
                        changed = true;
                        break;
                    }
                }
                if (changed) break;
            }
        }
    }
    return span;
}

std::vector<std::pair<int, Bits>> span_natives(const std::map<uint8_t, Bits>& span,
                                               int n_streams) {
    std::vector<std::pair<int, Bits>> out;
    for (int s = 0; s < n_streams; ++s) {
        auto it = span.find(uint8_t(1u << s));
        if (it != span.end()) out.emplace_back(s, it->second);
    }
    return out;
}

int label_rank(std::vector<uint8_t> labels) {
    int rank = 0;
    for (int bit = 0; bit < 8; ++bit) {
        auto it = std::find_if(labels.begin(), labels.end(),
                               [&](uint8_t l) { return l >> bit & 1; });
        if (it == labels.end()) continue;
        uint8_t pivot = *it;
        labels.erase(it);
        for (auto& l : labels)
            if (l >> bit & 1) l ^= pivot;
        rank++;
    }
    return rank;
}

}  // namespace

TEST_CASE("phy_bridge matches the XOR-span reference on random slots") {
    auto rng = make_rng(51);
    std::uniform_int_distribution<int> n_eqs(0, 6);
    std::uniform_int_distribution<int> label(1, 15);

    std::vector<Bits> stream_bits(4);
    for (auto& b : stream_bits) b = random_bits(24, rng);

    for (int trial = 0; trial < 500; ++trial) {
        std::vector<DecodedEquation> eqs;
        int count = n_eqs(rng);
        for (int e = 0; e < count; ++e) {
            uint8_t lbl = uint8_t(label(rng));
            Bits content(24, 0);
            for (int s = 0; s < 4; ++s)
                if (lbl >> s & 1) xor_into(content, stream_bits[size_t(s)]);
            eqs.push_back({lbl, std::move(content)});
        }

        auto res = phy_bridge(eqs, 4);
        auto expect = span_natives(xor_span(eqs), 4);
        CHECK(res.natives == expect);
        for (const auto& [s, bits] : res.natives) CHECK(bits == stream_bits[size_t(s)]);

        // the residual plus the natives must span exactly what the input did
        std::vector<uint8_t> in_labels, out_labels;
        for (const auto& eq : eqs) in_labels.push_back(eq.label);
        for (const auto& eq : res.residual) {
            CHECK(std::popcount(eq.label) >= 2);
            out_labels.push_back(eq.label);
        }
        for (const auto& [s, bits] : res.natives) out_labels.push_back(uint8_t(1u << s));
        CHECK(label_rank(in_labels) == int(out_labels.size()));
        CHECK(label_rank(out_labels) == int(out_labels.size()));
    }
}

TEST_CASE("phy_bridge rejects malformed inputs") {
    CHECK_THROWS_AS(phy_bridge({{uint8_t(8), Bits(8, 0)}}, 3), std::invalid_argument);
    CHECK_THROWS_AS(phy_bridge({}, 0), std::invalid_argument);

    // two derivations of one label that disagree
    Bits a(8, 0), b(8, 1);
    CHECK_THROWS_AS(phy_bridge({{uint8_t(3), a}, {uint8_t(3), b}}, 2), std::logic_error);
    CHECK_THROWS_AS(
        phy_bridge({{uint8_t(1), a}, {uint8_t(2), a}, {uint8_t(3), b}}, 2),
        std::logic_error);
}

TEST_CASE("redundant consistent equations are dropped silently") {
    auto rng = make_rng(52);
    Bits a = random_bits(16, rng), b = random_bits(16, rng);
    auto res = phy_bridge(
        {{uint8_t(1), a}, {uint8_t(2), b}, {uint8_t(3), xor_bits(a, b)}}, 2);
    CHECK(res.natives.size() == 2);
    CHECK(res.residual.empty());
}

TEST_CASE("two PNC equations resolve the third user") {
    auto rng = make_rng(53);
    Bits a = random_bits(16, rng), b = random_bits(16, rng), c = random_bits(16, rng);
    Bits ab = xor_bits(a, b);
    Bits abc = xor_bits(ab, c);

    auto res = phy_bridge({{uint8_t(3), ab}, {uint8_t(7), abc}}, 3);
    REQUIRE(res.natives.size() == 1);
    CHECK(res.natives[0].first == 2);
    CHECK(res.natives[0].second == c);
    REQUIRE(res.residual.size() == 1);
    CHECK(res.residual[0].label == 3);

    // a native next to an unresolvable XOR stays unresolved
    auto partial = phy_bridge({{uint8_t(2), b}, {uint8_t(7), abc}}, 3);
    REQUIRE(partial.natives.size() == 1);
    CHECK(partial.natives[0].first == 1);
    REQUIRE(partial.residual.size() == 1);
    CHECK(partial.residual[0].label == 5);
    CHECK(partial.residual[0].mac == xor_bits(a, c));
}

namespace {

struct TwoUserReplay {
    MacLedger ledger;
    MacCodeSpec spec{3, 6, 16};
    std::vector<Bits> pkts_a, pkts_b;
    Bits msg_a, msg_b;

    TwoUserReplay() {
        auto rng = make_rng(54);
        msg_a = random_bits(size_t(spec.l) * spec.packet_bits, rng);
        msg_b = random_bits(size_t(spec.l) * spec.packet_bits, rng);
        pkts_a = mac_encode(msg_a, spec);
        pkts_b = mac_encode(msg_b, spec);
        ledger.n_users = 2;
        ledger.spec[0] = spec;
        ledger.spec[1] = spec;
    }

    void slot(int index, bool native_a, bool native_b, bool pnc) {
        std::vector<DecodedEquation> eqs;
        if (native_a) eqs.push_back({uint8_t(1), pkts_a[size_t(index)]});
        if (native_b) eqs.push_back({uint8_t(2), pkts_b[size_t(index)]});
        if (pnc)
            eqs.push_back({uint8_t(3), xor_bits(pkts_a[size_t(index)], pkts_b[size_t(index)])});
        std::vector<StreamBinding> binding = {{0, 0, uint32_t(index), 1},
                                              {1, 0, uint32_t(index), 1}};
        ledger_add_slot(ledger, eqs, binding, Stage::Mac);
    }
};

}  // namespace

TEST_CASE("two-user five-slot replay recovers A, bridges, then recovers B") {
    TwoUserReplay r;

    r.slot(0, true, false, false);   // native A only
    r.slot(1, false, false, true);   // lone XOR equation
    r.slot(2, false, true, false);   // native B only
    r.slot(3, true, false, true);    // native A plus XOR
    CHECK(mac_bridge(r.ledger) == 0);
    CHECK_FALSE(r.ledger.is_recovered(0, 0));
    CHECK_FALSE(r.ledger.is_recovered(1, 0));
    // slot 4's XOR already resolved B's packet at the PHY layer
    CHECK(r.ledger.state(1, 0).natives.count(3) == 1);
    CHECK(r.ledger.state(1, 0).natives.size() == 2);  // indices 2 and 3
    REQUIRE(r.ledger.residuals.size() == 1);          // slot 2 keeps its lone equation

    r.slot(4, true, false, false);   // third native for A

    // the RS sweep alone recovers A; the lone equation then yields B
    CHECK(rs_sweep(r.ledger) == 1);
    CHECK(r.ledger.is_recovered(0, 0));
    CHECK(r.ledger.state(0, 0).payload == r.msg_a);
    CHECK_FALSE(r.ledger.is_recovered(1, 0));

    CHECK(mac_bridge(r.ledger) == 1);
    CHECK(r.ledger.is_recovered(1, 0));
    CHECK(r.ledger.state(1, 0).payload == r.msg_b);
    CHECK(r.ledger.residuals.empty());
    CHECK(r.ledger.recovered_count[0] == 1);
    CHECK(r.ledger.recovered_count[1] == 1);
}

TEST_CASE("ledger state is independent of slot arrival order") {
    std::vector<std::array<bool, 3>> pattern = {
        {true, false, false}, {false, false, true}, {false, true, false},
        {true, false, true},  {true, false, false},
    };
    std::vector<int> order = {4, 2, 0, 3, 1};

    TwoUserReplay r;
    for (int i : order) r.slot(i, pattern[size_t(i)][0], pattern[size_t(i)][1],
                               pattern[size_t(i)][2]);
    mac_bridge(r.ledger);
    CHECK(r.ledger.is_recovered(0, 0));
    CHECK(r.ledger.is_recovered(1, 0));
    CHECK(r.ledger.state(1, 0).payload == r.msg_b);
}

TEST_CASE("recovered messages reopen nothing and conflicting natives throw") {
    TwoUserReplay r;
    for (int i = 0; i < 3; ++i) r.slot(i, true, false, false);
    CHECK(rs_sweep(r.ledger) == 1);
    CHECK(r.ledger.is_recovered(0, 0));

    // more of the same message is ignored once recovered
    r.slot(3, true, false, false);
    CHECK(r.ledger.state(0, 0).natives.empty());

    MacLedger fresh;
    fresh.n_users = 1;
    fresh.spec[0] = {3, 6, 16};
    fresh.add_native(0, 0, 2, Bits(16, 0));
    CHECK_THROWS_AS(fresh.add_native(0, 0, 2, Bits(16, 1)), std::logic_error);
}

TEST_CASE("mac bridging feeds back until nothing new resolves") {
    // A's message recovers; substituting its re-encoded packets into stored
    // slots must cascade into B's recovery and drop the spent residuals
    MacCodeSpec spec{2, 4, 16};
    auto rng = make_rng(55);
    Bits msg_a = random_bits(32, rng), msg_b = random_bits(32, rng);
    auto pa = mac_encode(msg_a, spec);
    auto pb = mac_encode(msg_b, spec);

    MacLedger ledger;
    ledger.n_users = 2;
    ledger.spec[0] = spec;
    ledger.spec[1] = spec;

    auto xor_slot = [&](int idx) {
        std::vector<DecodedEquation> eqs = {
            {uint8_t(3), xor_bits(pa[size_t(idx)], pb[size_t(idx)])}};
        std::vector<StreamBinding> binding = {{0, 0, uint32_t(idx), 1},
                                              {1, 0, uint32_t(idx), 1}};
        ledger_add_slot(ledger, eqs, binding, Stage::Mac);
    };

    xor_slot(0);
    xor_slot(1);
    CHECK(mac_bridge(ledger) == 0);
    CHECK(ledger.residuals.size() == 2);

    // hand A its message through another pair of slots
    std::vector<StreamBinding> b2 = {{0, 0, 2, 1}, {1, 0, 2, 1}};
    ledger_add_slot(ledger, {{uint8_t(1), pa[2]}}, b2, Stage::Mac);
    std::vector<StreamBinding> b3 = {{0, 0, 3, 1}, {1, 0, 3, 1}};
    ledger_add_slot(ledger, {{uint8_t(1), pa[3]}}, b3, Stage::Mac);

    CHECK(mac_bridge(ledger) == 2);
    CHECK(ledger.is_recovered(0, 0));
    CHECK(ledger.is_recovered(1, 0));
    CHECK(ledger.state(1, 0).payload == msg_b);
    CHECK(ledger.residuals.empty());
}

TEST_CASE("phy stage refuses to bank residuals") {
    TwoUserReplay r;
    std::vector<DecodedEquation> eqs = {
        {uint8_t(3), xor_bits(r.pkts_a[0], r.pkts_b[0])}};
    std::vector<StreamBinding> binding = {{0, 0, 0, 1}, {1, 0, 0, 1}};
    ledger_add_slot(r.ledger, eqs, binding, Stage::Phy);
    CHECK(r.ledger.residuals.empty());
    ledger_add_slot(r.ledger, eqs, binding, Stage::Mud);
    CHECK(r.ledger.residuals.empty());
    ledger_add_slot(r.ledger, eqs, binding, Stage::Mac);
    CHECK(r.ledger.residuals.size() == 1);
}
