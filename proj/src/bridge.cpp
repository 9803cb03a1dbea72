#include "ncma/bridge.hpp"

#include <algorithm>
#include <bit>

namespace ncma {

PhyBridgeResult phy_bridge(std::vector<DecodedEquation> eqs, int n_streams) {
    if (n_streams < 1 || n_streams > 8)
        throw std::invalid_argument("phy_bridge: stream count out of range");

    // row-reduce; pivot on the lowest set stream bit
    std::vector<DecodedEquation> rows;
    for (auto& eq : eqs) {
        uint8_t label = eq.label;
        Bits bits = std::move(eq.mac);
        if (label >> n_streams)
            throw std::invalid_argument("phy_bridge: label references unknown stream");
        for (const auto& r : rows) {
            uint8_t pivot = r.label & uint8_t(-r.label);
            if (label & pivot) {
                label ^= r.label;
                if (bits.size() != r.mac.size())
                    throw std::logic_error("phy_bridge: combined streams of unequal size");
                xor_into(bits, r.mac);
            }
        }
        if (label == 0) {
            if (std::any_of(bits.begin(), bits.end(), [](uint8_t b) { return b != 0; }))
                throw std::logic_error("phy_bridge: inconsistent derivations of one label");
            continue;  // redundant equation
        }
        // back-substitute the new pivot into earlier rows
        uint8_t pivot = label & uint8_t(-label);
        for (auto& r : rows) {
            if (r.label & pivot) {
                r.label ^= label;
                xor_into(r.mac, bits);
            }
        }
        rows.push_back({label, std::move(bits)});
    }

    PhyBridgeResult res;
    for (auto& r : rows) {
        if (std::popcount(r.label) == 1)
            res.natives.emplace_back(std::countr_zero(r.label), std::move(r.mac));
        else
            res.residual.push_back(std::move(r));
    }
    std::sort(res.natives.begin(), res.natives.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return res;
}

bool MacLedger::is_recovered(int user, uint64_t message) const {
    auto it = messages[user].find(message);
    return it != messages[user].end() && it->second.recovered;
}

void MacLedger::add_native(int user, uint64_t message, uint32_t index, Bits bits) {
    MessageState& st = messages[user][message];
    if (st.recovered) return;
    auto it = st.natives.find(index);
    if (it != st.natives.end()) {
        if (it->second != bits)
            throw std::logic_error("MacLedger: conflicting contents for one packet");
        return;
    }
    st.natives.emplace(index, std::move(bits));
}

namespace {

// split a stream's content into its normalized packets and file them
void file_native(MacLedger& ledger, const StreamBinding& bind, const Bits& content,
                 int packet_bits) {
    if (static_cast<int>(content.size()) != bind.n_packets * packet_bits)
        throw std::logic_error("ledger: native content does not match binding");
    for (int p = 0; p < bind.n_packets; ++p) {
        Bits pkt(content.begin() + size_t(p) * packet_bits,
                 content.begin() + size_t(p + 1) * packet_bits);
        ledger.add_native(bind.user, bind.message, bind.first_index + p, std::move(pkt));
    }
}

// the stream content a recovered message implies for one binding
Bits reencode_stream(const MacLedger& ledger, const StreamBinding& bind) {
    const auto& st = ledger.messages[bind.user].at(bind.message);
    const auto& spec = ledger.spec[bind.user];
    Bits content;
    content.reserve(size_t(bind.n_packets) * spec.packet_bits);
    for (int p = 0; p < bind.n_packets; ++p) {
        Bits pkt = mac_reencode(st.payload, spec, static_cast<int>(bind.first_index) + p);
        content.insert(content.end(), pkt.begin(), pkt.end());
    }
    return content;
}

}  // namespace

void ledger_add_slot(MacLedger& ledger, const std::vector<DecodedEquation>& eqs,
                     const std::vector<StreamBinding>& binding, Stage stage) {
    auto reduced = phy_bridge(eqs, static_cast<int>(binding.size()));
    for (auto& [stream, content] : reduced.natives)
        file_native(ledger, binding.at(stream), content, ledger.spec[binding[stream].user].packet_bits);
    if (stage == Stage::Mac && !reduced.residual.empty())
        ledger.residuals.push_back({binding, std::move(reduced.residual)});
}

int rs_sweep(MacLedger& ledger) {
    int recovered = 0;
    for (int u = 0; u < ledger.n_users; ++u) {
        for (auto& [msg, st] : ledger.messages[u]) {
            if (st.recovered || static_cast<int>(st.natives.size()) < ledger.spec[u].l) continue;
            std::vector<std::pair<int, Bits>> packets;
            packets.reserve(st.natives.size());
            for (const auto& [idx, bits] : st.natives)
                packets.emplace_back(static_cast<int>(idx), bits);
            auto payload = mac_decode(packets, ledger.spec[u]);
            if (!payload) continue;
            st.payload = std::move(*payload);
            st.recovered = true;
            st.closed = true;
            st.natives.clear();
            ledger.recovered_count[u]++;
            recovered++;
        }
    }
    return recovered;
}

int mac_bridge(MacLedger& ledger) {
    int recovered = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        int got = rs_sweep(ledger);
        recovered += got;
        if (got > 0) changed = true;

        for (auto& slot : ledger.residuals) {
            bool touched = false;
            for (auto& eq : slot.eqs) {
                for (size_t s = 0; s < slot.streams.size(); ++s) {
                    if (!(eq.label >> s & 1)) continue;
                    const auto& bind = slot.streams[s];
                    if (!ledger.is_recovered(bind.user, bind.message)) continue;
                    xor_into(eq.mac, reencode_stream(ledger, bind));
                    eq.label &= static_cast<uint8_t>(~(1u << s));
                    touched = true;
                }
            }
            if (!touched) continue;
            auto reduced = phy_bridge(std::move(slot.eqs), static_cast<int>(slot.streams.size()));
            for (auto& [stream, content] : reduced.natives) {
                file_native(ledger, slot.streams.at(stream), content,
                            ledger.spec[slot.streams[stream].user].packet_bits);
                changed = true;
            }
            slot.eqs = std::move(reduced.residual);
        }

        std::erase_if(ledger.residuals, [](const MacLedger::ResidualSlot& s) { return s.eqs.empty(); });
    }
    return recovered;
}

SlotPipelineStats run_slot_pipeline(const SlotObservation& obs, const SlotProfile& prof,
                                    const std::vector<StreamBinding>& binding, Stage stage,
                                    MacLedger& ledger, const DetectOptions& opt) {
    DetectOptions dopt = opt;
    dopt.mud_only = (stage == Stage::Mud);
    auto eqs = run_decoder_bank(obs, prof, dopt);

    SlotPipelineStats stats;
    stats.equations = static_cast<int>(eqs.size());
    size_t natives_before = 0;
    for (int u = 0; u < ledger.n_users; ++u)
        for (const auto& [msg, st] : ledger.messages[u]) natives_before += st.natives.size();

    ledger_add_slot(ledger, eqs, binding, stage);

    size_t natives_after = 0;
    for (int u = 0; u < ledger.n_users; ++u)
        for (const auto& [msg, st] : ledger.messages[u]) natives_after += st.natives.size();
    stats.natives = static_cast<int>(natives_after - natives_before);

    stats.recovered = (stage == Stage::Mac) ? mac_bridge(ledger) : rs_sweep(ledger);
    return stats;
}

}  // namespace ncma
