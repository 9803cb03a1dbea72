#pragma once

#include <map>

#include "ncma/detect.hpp"
#include "ncma/macode.hpp"

namespace ncma {

struct PhyBridgeResult {
    std::vector<std::pair<int, Bits>> natives;  // (stream index, content)
    std::vector<DecodedEquation> residual;      // reduced rows of weight >= 2
};

// GF(2) elimination of a slot's decoded equations over its stream basis.
// All equations are CRC-validated truths about the same transmission, so a
// zero label with nonzero content means a decoder-bank bug; that throws.
PhyBridgeResult phy_bridge(std::vector<DecodedEquation> eqs, int n_streams);

// What a slot's stream carried: n_packets consecutive packets of one user's
// message, starting at first_index.
struct StreamBinding {
    int user = 0;
    uint64_t message = 0;
    uint32_t first_index = 0;
    int n_packets = 1;
};

struct MessageState {
    std::map<uint32_t, Bits> natives;  // packet index -> content
    bool recovered = false;
    bool closed = false;  // transmitter moved on (recovered or window spent)
    Bits payload;
};

struct MacLedger {
    int n_users = 3;
    std::array<MacCodeSpec, kMaxUsers> spec{};
    std::array<std::map<uint64_t, MessageState>, kMaxUsers> messages;
    std::array<uint64_t, kMaxUsers> recovered_count{};

    struct ResidualSlot {
        std::vector<StreamBinding> streams;
        std::vector<DecodedEquation> eqs;
    };
    std::vector<ResidualSlot> residuals;

    MessageState& state(int user, uint64_t message) { return messages[user][message]; }
    bool is_recovered(int user, uint64_t message) const;
    // Integrity-checked: re-adding an index with different content throws.
    void add_native(int user, uint64_t message, uint32_t index, Bits bits);
};

enum class Stage { Mud, Phy, Mac };

// Folds one slot's equations into the ledger: eliminates, splits natives
// into normalized packets per the binding, and (Mac stage only) keeps the
// leftover equations for later substitution.
void ledger_add_slot(MacLedger& ledger, const std::vector<DecodedEquation>& eqs,
                     const std::vector<StreamBinding>& binding, Stage stage);

// Erasure-decode every open message with enough natives.  Returns the number
// of messages newly recovered.
int rs_sweep(MacLedger& ledger);

// Fixed point of { erasure decode, re-encode recovered streams, substitute
// into stored equations, eliminate }.  Monotone: state only grows, so the
// iteration terminates; the result does not depend on visit order.
int mac_bridge(MacLedger& ledger);

// Decode bank -> bridging -> erasure decoding for one observed slot.
struct SlotPipelineStats {
    int equations = 0;
    int natives = 0;
    int recovered = 0;
};
SlotPipelineStats run_slot_pipeline(const SlotObservation& obs, const SlotProfile& prof,
                                    const std::vector<StreamBinding>& binding, Stage stage,
                                    MacLedger& ledger, const DetectOptions& opt = {});

}  // namespace ncma
