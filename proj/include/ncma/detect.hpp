#pragma once

#include <string>

#include "ncma/channel.hpp"
#include "ncma/crc.hpp"
#include "ncma/fec.hpp"

namespace ncma {

// A slot-level multiple-access layout: three users, each BPSK or QPSK, and
// the bank of decoders the receiver schedules against the joint
// constellation.  Equations are indexed over per-slot bit streams:
//
//   bpsk3   streams A, B, C          7 decoders (3 native + 4 XOR)
//   qpsk3   streams A, B, C          7 decoders, two coded bits per symbol
//   dr2b1q  streams A, B, C          4 decoders (A, B, A^B, whole-QPSK C)
//   sr2b1q  streams A, B, C_I, C_Q   11 decoders (I/Q rails of C split;
//                                    labels mixing C_I with C_Q excluded)
enum class SlotProfileKind { Bpsk3, Qpsk3, Dr2b1q, Sr2b1q };

struct StreamDesc {
    int user = 0;
    std::string name;
    int lane = 0;       // 0 = I rail, 1 = Q rail, -1 = both (full QPSK)
    int mac_packets = 1;  // normalized packets this stream carries per slot
    int mac_bits = 0;     // equation content bits (packets * packet_bits)
    int pad_bits = 0;     // zero fill after the CRC, discarded at decode

    int payload_bits() const { return mac_bits + kCrcBits + pad_bits; }
    int codeword_bits() const { return 2 * (payload_bits() + ConvCode::memory); }
};

struct TapRef {
    int user = 0;
    int lane = 0;  // 0 = Re, 1 = Im
};

struct DecoderSpec {
    uint8_t label = 0;  // bitmask over the profile's streams
    int weight = 0;
    // Coded bits cycle through the groups; one group per coded bit for rail
    // streams, I/Q pair for whole-QPSK streams.
    std::vector<std::vector<TapRef>> groups;
    int payload_bits = 0;
    int codeword_bits = 0;
    int mac_bits = 0;
    int pad_bits = 0;
    std::string name;
};

struct JointPoint {
    std::array<cplx, kMaxUsers> x{};
};

struct SlotProfile {
    SlotProfileKind kind = SlotProfileKind::Bpsk3;
    int packet_bits = 0;
    int n_users = 3;
    std::array<Mod, kMaxUsers> mods{};
    std::vector<StreamDesc> streams;
    std::vector<DecoderSpec> decoders;
    std::vector<JointPoint> points;
    // chi[d][g][p]: +-1 target carried by point p for decoder d, group g
    std::vector<std::vector<std::vector<int8_t>>> chi;
    int n_symbols = 0;

    const StreamDesc& stream(int i) const { return streams[size_t(i)]; }
    std::vector<int> user_streams(int user) const;
    std::string label_name(uint8_t mask) const;
};

SlotProfile make_slot_profile(SlotProfileKind kind, int packet_bits);

// --- transmit-side framing -------------------------------------------------

// mac || crc32(mac) || zero pad
Bits frame_payload(const Bits& mac_bits, int pad_bits);

// packets: one Bits of packet_bits per normalized packet the user sends this
// slot (1 for BPSK, 2 for QPSK users).
TxBlock make_tx_block(const SlotProfile& prof, int user, const std::vector<Bits>& packets);

// --- receive side ----------------------------------------------------------

struct DecodedEquation {
    uint8_t label = 0;
    Bits mac;  // CRC-validated content at stream granularity
};

struct DetectOptions {
    double llr_clip = 50.0;
    bool mud_only = false;  // schedule only the weight-1 labels
};

// Log-max joint LLR for one coded bit of one scheduled decoder:
//   llr = min_{x in chi(-1)} sum_ant |y - sum_s g_s x_s|^2  -  min_{x in chi(+1)} (same)
// Positive favors coded bit 0.
double joint_llr(const SlotObservation& obs, const SlotProfile& prof, int decoder,
                 int bit_position);

LlrVec llr_codeword(const SlotObservation& obs, const SlotProfile& prof, int decoder);

// Runs every scheduled decoder and keeps the CRC-clean results.
std::vector<DecodedEquation> run_decoder_bank(const SlotObservation& obs,
                                              const SlotProfile& prof,
                                              const DetectOptions& opt = {});

// --- successive interference cancellation baseline --------------------------

struct SicResult {
    // (stream index, mac bits) in decode order
    std::vector<std::pair<int, Bits>> decoded;
    int failed_user = -1;  // first user whose CRC failed, -1 if none
};

// Decodes users one at a time in the given order, treating the not-yet
// decoded users as Gaussian noise of matching power, subtracting each
// success; stops at the first failure.  BPSK profiles only.
SicResult sic_decode(const SlotObservation& obs, const SlotProfile& prof,
                     const std::vector<int>& order, const DetectOptions& opt = {});

}  // namespace ncma
