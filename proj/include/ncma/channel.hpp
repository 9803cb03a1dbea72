#pragma once

#include <array>

#include "ncma/modem.hpp"

namespace ncma {

inline constexpr int kMaxUsers = 3;
inline constexpr int kAntennas = 2;

enum class Fading { RayleighBlock, UnitMagnitudeRandomPhase };

struct UserChannelSpec {
    int user = 0;
    double snr_db = 0.0;
};

// Block-constant per-slot gains, one per (user, antenna).  Gains are drawn
// so that E|h|^2 = snr_linear * sigma2 against unit-power transmit symbols.
struct ChannelRealization {
    int n_users = 0;
    double sigma2 = 1.0;
    std::array<std::array<cplx, kAntennas>, kMaxUsers> gain{};
};

ChannelRealization draw_channel(const std::vector<UserChannelSpec>& users, Fading fading,
                                double sigma2, uint64_t seed);

struct TxBlock {
    int user = 0;
    Mod mod = Mod::Bpsk;
    CVec symbols;  // unnormalized constellation points
};

struct SlotObservation {
    std::array<CVec, kAntennas> y;
    // gain folded with the per-scheme power normalization; what a coherent
    // receiver multiplies candidate symbols by
    std::array<std::array<cplx, kAntennas>, kMaxUsers> eff_gain{};
    int n_users = 0;
    int n_symbols = 0;
    double sigma2 = 1.0;
    ChannelRealization realization;
};

// Superimposes all blocks (which must share one length) through the
// realization and adds circular AWGN of variance sigma2 per antenna sample.
SlotObservation transmit_slot(const std::vector<TxBlock>& blocks, const ChannelRealization& ch,
                              uint64_t seed);

}  // namespace ncma
