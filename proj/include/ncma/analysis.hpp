#pragma once

#include <array>

#include "ncma/channel.hpp"

namespace ncma {

// Fractional sum-rate gain of letting two equal-power users share the slot
// versus giving it to one of them:
//   (log(1 + 2P) - log(1 + P)) / log(1 + P).
// Monotone decreasing in P: ~1 as P -> 0, ~0.075 at 40 dB, ~0.30 at 8.5 dB.
double rate_gain(double power_linear);

// SINR of the first user a canceling receiver decodes when two equal-power
// users overlap: P / (P + sigma2).  Always below 1 (0 dB).
double sic_first_user_sinr(double power_linear, double sigma2 = 1.0);

struct ThroughputRecord {
    double th_a = 0.0;
    double th_b = 0.0;
    double th_c = 0.0;
    double th_sys = 0.0;
};

// Th_s = l_s * messages_s / n_slots, in normalized packets per slot.
ThroughputRecord tally_throughput(const std::array<uint64_t, kMaxUsers>& messages,
                                  const std::array<int, kMaxUsers>& l, int n_slots);

}  // namespace ncma
