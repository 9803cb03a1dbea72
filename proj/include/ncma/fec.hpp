#pragma once

#include "ncma/bits.hpp"

namespace ncma {

// Rate-1/2 convolutional code, constraint length 7, generators 133/171
// (octal), zero-tail terminated.  Output interleaves the two generator
// streams as a,b,a,b,...  Free distance 10.
struct ConvCode {
    static constexpr int constraint_length = 7;
    static constexpr int memory = 6;
    static constexpr int n_states = 64;
    static constexpr unsigned gen_a = 0133;
    static constexpr unsigned gen_b = 0171;
};

// payload of any length -> 2*(payload.size() + 6) coded bits.
Bits conv_encode(const Bits& payload);

struct ViterbiOptions {
    // Per-bit LLRs are saturated to +-llr_clip before entering the path
    // metrics; keeps metrics bounded at high SNR without changing decisions.
    double llr_clip = 50.0;
};

// Soft-decision ML decode of a terminated codeword.  LLR sign convention:
// positive favors bit 0.  llr.size() must be even and cover at least the
// tail; returns llr.size()/2 - 6 payload bits.
Bits viterbi_decode(const LlrVec& llr, const ViterbiOptions& opt = {});

}  // namespace ncma
