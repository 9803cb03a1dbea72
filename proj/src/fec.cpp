#include "ncma/fec.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>

namespace ncma {

namespace {

// 7-bit window w = (u[n] u[n-1] ... u[n-6]), u[n] in bit 6.  The generator
// masks line up with that layout, so each output bit is a popcount parity.
inline uint8_t out_pair(unsigned window) {
    unsigned a = std::popcount(window & ConvCode::gen_a) & 1u;
    unsigned b = std::popcount(window & ConvCode::gen_b) & 1u;
    return static_cast<uint8_t>((a << 1) | b);
}

struct Trellis {
    // next[state][input] and the (a,b) pair emitted on that edge
    std::array<std::array<uint8_t, 2>, 64> next;
    std::array<std::array<uint8_t, 2>, 64> out;
    Trellis() {
        for (unsigned s = 0; s < 64; ++s) {
            for (unsigned in = 0; in < 2; ++in) {
                unsigned w = (in << 6) | s;
                next[s][in] = static_cast<uint8_t>(w >> 1);
                out[s][in] = out_pair(w);
            }
        }
    }
};

const Trellis& trellis() {
    static const Trellis t;
    return t;
}

}  // namespace

Bits conv_encode(const Bits& payload) {
    const Trellis& t = trellis();
    Bits coded;
    coded.reserve(2 * (payload.size() + ConvCode::memory));
    unsigned state = 0;
    auto push = [&](unsigned in) {
        uint8_t o = t.out[state][in];
        coded.push_back((o >> 1) & 1);
        coded.push_back(o & 1);
        state = t.next[state][in];
    };
    for (uint8_t u : payload) push(u & 1);
    for (int i = 0; i < ConvCode::memory; ++i) push(0);
    return coded;
}

Bits viterbi_decode(const LlrVec& llr, const ViterbiOptions& opt) {
    if (llr.size() % 2 != 0)
        throw std::invalid_argument("viterbi_decode: odd number of coded bits");
    const size_t steps = llr.size() / 2;
    if (steps < ConvCode::memory)
        throw std::invalid_argument("viterbi_decode: codeword shorter than the tail");

    const Trellis& t = trellis();
    constexpr double kNoPath = -std::numeric_limits<double>::infinity();

    std::array<double, 64> metric;
    metric.fill(kNoPath);
    metric[0] = 0.0;  // terminated code starts from the zero state

    // survivor[k] holds one bit per state: which predecessor won at step k
    std::vector<uint64_t> survivor(steps, 0);
    std::array<double, 64> next_metric;

    for (size_t k = 0; k < steps; ++k) {
        double la = llr[2 * k];
        double lb = llr[2 * k + 1];
        la = std::clamp(la, -opt.llr_clip, opt.llr_clip);
        lb = std::clamp(lb, -opt.llr_clip, opt.llr_clip);
        // score of hypothesized coded pair (a,b): +l for bit 0, -l for bit 1
        const std::array<double, 4> pair_score = {
            la + lb,   // a=0 b=0
            la - lb,   // a=0 b=1
            -la + lb,  // a=1 b=0
            -la - lb,  // a=1 b=1
        };
        uint64_t surv = 0;
        for (unsigned s = 0; s < 64; ++s) {
            // predecessors differ only in the oldest register bit
            unsigned p0 = (s & 31u) << 1;
            unsigned p1 = p0 | 1u;
            unsigned in = s >> 5;  // input bit consumed on both edges
            double m0 = metric[p0] == kNoPath ? kNoPath : metric[p0] + pair_score[t.out[p0][in]];
            double m1 = metric[p1] == kNoPath ? kNoPath : metric[p1] + pair_score[t.out[p1][in]];
            // ties keep p0: the merged histories first differ in that oldest
            // bit and p0 carries the 0
            if (m1 > m0) {
                next_metric[s] = m1;
                surv |= uint64_t(1) << s;
            } else {
                next_metric[s] = m0;
            }
        }
        survivor[k] = surv;
        metric = next_metric;
    }

    // zero tail forces the final state back to 0
    Bits inputs(steps);
    unsigned s = 0;
    for (size_t k = steps; k-- > 0;) {
        inputs[k] = static_cast<uint8_t>(s >> 5);
        unsigned pred_bit = (survivor[k] >> s) & 1u;
        s = ((s & 31u) << 1) | pred_bit;
    }
    inputs.resize(steps - ConvCode::memory);
    return inputs;
}

}  // namespace ncma
