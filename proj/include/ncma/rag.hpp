#pragma once

#include "ncma/modem.hpp"

namespace ncma {

// Root Zadoff-Chu sequence x_u(m) = exp(-j pi u m (m+1) / n_zc) rotated
// left by a cyclic shift.  Prime n_zc gives zero circular autocorrelation at
// every nonzero lag, so shifts spaced n_cs apart are orthogonal signatures.
CVec zc_generate(int u, int n_zc, int shift = 0);

inline int zc_n_preambles(int n_zc, int n_cs) { return n_zc / n_cs; }

struct PreambleDetection {
    std::vector<int> shifts;  // detected shifts, ascending, multiples of n_cs
    std::vector<double> peaks;
    double floor = 0.0;  // median correlation magnitude across all lags
};

// Circular correlation against the root sequence; a candidate shift is
// declared present when its peak magnitude exceeds threshold * floor (and an
// absolute 0.1 * n_zc, so a silent input yields an empty set).  Expects
// unit-amplitude preambles.
PreambleDetection detect_preambles(const CVec& received, int u, int n_cs,
                                   double threshold = 6.0);

// ---- random-access grouping ------------------------------------------------

struct RagUser {
    int id = 0;
    double snr_db = 0.0;
};

struct Group {
    bool ncma = false;  // multiuser group vs. lone TDMA slot owner
    std::vector<RagUser> members;
};
using GroupPlan = std::vector<Group>;

// Splits the admitted users at strong_threshold_db and forms groups:
// strong+weak pairs, leftover strong as singletons, leftover weak in threes
// then twos (a last lone weak user gets a singleton).  pair_first=false
// builds the weak triples before pairing.
GroupPlan group_users(const std::vector<RagUser>& admitted, double strong_threshold_db,
                      bool pair_first = true);

struct RagParams {
    int n_zc = 257;
    int u = 1;
    int n_cs = 20;
    double detect_threshold = 6.0;
    double strong_threshold_db = 15.0;
    double snr_noise_db = 0.5;  // std-dev of the admission SNR measurement
    bool pair_first = true;
    // Step 2 through the correlator on a superposed waveform instead of the
    // ideal bookkeeping shortcut (identical outcomes while detection is
    // exact; the shortcut keeps large trial counts cheap).
    bool signal_detection = false;
    double noise_sigma = 0.0;  // receiver noise with signal_detection
    int max_rounds = 100000;
};

struct RagOutcome {
    GroupPlan plan;
    int rounds = 0;
    int collisions = 0;  // user-rounds burned on shared preambles
    std::vector<int> admitted_per_round;
};

// Contention rounds: every pending user draws a preamble uniformly; detected
// singleton preambles admit their user (SNR measured with Gaussian error),
// shared preambles collide in the follow-up request and those users retry.
RagOutcome run_rag(const std::vector<RagUser>& users, const RagParams& params, uint64_t seed);

// Expected rounds until k users are admitted through b preambles, from the
// exact absorption chain of the singleton-departure process.
double analytic_mean_rounds(int k, int b);

}  // namespace ncma
