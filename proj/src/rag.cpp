#include "ncma/rag.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "ncma/rng.hpp"

namespace ncma {

CVec zc_generate(int u, int n_zc, int shift) {
    if (n_zc < 3) throw std::invalid_argument("zc_generate: n_zc too small");
    if (u < 1 || u >= n_zc) throw std::invalid_argument("zc_generate: root out of range");
    if (shift < 0 || shift >= n_zc) throw std::invalid_argument("zc_generate: bad shift");
    CVec x(n_zc);
    for (int m = 0; m < n_zc; ++m) {
        long long mm = (static_cast<long long>(m) + shift) % n_zc;
        double phase = -std::numbers::pi * u * static_cast<double>(mm) * (mm + 1) / n_zc;
        x[m] = std::polar(1.0, phase);
    }
    return x;
}

PreambleDetection detect_preambles(const CVec& received, int u, int n_cs, double threshold) {
    const int n = static_cast<int>(received.size());
    if (n < 3) throw std::invalid_argument("detect_preambles: sequence too short");
    if (n_cs < 1 || n_cs > n) throw std::invalid_argument("detect_preambles: bad n_cs");

    CVec root = zc_generate(u, n, 0);
    std::vector<double> mag(n);
    for (int d = 0; d < n; ++d) {
        cplx acc = 0;
        for (int m = 0; m < n; ++m) acc += received[m] * std::conj(root[(m + d) % n]);
        mag[d] = std::abs(acc);
    }

    std::vector<double> sorted = mag;
    std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
    double floor = sorted[n / 2];

    PreambleDetection det;
    det.floor = floor;
    double cut = std::max(threshold * floor, 0.1 * n);
    for (int b = 0; b < zc_n_preambles(n, n_cs); ++b) {
        int d = b * n_cs;
        if (mag[d] > cut) {
            det.shifts.push_back(d);
            det.peaks.push_back(mag[d]);
        }
    }
    return det;
}

GroupPlan group_users(const std::vector<RagUser>& admitted, double strong_threshold_db,
                      bool pair_first) {
    std::vector<RagUser> strong, weak;
    for (const auto& u : admitted)
        (u.snr_db >= strong_threshold_db ? strong : weak).push_back(u);
    // strongest first / weakest first keeps the pairing deterministic
    std::sort(strong.begin(), strong.end(),
              [](const RagUser& a, const RagUser& b) { return a.snr_db > b.snr_db; });
    std::sort(weak.begin(), weak.end(),
              [](const RagUser& a, const RagUser& b) { return a.snr_db < b.snr_db; });

    GroupPlan plan;
    auto take_pairs = [&]() {
        while (!strong.empty() && !weak.empty()) {
            plan.push_back({true, {strong.front(), weak.front()}});
            strong.erase(strong.begin());
            weak.erase(weak.begin());
        }
    };
    auto take_weak_triples = [&]() {
        while (weak.size() >= 3) {
            plan.push_back({true, {weak[0], weak[1], weak[2]}});
            weak.erase(weak.begin(), weak.begin() + 3);
        }
    };

    if (pair_first) {
        take_pairs();
        take_weak_triples();
    } else {
        take_weak_triples();
        take_pairs();
    }
    if (weak.size() == 2) {
        plan.push_back({true, {weak[0], weak[1]}});
        weak.clear();
    }
    for (const auto& u : strong) plan.push_back({false, {u}});
    for (const auto& u : weak) plan.push_back({false, {u}});
    return plan;
}

RagOutcome run_rag(const std::vector<RagUser>& users, const RagParams& params, uint64_t seed) {
    const int b = zc_n_preambles(params.n_zc, params.n_cs);
    if (b < 1) throw std::invalid_argument("run_rag: no preambles available");

    auto rng = make_rng(seed);
    std::uniform_int_distribution<int> pick(0, b - 1);
    std::normal_distribution<double> meas(0.0, params.snr_noise_db);

    std::vector<RagUser> pending = users;
    std::vector<RagUser> admitted;
    RagOutcome out;

    while (!pending.empty()) {
        if (out.rounds >= params.max_rounds)
            throw std::runtime_error("run_rag: contention did not resolve");
        out.rounds++;

        std::map<int, std::vector<size_t>> chosen;  // preamble -> pending idx
        for (size_t i = 0; i < pending.size(); ++i) chosen[pick(rng)].push_back(i);

        std::vector<int> detected;
        if (params.signal_detection) {
            CVec rx(params.n_zc, cplx(0, 0));
            for (const auto& [p, idxs] : chosen) {
                CVec pre = zc_generate(params.u, params.n_zc, p * params.n_cs);
                for (size_t rep = 0; rep < idxs.size(); ++rep)
                    for (int m = 0; m < params.n_zc; ++m) rx[m] += pre[m];
            }
            if (params.noise_sigma > 0) {
                std::normal_distribution<double> g(0.0, params.noise_sigma / std::sqrt(2.0));
                for (auto& s : rx) s += cplx(g(rng), g(rng));
            }
            auto det = detect_preambles(rx, params.u, params.n_cs, params.detect_threshold);
            for (int shift : det.shifts) detected.push_back(shift / params.n_cs);
        } else {
            for (const auto& [p, idxs] : chosen) detected.push_back(p);
        }

        std::vector<size_t> leave;
        int admitted_now = 0;
        for (int p : detected) {
            auto it = chosen.find(p);
            if (it == chosen.end()) continue;  // spurious detection, nobody answers
            if (it->second.size() == 1) {
                RagUser u = pending[it->second[0]];
                u.snr_db += meas(rng);
                admitted.push_back(u);
                leave.push_back(it->second[0]);
                admitted_now++;
            } else {
                out.collisions += static_cast<int>(it->second.size());
            }
        }
        out.admitted_per_round.push_back(admitted_now);

        std::sort(leave.begin(), leave.end(), std::greater<>());
        for (size_t idx : leave) pending.erase(pending.begin() + idx);
    }

    out.plan = group_users(admitted, params.strong_threshold_db, params.pair_first);
    return out;
}

double analytic_mean_rounds(int k, int b) {
    if (k < 0) throw std::invalid_argument("analytic_mean_rounds: negative user count");
    if (b < 1) throw std::invalid_argument("analytic_mean_rounds: need at least one preamble");
    if (k == 0) return 0.0;
    if (b == 1) {
        if (k > 1) throw std::invalid_argument("analytic_mean_rounds: never resolves");
        return 1.0;
    }

    auto comb = [](int n, int r) {
        double c = 1;
        for (int i = 0; i < r; ++i) c = c * (n - i) / (i + 1);
        return c;
    };
    auto perm = [](int n, int r) {
        double p = 1;
        for (int i = 0; i < r; ++i) p *= (n - i);
        return p;
    };
    // assignments of r users to m preambles leaving no singleton preamble
    auto no_singletons = [&](int r, int m) {
        double total = 0;
        for (int i = 0; i <= std::min(r, m); ++i) {
            double term = comb(m, i) * perm(r, i) * std::pow(double(m - i), r - i);
            total += (i % 2 == 0) ? term : -term;
        }
        return total;
    };

    std::vector<double> expect(k + 1, 0.0);
    for (int rem = 1; rem <= k; ++rem) {
        double denom = std::pow(double(b), rem);
        std::vector<double> pj(rem + 1, 0.0);
        for (int j = 0; j <= rem; ++j)
            pj[j] = comb(b, j) * perm(rem, j) * no_singletons(rem - j, b - j) / denom;
        double acc = 1.0;
        for (int j = 1; j <= rem; ++j) acc += pj[j] * expect[rem - j];
        expect[rem] = acc / (1.0 - pj[0]);
    }
    return expect[k];
}

}  // namespace ncma
