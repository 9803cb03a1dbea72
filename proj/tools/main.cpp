#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ncma/analysis.hpp"
#include "ncma/crc.hpp"
#include "ncma/fec.hpp"
#include "ncma/macode.hpp"
#include "ncma/modem.hpp"
#include "ncma/rag.hpp"
#include "ncma/rng.hpp"
#include "ncma/sim.hpp"

using namespace ncma;

namespace {

int run_sweep(const ScenarioConfig& cfg, const std::string& out_path) {
    cfg.validate();
    auto start = std::chrono::steady_clock::now();
    auto rows = run_scenario(cfg);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    std::ofstream csv(out_path, std::ios::binary);
    if (!csv) {
        std::cerr << "cannot write " << out_path << "\n";
        return 1;
    }
    csv << render_csv(rows);

    std::string manifest_path = out_path + ".manifest.json";
    std::ofstream manifest(manifest_path, std::ios::binary);
    if (!manifest) {
        std::cerr << "cannot write " << manifest_path << "\n";
        return 1;
    }
    manifest << render_manifest(cfg, out_path);

    std::printf("wrote %s (%zu rows) and %s in %.1fs\n", out_path.c_str(), rows.size(),
                manifest_path.c_str(), secs);
    std::printf("%8s %10s %10s %10s  (final-stage means over %d trial%s)\n", "snr_c", "th_c",
                "th_sys", "th_a+b", cfg.trials, cfg.trials == 1 ? "" : "s");
    for (size_t p = 0; p < cfg.snr_c_db.size(); ++p) {
        ThroughputRecord acc;
        for (int t = 0; t < cfg.trials; ++t) {
            const auto& th = rows[(p * 3 + 2) * size_t(cfg.trials) + size_t(t)].th;
            acc.th_a += th.th_a;
            acc.th_b += th.th_b;
            acc.th_c += th.th_c;
            acc.th_sys += th.th_sys;
        }
        std::printf("%8.2f %10.4f %10.4f %10.4f\n", cfg.snr_c_db[p], acc.th_c / cfg.trials,
                    acc.th_sys / cfg.trials, (acc.th_a + acc.th_b) / cfg.trials);
    }
    return 0;
}

int run_rag_sim(int n_users, int trials, uint64_t seed, const RagParams& params, double snr_min,
                double snr_max) {
    const int b = zc_n_preambles(params.n_zc, params.n_cs);
    double rounds = 0.0, collisions = 0.0;
    RagOutcome last;
    for (int t = 0; t < trials; ++t) {
        auto rng = make_rng(mix_seed(seed, 1, uint64_t(t)));
        std::uniform_real_distribution<double> snr(snr_min, snr_max);
        std::vector<RagUser> users;
        for (int i = 0; i < n_users; ++i) users.push_back({i, snr(rng)});
        last = run_rag(users, params, mix_seed(seed, 2, uint64_t(t)));
        rounds += last.rounds;
        collisions += last.collisions;
    }

    std::printf("%d users over %d preambles (n_zc=%d, n_cs=%d), %d trials\n", n_users, b,
                params.n_zc, params.n_cs, trials);
    std::printf("mean rounds      %.4f\n", rounds / trials);
    std::printf("analytic rounds  %.4f%s\n", analytic_mean_rounds(n_users, b),
                params.signal_detection && params.noise_sigma > 0
                    ? " (assumes error-free detection)"
                    : "");
    std::printf("mean collisions  %.4f user-rounds\n", collisions / trials);

    std::printf("sample plan from the last trial:\n");
    for (size_t g = 0; g < last.plan.size(); ++g) {
        std::printf("  slot %zu: %s", g, last.plan[g].ncma ? "shared" : "lone  ");
        for (const auto& m : last.plan[g].members)
            std::printf("  user %d (%.1f dB)", m.id, m.snr_db);
        std::printf("\n");
    }
    return 0;
}

int run_theory(double snr_min, double snr_max, double step, double sigma2) {
    if (step <= 0) {
        std::cerr << "step must be positive\n";
        return 1;
    }
    std::printf("%8s %12s %12s %14s\n", "snr_db", "rate_gain", "first_sinr", "first_sinr_db");
    for (double s = snr_min; s <= snr_max + 1e-9; s += step) {
        double p = std::pow(10.0, s / 10.0);
        double sinr = sic_first_user_sinr(p, sigma2);
        std::printf("%8.2f %12.6f %12.6f %14.3f\n", s, rate_gain(p), sinr,
                    10.0 * std::log10(sinr));
    }
    return 0;
}

int run_selftest() {
    int failures = 0;
    auto check = [&](const char* what, bool ok) {
        std::printf("[%s] %s\n", ok ? "ok" : "FAIL", what);
        failures += !ok;
    };

    Bits impulse = conv_encode({1});
    check("encoder impulse response",
          impulse == Bits{1, 1, 0, 1, 1, 1, 1, 1, 0, 0, 1, 0, 1, 1});

    auto rng = make_rng(0x5E1F);
    Bits payload = random_bits(96, rng);
    Bits coded = conv_encode(payload);
    std::vector<double> llr(coded.size());
    for (size_t i = 0; i < coded.size(); ++i) llr[i] = coded[i] ? -2.0 : 2.0;
    llr[5] = -llr[5];
    llr[40] = -llr[40];
    llr[41] = -llr[41];
    check("decoder corrects scattered flips", viterbi_decode(llr) == payload);

    MacCodeSpec spec{3, 6, 16};
    Bits msg = random_bits(size_t(spec.l) * spec.packet_bits, rng);
    auto pkts = mac_encode(msg, spec);
    bool mds = true;
    for (int i = 0; i < spec.n_total && mds; ++i)
        for (int j = i + 1; j < spec.n_total && mds; ++j)
            for (int k = j + 1; k < spec.n_total && mds; ++k) {
                auto got = mac_decode(
                    {{i, pkts[size_t(i)]}, {j, pkts[size_t(j)]}, {k, pkts[size_t(k)]}}, spec);
                mds = got && *got == msg;
            }
    check("erasure code rebuilds from every packet triple", mds);

    auto zc = zc_generate(1, 257);
    double worst = 0.0;
    for (int lag = 1; lag < 257; ++lag) {
        cplx acc = 0;
        for (int m = 0; m < 257; ++m) acc += zc[size_t(m)] * std::conj(zc[size_t((m + lag) % 257)]);
        worst = std::max(worst, std::abs(acc));
    }
    check("preamble autocorrelation vanishes off-peak", worst <= 1e-9 * 257);

    Bits va = random_bits(64, rng), vb = random_bits(64, rng);
    bool pnc = true;
    auto xa = bpsk_modulate(va);
    auto xb = bpsk_modulate(vb);
    for (size_t i = 0; i < va.size(); ++i) {
        int bit = pnc_bit_map(int(std::round((xa[i] * xb[i]).real())));
        pnc = pnc && bit == (va[i] ^ vb[i]);
    }
    check("symbol products carry the XOR bit", pnc);

    Bits ascii;
    for (char ch : std::string("123456789"))
        for (int bit = 0; bit < 8; ++bit) ascii.push_back(uint8_t(ch) >> bit & 1);
    check("checksum reference vector", crc32_bits(ascii) == 0xCBF43926u);

    std::printf("%d check(s) failed\n", failures);
    return failures;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"link-level simulator for power-balanced non-orthogonal multiple access"};
    app.require_subcommand(1);

    auto* sweep = app.add_subcommand("sweep", "run a throughput sweep, write CSV and manifest");
    std::string config_path, out_path = "sweep.csv";
    std::string profile_v, snr_a_v, snr_b_v, snr_c_v, slots_v, trials_v, seed_v, packet_v,
        threads_v, fading_v;
    sweep->add_option("--config", config_path, "flat key=value config file")
        ->check(CLI::ExistingFile);
    sweep->add_option("--out", out_path, "CSV output path (manifest lands next to it)");
    auto* o_profile = sweep->add_option("--profile", profile_v, "sic|bpsk|qpsk|dr|sr");
    auto* o_snr_a = sweep->add_option("--snr-a", snr_a_v, "user A SNR in dB");
    auto* o_snr_b = sweep->add_option("--snr-b", snr_b_v, "user B SNR in dB");
    auto* o_snr_c = sweep->add_option("--snr-c", snr_c_v, "user C sweep: list 8,10 or range 8:14:2");
    auto* o_slots = sweep->add_option("--slots", slots_v, "slots per batch");
    auto* o_trials = sweep->add_option("--trials", trials_v, "independent batches per point");
    auto* o_seed = sweep->add_option("--seed", seed_v, "master seed");
    auto* o_packet = sweep->add_option("--packet-bits", packet_v, "payload bits per packet");
    auto* o_threads = sweep->add_option("--threads", threads_v, "worker threads (0 = all cores)");
    auto* o_fading = sweep->add_option("--fading", fading_v, "rayleigh|unitphase");

    auto* rag = app.add_subcommand("rag-sim", "simulate contention-based admission and grouping");
    int rag_users = 10, rag_trials = 10000;
    uint64_t rag_seed = 1;
    double snr_min = 5.0, snr_max = 25.0;
    RagParams rag_params;
    rag->add_option("--users", rag_users, "contending users")->check(CLI::PositiveNumber);
    rag->add_option("--trials", rag_trials, "independent trials")->check(CLI::PositiveNumber);
    rag->add_option("--seed", rag_seed, "master seed");
    rag->add_option("--n-zc", rag_params.n_zc, "preamble sequence length (prime)");
    rag->add_option("--n-cs", rag_params.n_cs, "cyclic shift spacing");
    rag->add_option("--threshold", rag_params.detect_threshold, "detection peak/floor ratio");
    rag->add_option("--strong-db", rag_params.strong_threshold_db, "strong/weak grouping split");
    rag->add_option("--snr-min", snr_min, "lower edge of the user SNR draw");
    rag->add_option("--snr-max", snr_max, "upper edge of the user SNR draw");
    rag->add_flag("--signal", rag_params.signal_detection,
                  "run detection on superposed waveforms instead of ideal bookkeeping");
    rag->add_option("--noise-sigma", rag_params.noise_sigma,
                    "receiver noise std-dev (with --signal)");

    auto* theory = app.add_subcommand("theory", "closed-form rate gain and cancellation SINR");
    double th_min = 0.0, th_max = 40.0, th_step = 5.0, th_sigma2 = 1.0;
    theory->add_option("--snr-min", th_min, "table start in dB");
    theory->add_option("--snr-max", th_max, "table end in dB");
    theory->add_option("--step", th_step, "table step in dB");
    theory->add_option("--sigma2", th_sigma2, "noise variance");

    app.add_subcommand("selftest", "quick codec and sequence sanity checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed()) {
            ScenarioConfig cfg;
            if (!config_path.empty()) {
                std::ifstream in(config_path);
                std::stringstream buf;
                buf << in.rdbuf();
                cfg = parse_config_text(buf.str());
            }
            auto apply_if = [&](CLI::Option* o, const char* key, const std::string& v) {
                if (o->count()) apply_config_entry(cfg, key, v);
            };
            apply_if(o_profile, "profile", profile_v);
            apply_if(o_snr_a, "snr_a_db", snr_a_v);
            apply_if(o_snr_b, "snr_b_db", snr_b_v);
            apply_if(o_snr_c, "snr_c_db", snr_c_v);
            apply_if(o_slots, "slots", slots_v);
            apply_if(o_trials, "trials", trials_v);
            apply_if(o_seed, "seed", seed_v);
            apply_if(o_packet, "packet_bits", packet_v);
            apply_if(o_threads, "threads", threads_v);
            apply_if(o_fading, "fading", fading_v);
            return run_sweep(cfg, out_path);
        }
        if (rag->parsed()) return run_rag_sim(rag_users, rag_trials, rag_seed, rag_params,
                                              snr_min, snr_max);
        if (theory->parsed()) return run_theory(th_min, th_max, th_step, th_sigma2);
        return run_selftest();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
