#include "ncma/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "ncma/rng.hpp"

#include <json.hpp>

namespace ncma {

namespace {
// seed-stream tags so per-slot draws, message payloads and batch seeds can
// never collide
constexpr uint64_t kTagChannel = 0xC1;
constexpr uint64_t kTagNoise = 0xA2;
constexpr uint64_t kTagMessage = 0xE3;
constexpr uint64_t kTagBatch = 0xB4;
}  // namespace

Profile profile_from_string(const std::string& s) {
    if (s == "sic") return Profile::Sic;
    if (s == "bpsk") return Profile::BpskHomogeneous;
    if (s == "qpsk") return Profile::QpskHomogeneous;
    if (s == "dr") return Profile::DrNcma;
    if (s == "sr") return Profile::SrNcma;
    throw std::invalid_argument("profile: expected one of sic|bpsk|qpsk|dr|sr, got '" + s + "'");
}

std::string to_string(Profile p) {
    switch (p) {
        case Profile::Sic: return "sic";
        case Profile::BpskHomogeneous: return "bpsk";
        case Profile::QpskHomogeneous: return "qpsk";
        case Profile::DrNcma: return "dr";
        case Profile::SrNcma: return "sr";
    }
    return "?";
}

std::string to_string(Stage s) {
    switch (s) {
        case Stage::Mud: return "mud";
        case Stage::Phy: return "phy";
        case Stage::Mac: return "mac";
    }
    return "?";
}

SlotProfileKind slot_profile_kind(Profile p) {
    switch (p) {
        case Profile::Sic:
        case Profile::BpskHomogeneous: return SlotProfileKind::Bpsk3;
        case Profile::QpskHomogeneous: return SlotProfileKind::Qpsk3;
        case Profile::DrNcma: return SlotProfileKind::Dr2b1q;
        case Profile::SrNcma: return SlotProfileKind::Sr2b1q;
    }
    return SlotProfileKind::Bpsk3;
}

void ScenarioConfig::validate() const {
    if (snr_c_db.empty()) throw std::invalid_argument("snr_c_db: need at least one sweep point");
    if (slots < 1) throw std::invalid_argument("slots: must be >= 1");
    if (trials < 1) throw std::invalid_argument("trials: must be >= 1");
    if (packet_bits < 8 || packet_bits % 8 != 0)
        throw std::invalid_argument("packet_bits: must be a positive multiple of 8");
    for (int u = 0; u < kMaxUsers; ++u)
        if (l[u] < 1) throw std::invalid_argument("l: message lengths must be >= 1");
    if (window_factor < 1) throw std::invalid_argument("window_factor: must be >= 1");
    for (int u = 0; u < kMaxUsers; ++u)
        if (window_factor * l[u] > 255)
            throw std::invalid_argument("window_factor: coded window exceeds 255 packets");
    if (sigma2 <= 0.0) throw std::invalid_argument("sigma2: must be positive");
    if (llr_clip <= 0.0) throw std::invalid_argument("llr_clip: must be positive");
    if (threads < 0) throw std::invalid_argument("threads: must be >= 0");

    SlotProfile prof = make_slot_profile(slot_profile_kind(profile), packet_bits);
    for (int u = 0; u < kMaxUsers; ++u) {
        int per_slot = 0;
        for (int s : prof.user_streams(u)) per_slot += prof.stream(s).mac_packets;
        if (window_factor * l[u] < per_slot)
            throw std::invalid_argument("window_factor: window smaller than one slot's packets");
    }
}

namespace {

// per-user transmit schedule: which packets of which message go out each slot
struct UserSchedule {
    int user = 0;
    MacCodeSpec spec;
    int per_slot = 1;
    uint64_t message = 0;
    uint32_t next_index = 0;
    std::vector<Bits> coded;

    uint64_t point_seed = 0;

    void load_message(uint64_t msg) {
        message = msg;
        next_index = 0;
        auto rng = make_rng(mix_seed(point_seed, kTagMessage, user, msg));
        Bits payload = random_bits(size_t(spec.l) * spec.packet_bits, rng);
        coded = mac_encode(payload, spec);
    }
};

struct PointRunner {
    const ScenarioConfig& cfg;
    double snr_c_db;
    uint64_t point_seed;
    SlotProfile prof;

    PointRunner(const ScenarioConfig& c, double snr_c, uint64_t seed)
        : cfg(c),
          snr_c_db(snr_c),
          point_seed(seed),
          prof(make_slot_profile(slot_profile_kind(c.profile), c.packet_bits)) {}

    std::vector<UserChannelSpec> channel_users() const {
        return {{0, cfg.snr_a_db}, {1, cfg.snr_b_db}, {2, snr_c_db}};
    }

    std::vector<int> sic_order() const {
        std::vector<int> order = {0, 1, 2};
        std::array<double, 3> snr = {cfg.snr_a_db, cfg.snr_b_db, snr_c_db};
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            if (snr[a] != snr[b]) return snr[a] > snr[b];
            return a > b;  // tie: the swept user goes first
        });
        return order;
    }

    ThroughputRecord run_stage(Stage stage) const {
        MacLedger ledger;
        ledger.n_users = kMaxUsers;

        std::array<UserSchedule, kMaxUsers> sched;
        for (int u = 0; u < kMaxUsers; ++u) {
            sched[u].user = u;
            sched[u].spec = {cfg.l[u], cfg.window_factor * cfg.l[u], cfg.packet_bits};
            sched[u].per_slot = 0;
            for (int s : prof.user_streams(u)) sched[u].per_slot += prof.stream(s).mac_packets;
            sched[u].point_seed = point_seed;
            sched[u].load_message(0);
            ledger.spec[u] = sched[u].spec;
        }

        DetectOptions opt;
        opt.llr_clip = cfg.llr_clip;

        auto users = channel_users();
        auto order = sic_order();

        for (int slot = 0; slot < cfg.slots; ++slot) {
            auto ch = draw_channel(users, cfg.fading, cfg.sigma2,
                                   mix_seed(point_seed, kTagChannel, slot));

            std::vector<TxBlock> blocks;
            std::vector<StreamBinding> binding(prof.streams.size());
            for (int u = 0; u < kMaxUsers; ++u) {
                auto& sc = sched[u];
                std::vector<Bits> packets(sc.coded.begin() + sc.next_index,
                                          sc.coded.begin() + sc.next_index + sc.per_slot);
                blocks.push_back(make_tx_block(prof, u, packets));
                uint32_t idx = sc.next_index;
                for (int s : prof.user_streams(u)) {
                    binding[s] = {u, sc.message, idx, prof.stream(s).mac_packets};
                    idx += prof.stream(s).mac_packets;
                }
            }

            auto obs = transmit_slot(blocks, ch, mix_seed(point_seed, kTagNoise, slot));

            if (cfg.profile == Profile::Sic) {
                auto res = sic_decode(obs, prof, order, opt);
                std::vector<DecodedEquation> eqs;
                for (auto& [stream, mac] : res.decoded)
                    eqs.push_back({static_cast<uint8_t>(1u << stream), std::move(mac)});
                ledger_add_slot(ledger, eqs, binding, Stage::Mud);
                rs_sweep(ledger);
            } else {
                run_slot_pipeline(obs, prof, binding, stage, ledger, opt);
            }

            for (int u = 0; u < kMaxUsers; ++u) {
                auto& sc = sched[u];
                sc.next_index += sc.per_slot;
                if (ledger.is_recovered(u, sc.message)) {
                    sc.load_message(sc.message + 1);
                } else if (sc.next_index + sc.per_slot > uint32_t(sc.spec.n_total)) {
                    // window spent: the transmitter abandons this message
                    ledger.state(u, sc.message).closed = true;
                    sc.load_message(sc.message + 1);
                }
            }
        }

        // Count a message only if the reconstruction matches what was sent: a
        // falsely captured frame carries someone else's valid CRC, and the
        // erasure decode it feeds produces garbage the receiver cannot flag.
        std::array<uint64_t, kMaxUsers> correct{};
        for (int u = 0; u < kMaxUsers; ++u) {
            for (const auto& [msg, st] : ledger.messages[u]) {
                if (!st.recovered) continue;
                auto rng = make_rng(mix_seed(point_seed, kTagMessage, u, msg));
                if (st.payload == random_bits(size_t(cfg.l[u]) * cfg.packet_bits, rng))
                    correct[u]++;
            }
        }
        return tally_throughput(correct, cfg.l, cfg.slots);
    }
};

}  // namespace

std::array<ThroughputRecord, 3> run_point(const ScenarioConfig& cfg, double snr_c_db,
                                          uint64_t seed) {
    PointRunner runner(cfg, snr_c_db, seed);
    std::array<ThroughputRecord, 3> out;
    if (cfg.profile == Profile::Sic) {
        // no bridging machinery to turn on; all stages coincide
        out[0] = runner.run_stage(Stage::Mud);
        out[1] = out[0];
        out[2] = out[0];
    } else {
        out[0] = runner.run_stage(Stage::Mud);
        out[1] = runner.run_stage(Stage::Phy);
        out[2] = runner.run_stage(Stage::Mac);
    }
    return out;
}

uint64_t batch_seed(uint64_t master, size_t point_index, int batch) {
    return mix_seed(master, kTagBatch, point_index, uint64_t(batch));
}

std::vector<ResultRow> run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();

    struct Task {
        size_t point;
        int batch;
        uint64_t seed;
    };
    std::vector<Task> tasks;
    for (size_t p = 0; p < cfg.snr_c_db.size(); ++p)
        for (int t = 0; t < cfg.trials; ++t) tasks.push_back({p, t, batch_seed(cfg.seed, p, t)});

    std::vector<std::array<ThroughputRecord, 3>> results(tasks.size());
    std::atomic<size_t> next{0};
    unsigned n_threads = cfg.threads > 0 ? unsigned(cfg.threads)
                                         : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(n_threads, tasks.size());

    auto worker = [&]() {
        for (size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1))
            results[i] = run_point(cfg, cfg.snr_c_db[tasks[i].point], tasks[i].seed);
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    std::vector<ResultRow> rows;
    rows.reserve(tasks.size() * 3);
    for (size_t p = 0; p < cfg.snr_c_db.size(); ++p) {
        for (int s = 0; s < 3; ++s) {
            for (int t = 0; t < cfg.trials; ++t) {
                size_t task = p * cfg.trials + t;
                rows.push_back({cfg.profile, cfg.snr_c_db[p], results[task][s],
                                static_cast<Stage>(s), cfg.slots, tasks[task].seed});
            }
        }
    }
    return rows;
}

std::string render_csv(const std::vector<ResultRow>& rows) {
    std::string out = "profile,snr_c_db,th_a,th_b,th_c,th_sys,stage,slots,seed\n";
    char buf[256];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof(buf), "%s,%.2f,%.6f,%.6f,%.6f,%.6f,%s,%d,%llu\n",
                      to_string(r.profile).c_str(), r.snr_c_db, r.th.th_a, r.th.th_b, r.th.th_c,
                      r.th.th_sys, to_string(r.stage).c_str(), r.slots,
                      static_cast<unsigned long long>(r.seed));
        out += buf;
    }
    return out;
}

std::string config_text(const ScenarioConfig& cfg) {
    std::ostringstream os;
    os << "profile = " << to_string(cfg.profile) << "\n";
    char buf[64];
    auto num = [&](const char* key, double v) {
        std::snprintf(buf, sizeof(buf), "%.10g", v);
        os << key << " = " << buf << "\n";
    };
    num("snr_a_db", cfg.snr_a_db);
    num("snr_b_db", cfg.snr_b_db);
    os << "snr_c_db = ";
    for (size_t i = 0; i < cfg.snr_c_db.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.10g", cfg.snr_c_db[i]);
        os << (i ? "," : "") << buf;
    }
    os << "\n";
    os << "slots = " << cfg.slots << "\n";
    os << "trials = " << cfg.trials << "\n";
    os << "seed = " << cfg.seed << "\n";
    os << "packet_bits = " << cfg.packet_bits << "\n";
    os << "l_a = " << cfg.l[0] << "\n";
    os << "l_b = " << cfg.l[1] << "\n";
    os << "l_c = " << cfg.l[2] << "\n";
    os << "window_factor = " << cfg.window_factor << "\n";
    os << "fading = " << (cfg.fading == Fading::RayleighBlock ? "rayleigh" : "unitphase") << "\n";
    num("sigma2", cfg.sigma2);
    num("llr_clip", cfg.llr_clip);
    os << "threads = " << cfg.threads << "\n";
    return os.str();
}

uint64_t config_hash(const ScenarioConfig& cfg) {
    // FNV-1a over the canonical serialization
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : config_text(cfg)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

std::vector<double> parse_sweep(const std::string& value) {
    // "8,10,12" or "8:14:2" (start:stop:step, inclusive)
    std::vector<double> out;
    if (value.find(':') != std::string::npos) {
        double start, stop, step = 1.0;
        char c1, c2;
        std::istringstream is(value);
        if (!(is >> start >> c1 >> stop) || c1 != ':')
            throw std::invalid_argument("snr_c_db: bad range '" + value + "'");
        if (is >> c2 >> step && c2 != ':')
            throw std::invalid_argument("snr_c_db: bad range '" + value + "'");
        if (step <= 0) throw std::invalid_argument("snr_c_db: step must be positive");
        for (double v = start; v <= stop + 1e-9; v += step) out.push_back(v);
        return out;
    }
    std::istringstream is(value);
    std::string tok;
    while (std::getline(is, tok, ',')) {
        if (tok.empty()) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

}  // namespace

void apply_config_entry(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    bool known = true;
    try {
        if (key == "profile") cfg.profile = profile_from_string(value);
        else if (key == "snr_a_db") cfg.snr_a_db = std::stod(value);
        else if (key == "snr_b_db") cfg.snr_b_db = std::stod(value);
        else if (key == "snr_c_db") cfg.snr_c_db = parse_sweep(value);
        else if (key == "slots") cfg.slots = std::stoi(value);
        else if (key == "trials") cfg.trials = std::stoi(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "packet_bits") cfg.packet_bits = std::stoi(value);
        else if (key == "l_a") cfg.l[0] = std::stoi(value);
        else if (key == "l_b") cfg.l[1] = std::stoi(value);
        else if (key == "l_c") cfg.l[2] = std::stoi(value);
        else if (key == "window_factor") cfg.window_factor = std::stoi(value);
        else if (key == "fading") {
            if (value == "rayleigh") cfg.fading = Fading::RayleighBlock;
            else if (value == "unitphase") cfg.fading = Fading::UnitMagnitudeRandomPhase;
            else throw std::invalid_argument("expected rayleigh|unitphase");
        }
        else if (key == "sigma2") cfg.sigma2 = std::stod(value);
        else if (key == "llr_clip") cfg.llr_clip = std::stod(value);
        else if (key == "threads") cfg.threads = std::stoi(value);
        else known = false;
    } catch (const std::exception&) {
        throw std::invalid_argument(key + ": bad value '" + value + "'");
    }
    if (!known) throw std::invalid_argument("unknown config key '" + key + "'");
}

ScenarioConfig parse_config_text(const std::string& text) {
    ScenarioConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        lineno++;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r");
            size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string t = trim(line);
        if (t.empty()) continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        apply_config_entry(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
}

std::string render_manifest(const ScenarioConfig& cfg, const std::string& csv_path) {
    nlohmann::json j;
    j["config"] = nlohmann::json::object();
    std::istringstream is(config_text(cfg));
    std::string line;
    while (std::getline(is, line)) {
        auto eq = line.find(" = ");
        j["config"][line.substr(0, eq)] = line.substr(eq + 3);
    }
    j["master_seed"] = cfg.seed;
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(config_hash(cfg)));
    j["config_hash"] = hash;
    j["csv"] = csv_path;
    j["rows_per_point"] = cfg.trials * 3;
    return j.dump(2) + "\n";
}

}  // namespace ncma
