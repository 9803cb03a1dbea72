#include "ncma/detect.hpp"

#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ncma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<JointPoint> enumerate_points(const std::array<Mod, kMaxUsers>& mods, int n_users) {
    static const cplx bpsk_pts[2] = {{1, 0}, {-1, 0}};
    static const cplx qpsk_pts[4] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    std::vector<JointPoint> points{JointPoint{}};
    for (int u = 0; u < n_users; ++u) {
        const cplx* tab = mods[u] == Mod::Qpsk ? qpsk_pts : bpsk_pts;
        int card = mods[u] == Mod::Qpsk ? 4 : 2;
        std::vector<JointPoint> grown;
        grown.reserve(points.size() * card);
        for (const auto& p : points)
            for (int i = 0; i < card; ++i) {
                JointPoint q = p;
                q.x[u] = tab[i];
                grown.push_back(q);
            }
        points = std::move(grown);
    }
    return points;
}

int8_t point_target(const JointPoint& p, const std::vector<TapRef>& taps) {
    int sign = 1;
    for (const auto& t : taps) {
        double c = t.lane == 0 ? p.x[t.user].real() : p.x[t.user].imag();
        sign *= c > 0 ? 1 : -1;
    }
    return static_cast<int8_t>(sign);
}

void finalize(SlotProfile& prof) {
    prof.points = enumerate_points(prof.mods, prof.n_users);
    prof.chi.resize(prof.decoders.size());
    for (size_t d = 0; d < prof.decoders.size(); ++d) {
        auto& spec = prof.decoders[d];
        spec.weight = std::popcount(spec.label);
        prof.chi[d].resize(spec.groups.size());
        for (size_t g = 0; g < spec.groups.size(); ++g) {
            auto& targets = prof.chi[d][g];
            targets.resize(prof.points.size());
            int pos = 0, neg = 0;
            for (size_t p = 0; p < prof.points.size(); ++p) {
                targets[p] = point_target(prof.points[p], spec.groups[g]);
                (targets[p] > 0 ? pos : neg)++;
            }
            // every scheduled label must split the constellation in half
            if (pos != neg || pos + neg != static_cast<int>(prof.points.size()))
                throw std::logic_error("slot profile: chi subsets do not partition evenly");
        }
    }
}

DecoderSpec make_decoder(const SlotProfile& prof, uint8_t mask) {
    DecoderSpec d;
    d.label = mask;
    int payload = -1;
    bool whole_qpsk = false;
    for (size_t s = 0; s < prof.streams.size(); ++s) {
        if (!(mask >> s & 1)) continue;
        const auto& st = prof.streams[s];
        if (payload < 0) {
            payload = st.payload_bits();
            d.mac_bits = st.mac_bits;
            d.pad_bits = st.pad_bits;
        } else if (payload != st.payload_bits()) {
            throw std::logic_error("slot profile: label mixes stream sizes");
        }
        if (st.lane < 0) whole_qpsk = true;
    }
    d.payload_bits = payload;
    d.codeword_bits = 2 * (payload + ConvCode::memory);
    d.groups.resize(whole_qpsk ? 2 : 1);
    for (size_t s = 0; s < prof.streams.size(); ++s) {
        if (!(mask >> s & 1)) continue;
        const auto& st = prof.streams[s];
        if (st.lane < 0) {
            d.groups[0].push_back({st.user, 0});
            d.groups[1].push_back({st.user, 1});
        } else {
            d.groups[0].push_back({st.user, st.lane});
        }
    }
    d.name = prof.label_name(mask);
    return d;
}

}  // namespace

std::vector<int> SlotProfile::user_streams(int user) const {
    std::vector<int> out;
    for (size_t s = 0; s < streams.size(); ++s)
        if (streams[s].user == user) out.push_back(static_cast<int>(s));
    return out;
}

std::string SlotProfile::label_name(uint8_t mask) const {
    std::string out;
    for (size_t s = 0; s < streams.size(); ++s) {
        if (!(mask >> s & 1)) continue;
        if (!out.empty()) out += "^";
        out += streams[s].name;
    }
    return out.empty() ? "0" : out;
}

SlotProfile make_slot_profile(SlotProfileKind kind, int packet_bits) {
    if (packet_bits < 8 || packet_bits % 8 != 0)
        throw std::invalid_argument("make_slot_profile: packet_bits must be a positive multiple of 8");

    SlotProfile prof;
    prof.kind = kind;
    prof.packet_bits = packet_bits;
    const int lp = packet_bits;
    // Common airtime across every profile: one BPSK codeword per slot.
    const int n_sym = 2 * (lp + kCrcBits + ConvCode::memory);
    prof.n_symbols = n_sym;
    // A whole-QPSK codeword spans 2*n_sym coded bits; after the CRC the
    // remaining room is padded so the stream carries exactly two packets.
    const int qpsk_pad = n_sym - 2 * lp - kCrcBits - ConvCode::memory;

    switch (kind) {
        case SlotProfileKind::Bpsk3:
            prof.mods = {Mod::Bpsk, Mod::Bpsk, Mod::Bpsk};
            prof.streams = {{0, "A", 0, 1, lp, 0}, {1, "B", 0, 1, lp, 0}, {2, "C", 0, 1, lp, 0}};
            for (uint8_t m = 1; m < 8; ++m) prof.decoders.push_back(make_decoder(prof, m));
            break;
        case SlotProfileKind::Qpsk3:
            prof.mods = {Mod::Qpsk, Mod::Qpsk, Mod::Qpsk};
            prof.streams = {{0, "A", -1, 2, 2 * lp, qpsk_pad},
                            {1, "B", -1, 2, 2 * lp, qpsk_pad},
                            {2, "C", -1, 2, 2 * lp, qpsk_pad}};
            for (uint8_t m = 1; m < 8; ++m) prof.decoders.push_back(make_decoder(prof, m));
            break;
        case SlotProfileKind::Dr2b1q:
            prof.mods = {Mod::Bpsk, Mod::Bpsk, Mod::Qpsk};
            prof.streams = {{0, "A", 0, 1, lp, 0},
                            {1, "B", 0, 1, lp, 0},
                            {2, "C", -1, 2, 2 * lp, qpsk_pad}};
            for (uint8_t m : {1, 2, 4, 3}) prof.decoders.push_back(make_decoder(prof, m));
            break;
        case SlotProfileKind::Sr2b1q:
            prof.mods = {Mod::Bpsk, Mod::Bpsk, Mod::Qpsk};
            prof.streams = {{0, "A", 0, 1, lp, 0},
                            {1, "B", 0, 1, lp, 0},
                            {2, "C_I", 0, 1, lp, 0},
                            {2, "C_Q", 1, 1, lp, 0}};
            for (uint8_t m = 1; m < 16; ++m) {
                if ((m & 0b1100) == 0b1100) continue;  // C_I with C_Q never pays off
                prof.decoders.push_back(make_decoder(prof, m));
            }
            break;
    }
    finalize(prof);
    return prof;
}

Bits frame_payload(const Bits& mac_bits, int pad_bits) {
    Bits payload = mac_bits;
    Bits crc = crc32_field(mac_bits);
    payload.insert(payload.end(), crc.begin(), crc.end());
    payload.insert(payload.end(), size_t(pad_bits), 0);
    return payload;
}

TxBlock make_tx_block(const SlotProfile& prof, int user, const std::vector<Bits>& packets) {
    for (const auto& p : packets)
        if (static_cast<int>(p.size()) != prof.packet_bits)
            throw std::invalid_argument("make_tx_block: packet size mismatch");

    TxBlock block;
    block.user = user;
    block.mod = prof.mods[user];

    auto streams = prof.user_streams(user);
    if (streams.size() == 2) {
        // symbol-split rails, independently framed and coded
        if (packets.size() != 2) throw std::invalid_argument("make_tx_block: rails need 2 packets");
        Bits rail_i = conv_encode(frame_payload(packets[0], 0));
        Bits rail_q = conv_encode(frame_payload(packets[1], 0));
        block.symbols = qpsk_split_modulate(rail_i, rail_q);
        return block;
    }

    const auto& st = prof.stream(streams.at(0));
    size_t need = size_t(st.mac_packets);
    if (packets.size() != need)
        throw std::invalid_argument("make_tx_block: wrong packet count for stream");
    Bits mac;
    for (const auto& p : packets) mac.insert(mac.end(), p.begin(), p.end());
    Bits coded = conv_encode(frame_payload(mac, st.pad_bits));
    block.symbols = st.lane < 0 ? qpsk_modulate(coded) : bpsk_modulate(coded);
    return block;
}

namespace {

struct PointSums {
    // received-constellation points: S[a][p] = sum_u g[u][a] * x_u(p)
    std::array<std::vector<cplx>, kAntennas> s;
};

PointSums point_sums(const SlotObservation& obs, const SlotProfile& prof) {
    PointSums ps;
    for (int a = 0; a < kAntennas; ++a) {
        ps.s[a].resize(prof.points.size());
        for (size_t p = 0; p < prof.points.size(); ++p) {
            cplx acc = 0;
            for (int u = 0; u < prof.n_users; ++u) acc += obs.eff_gain[u][a] * prof.points[p].x[u];
            ps.s[a][p] = acc;
        }
    }
    return ps;
}

inline double sq(const cplx& v) { return v.real() * v.real() + v.imag() * v.imag(); }

void point_distances(const SlotObservation& obs, const PointSums& ps, int k,
                     std::vector<double>& dist) {
    const size_t np = ps.s[0].size();
    for (size_t p = 0; p < np; ++p)
        dist[p] = sq(obs.y[0][k] - ps.s[0][p]) + sq(obs.y[1][k] - ps.s[1][p]);
}

}  // namespace

double joint_llr(const SlotObservation& obs, const SlotProfile& prof, int decoder,
                 int bit_position) {
    const auto& d = prof.decoders.at(decoder);
    if (bit_position < 0 || bit_position >= d.codeword_bits)
        throw std::invalid_argument("joint_llr: bit position out of range");
    const int n_groups = static_cast<int>(d.groups.size());
    const int k = bit_position / n_groups;
    const int g = bit_position % n_groups;

    PointSums ps = point_sums(obs, prof);
    std::vector<double> dist(prof.points.size());
    point_distances(obs, ps, k, dist);

    double min_pos = kInf, min_neg = kInf;
    const auto& targets = prof.chi[decoder][g];
    for (size_t p = 0; p < dist.size(); ++p) {
        if (targets[p] > 0)
            min_pos = std::min(min_pos, dist[p]);
        else
            min_neg = std::min(min_neg, dist[p]);
    }
    return min_neg - min_pos;
}

LlrVec llr_codeword(const SlotObservation& obs, const SlotProfile& prof, int decoder) {
    const auto& d = prof.decoders.at(decoder);
    if (d.codeword_bits != static_cast<int>(d.groups.size()) * obs.n_symbols)
        throw std::invalid_argument("llr_codeword: observation length does not match profile");

    PointSums ps = point_sums(obs, prof);
    std::vector<double> dist(prof.points.size());
    LlrVec llr(d.codeword_bits);
    const int n_groups = static_cast<int>(d.groups.size());
    for (int k = 0; k < obs.n_symbols; ++k) {
        point_distances(obs, ps, k, dist);
        for (int g = 0; g < n_groups; ++g) {
            const auto& targets = prof.chi[decoder][g];
            double min_pos = kInf, min_neg = kInf;
            for (size_t p = 0; p < dist.size(); ++p) {
                if (targets[p] > 0)
                    min_pos = std::min(min_pos, dist[p]);
                else
                    min_neg = std::min(min_neg, dist[p]);
            }
            llr[size_t(k) * n_groups + g] = min_neg - min_pos;
        }
    }
    return llr;
}

std::vector<DecodedEquation> run_decoder_bank(const SlotObservation& obs, const SlotProfile& prof,
                                              const DetectOptions& opt) {
    PointSums ps = point_sums(obs, prof);
    std::vector<int> scheduled;
    for (size_t d = 0; d < prof.decoders.size(); ++d)
        if (!opt.mud_only || prof.decoders[d].weight == 1) scheduled.push_back(static_cast<int>(d));

    std::vector<LlrVec> llr(prof.decoders.size());
    for (int d : scheduled) {
        const auto& spec = prof.decoders[d];
        if (spec.codeword_bits != static_cast<int>(spec.groups.size()) * obs.n_symbols)
            throw std::invalid_argument("run_decoder_bank: observation length mismatch");
        llr[d].resize(spec.codeword_bits);
    }

    std::vector<double> dist(prof.points.size());
    for (int k = 0; k < obs.n_symbols; ++k) {
        point_distances(obs, ps, k, dist);
        for (int d : scheduled) {
            const auto& spec = prof.decoders[d];
            const int n_groups = static_cast<int>(spec.groups.size());
            for (int g = 0; g < n_groups; ++g) {
                const auto& targets = prof.chi[d][g];
                double min_pos = kInf, min_neg = kInf;
                for (size_t p = 0; p < dist.size(); ++p) {
                    if (targets[p] > 0)
                        min_pos = std::min(min_pos, dist[p]);
                    else
                        min_neg = std::min(min_neg, dist[p]);
                }
                llr[d][size_t(k) * n_groups + g] = min_neg - min_pos;
            }
        }
    }

    std::vector<DecodedEquation> out;
    ViterbiOptions vopt{opt.llr_clip};
    for (int d : scheduled) {
        const auto& spec = prof.decoders[d];
        Bits payload = viterbi_decode(llr[d], vopt);
        Bits mac(payload.begin(), payload.begin() + spec.mac_bits);
        Bits crc(payload.begin() + spec.mac_bits, payload.begin() + spec.mac_bits + kCrcBits);
        if (crc32_check(mac, crc, spec.weight)) out.push_back({spec.label, std::move(mac)});
    }
    return out;
}

SicResult sic_decode(const SlotObservation& obs, const SlotProfile& prof,
                     const std::vector<int>& order, const DetectOptions& opt) {
    for (int u = 0; u < prof.n_users; ++u)
        if (prof.mods[u] != Mod::Bpsk)
            throw std::invalid_argument("sic_decode: BPSK profiles only");
    if (static_cast<int>(order.size()) != prof.n_users)
        throw std::invalid_argument("sic_decode: order must cover all users");

    std::array<CVec, kAntennas> y = obs.y;
    SicResult res;
    ViterbiOptions vopt{opt.llr_clip};

    for (size_t pos = 0; pos < order.size(); ++pos) {
        int u = order[pos];
        // remaining users act as extra Gaussian noise
        std::array<double, kAntennas> nu;
        for (int a = 0; a < kAntennas; ++a) {
            nu[a] = obs.sigma2;
            for (size_t q = pos + 1; q < order.size(); ++q) nu[a] += sq(obs.eff_gain[order[q]][a]);
        }

        const auto& st = prof.stream(prof.user_streams(u).at(0));
        LlrVec llr(st.codeword_bits());
        for (int k = 0; k < obs.n_symbols; ++k) {
            double v = 0;
            for (int a = 0; a < kAntennas; ++a)
                v += 4.0 * (std::conj(obs.eff_gain[u][a]) * y[a][k]).real() / nu[a];
            llr[k] = v;
        }

        Bits payload = viterbi_decode(llr, vopt);
        Bits mac(payload.begin(), payload.begin() + st.mac_bits);
        Bits crc(payload.begin() + st.mac_bits, payload.end());
        if (!crc32_check(mac, crc)) {
            res.failed_user = u;
            break;
        }
        res.decoded.emplace_back(prof.user_streams(u).at(0), mac);

        CVec x = bpsk_modulate(conv_encode(frame_payload(mac, 0)));
        for (int a = 0; a < kAntennas; ++a)
            for (int k = 0; k < obs.n_symbols; ++k) y[a][k] -= obs.eff_gain[u][a] * x[k];
    }
    return res;
}

}  // namespace ncma
