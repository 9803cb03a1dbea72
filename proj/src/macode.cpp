#include "ncma/macode.hpp"

#include <array>
#include <cstring>
#include <map>
#include <mutex>
#include <set>

namespace ncma {

namespace gf256 {

namespace {
std::array<uint8_t, 512> g_exp;
std::array<int, 256> g_log;
std::once_flag g_once;

void build() {
    unsigned x = 1;
    for (int i = 0; i < 255; ++i) {
        g_exp[i] = static_cast<uint8_t>(x);
        g_log[x] = i;
        x <<= 1;
        if (x & 0x100) x ^= 0x11D;
    }
    for (int i = 255; i < 512; ++i) g_exp[i] = g_exp[i - 255];
    g_log[0] = -1;
}
}  // namespace

void init_tables() { std::call_once(g_once, build); }

uint8_t mul(uint8_t a, uint8_t b) {
    if (a == 0 || b == 0) return 0;
    init_tables();
    return g_exp[g_log[a] + g_log[b]];
}

uint8_t inv(uint8_t a) {
    if (a == 0) throw std::domain_error("gf256: inverse of zero");
    init_tables();
    return g_exp[255 - g_log[a]];
}

}  // namespace gf256

namespace {

using Row = std::vector<uint8_t>;
using Matrix = std::vector<Row>;

// In-place Gauss-Jordan inverse of a k x k matrix over GF(256).
Matrix invert(Matrix m) {
    const int k = static_cast<int>(m.size());
    Matrix inv(k, Row(k, 0));
    for (int i = 0; i < k; ++i) inv[i][i] = 1;
    for (int col = 0; col < k; ++col) {
        int pivot = -1;
        for (int r = col; r < k; ++r)
            if (m[r][col] != 0) { pivot = r; break; }
        if (pivot < 0) throw std::logic_error("macode: singular decode matrix");
        std::swap(m[col], m[pivot]);
        std::swap(inv[col], inv[pivot]);
        uint8_t s = gf256::inv(m[col][col]);
        for (int c = 0; c < k; ++c) {
            m[col][c] = gf256::mul(m[col][c], s);
            inv[col][c] = gf256::mul(inv[col][c], s);
        }
        for (int r = 0; r < k; ++r) {
            if (r == col || m[r][col] == 0) continue;
            uint8_t f = m[r][col];
            for (int c = 0; c < k; ++c) {
                m[r][c] ^= gf256::mul(f, m[col][c]);
                inv[r][c] ^= gf256::mul(f, inv[col][c]);
            }
        }
    }
    return inv;
}

// Systematic generator: row p is e_p for p < l, otherwise the p-th
// Vandermonde row times the inverse of the top l x l block.  Any l rows stay
// independent because they are l distinct Vandermonde rows times a fixed
// invertible matrix.
Matrix build_generator(int l, int n) {
    Matrix vand(n, Row(l));
    for (int i = 0; i < n; ++i) {
        uint8_t v = 1;
        for (int j = 0; j < l; ++j) {
            vand[i][j] = v;
            v = gf256::mul(v, static_cast<uint8_t>(i));
        }
    }
    Matrix top(vand.begin(), vand.begin() + l);
    Matrix top_inv = invert(std::move(top));
    Matrix gen(n, Row(l, 0));
    for (int p = 0; p < n; ++p)
        for (int c = 0; c < l; ++c) {
            uint8_t acc = 0;
            for (int j = 0; j < l; ++j) acc ^= gf256::mul(vand[p][j], top_inv[j][c]);
            gen[p][c] = acc;
        }
    return gen;
}

const Matrix& generator(const MacCodeSpec& spec) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, Matrix> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(spec.l, spec.n_total);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, build_generator(spec.l, spec.n_total)).first;
    return it->second;
}

Row generator_row(const MacCodeSpec& spec, int p) { return generator(spec)[p]; }

Row apply_row(const Row& row, const std::vector<std::vector<uint8_t>>& packets_bytes,
              int packet_bytes) {
    Row out(packet_bytes, 0);
    for (size_t j = 0; j < row.size(); ++j) {
        if (row[j] == 0) continue;
        const auto& src = packets_bytes[j];
        for (int b = 0; b < packet_bytes; ++b) out[b] ^= gf256::mul(row[j], src[b]);
    }
    return out;
}

std::vector<std::vector<uint8_t>> split_message(const Bits& message, const MacCodeSpec& spec) {
    spec.validate();
    if (static_cast<int>(message.size()) != spec.l * spec.packet_bits)
        throw std::invalid_argument("macode: message length != l * packet_bits");
    std::vector<std::vector<uint8_t>> frags(spec.l);
    for (int i = 0; i < spec.l; ++i) {
        Bits chunk(message.begin() + size_t(i) * spec.packet_bits,
                   message.begin() + size_t(i + 1) * spec.packet_bits);
        frags[i] = bits_to_bytes(chunk);
    }
    return frags;
}

}  // namespace

void MacCodeSpec::validate() const {
    if (l < 1) throw std::invalid_argument("MacCodeSpec.l: must be >= 1");
    if (n_total < l) throw std::invalid_argument("MacCodeSpec.n_total: must be >= l");
    if (n_total > 255) throw std::invalid_argument("MacCodeSpec.n_total: must be <= 255");
    if (packet_bits < 8 || packet_bits % 8 != 0)
        throw std::invalid_argument("MacCodeSpec.packet_bits: must be a positive multiple of 8");
}

std::vector<Bits> mac_encode(const Bits& message, const MacCodeSpec& spec) {
    auto frags = split_message(message, spec);
    const int packet_bytes = spec.packet_bits / 8;
    std::vector<Bits> out(spec.n_total);
    for (int p = 0; p < spec.n_total; ++p) {
        Row bytes = apply_row(generator_row(spec, p), frags, packet_bytes);
        out[p] = bytes_to_bits(bytes);
    }
    return out;
}

Bits mac_reencode(const Bits& message, const MacCodeSpec& spec, int index) {
    if (index < 0 || index >= spec.n_total)
        throw std::invalid_argument("mac_reencode: index out of range");
    auto frags = split_message(message, spec);
    return bytes_to_bits(apply_row(generator_row(spec, index), frags, spec.packet_bits / 8));
}

std::optional<Bits> mac_decode(const std::vector<std::pair<int, Bits>>& packets,
                               const MacCodeSpec& spec) {
    spec.validate();
    std::set<int> seen;
    for (const auto& [idx, bits] : packets) {
        if (idx < 0 || idx >= spec.n_total)
            throw std::invalid_argument("mac_decode: packet index out of range");
        if (!seen.insert(idx).second)
            throw std::invalid_argument("mac_decode: duplicate packet index");
        if (static_cast<int>(bits.size()) != spec.packet_bits)
            throw std::invalid_argument("mac_decode: packet has wrong size");
    }
    if (static_cast<int>(packets.size()) < spec.l) return std::nullopt;

    const int l = spec.l;
    const int packet_bytes = spec.packet_bits / 8;
    Matrix sys(l, Row(l));
    std::vector<std::vector<uint8_t>> rhs(l);
    for (int i = 0; i < l; ++i) {
        sys[i] = generator_row(spec, packets[i].first);
        rhs[i] = bits_to_bytes(packets[i].second);
    }
    Matrix sys_inv = invert(std::move(sys));

    Bits message;
    message.reserve(size_t(l) * spec.packet_bits);
    for (int i = 0; i < l; ++i) {
        Row frag = apply_row(sys_inv[i], rhs, packet_bytes);
        Bits frag_bits = bytes_to_bits(frag);
        message.insert(message.end(), frag_bits.begin(), frag_bits.end());
    }
    return message;
}

}  // namespace ncma
