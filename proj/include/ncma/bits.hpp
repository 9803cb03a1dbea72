#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace ncma {

// Packets and codewords are flat 0/1 sequences. Bytes only appear at the
// erasure-code boundary (see macode.hpp).
using Bits = std::vector<uint8_t>;
using LlrVec = std::vector<double>;

inline Bits xor_bits(const Bits& a, const Bits& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("xor_bits: length mismatch");
    Bits out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
    return out;
}

inline void xor_into(Bits& acc, const Bits& b) {
    if (acc.size() != b.size())
        throw std::invalid_argument("xor_into: length mismatch");
    for (size_t i = 0; i < b.size(); ++i) acc[i] ^= b[i];
}

template <class Rng>
Bits random_bits(size_t n, Rng& rng) {
    Bits out(n);
    std::uniform_int_distribution<int> coin(0, 1);
    for (auto& b : out) b = static_cast<uint8_t>(coin(rng));
    return out;
}

// Byte packing is MSB-first within each byte; bit count must be a multiple
// of 8 (enforced where packets meet the erasure code).
std::vector<uint8_t> bits_to_bytes(const Bits& bits);
Bits bytes_to_bits(const std::vector<uint8_t>& bytes);

}  // namespace ncma
