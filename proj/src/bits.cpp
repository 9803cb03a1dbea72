#include "ncma/bits.hpp"

namespace ncma {

std::vector<uint8_t> bits_to_bytes(const Bits& bits) {
    if (bits.size() % 8 != 0)
        throw std::invalid_argument("bits_to_bytes: bit count not a multiple of 8");
    std::vector<uint8_t> out(bits.size() / 8, 0);
    for (size_t i = 0; i < bits.size(); ++i)
        out[i / 8] = static_cast<uint8_t>((out[i / 8] << 1) | (bits[i] & 1));
    return out;
}

Bits bytes_to_bits(const std::vector<uint8_t>& bytes) {
    Bits out(bytes.size() * 8);
    for (size_t i = 0; i < bytes.size(); ++i)
        for (int k = 0; k < 8; ++k)
            out[i * 8 + k] = (bytes[i] >> (7 - k)) & 1;
    return out;
}

}  // namespace ncma
