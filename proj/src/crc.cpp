#include "ncma/crc.hpp"

namespace ncma {

namespace {
constexpr uint32_t kPolyReflected = 0xEDB88320u;  // 0x04C11DB7 bit-reversed
}

uint32_t crc32_bits(const Bits& bits) {
    uint32_t crc = 0xFFFFFFFFu;
    for (uint8_t b : bits) {
        crc ^= (b & 1u);
        crc = (crc & 1u) ? (crc >> 1) ^ kPolyReflected : crc >> 1;
    }
    return crc ^ 0xFFFFFFFFu;
}

uint32_t crc32_zero(size_t payload_bits) {
    return crc32_bits(Bits(payload_bits, 0));
}

Bits crc32_field(const Bits& payload) {
    uint32_t c = crc32_bits(payload);
    Bits field(kCrcBits);
    for (int i = 0; i < kCrcBits; ++i) field[i] = (c >> i) & 1;
    return field;
}

bool crc32_check(const Bits& payload, const Bits& field, int xor_weight) {
    if (field.size() != kCrcBits) return false;
    uint32_t expect = crc32_bits(payload);
    if (xor_weight % 2 == 0) expect ^= crc32_zero(payload.size());
    uint32_t got = 0;
    for (int i = 0; i < kCrcBits; ++i) got |= static_cast<uint32_t>(field[i] & 1) << i;
    return got == expect;
}

}  // namespace ncma
