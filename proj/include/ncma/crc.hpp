#pragma once

#include <cstdint>

#include "ncma/bits.hpp"

namespace ncma {

inline constexpr int kCrcBits = 32;

// Reflected CRC-32 (polynomial 0x04C11DB7, init/final-xor all ones) computed
// directly over a bit sequence.
uint32_t crc32_bits(const Bits& bits);

// 32-bit checksum field, serialized LSB first.
Bits crc32_field(const Bits& payload);

// Checksum of the all-zero payload of the given length.  Because of the
// init/final-xor the CRC is affine: crc(a^b) = crc(a) ^ crc(b) ^ crc(0), so
// an XOR of an even number of packets carries crc(payload) ^ crc(0) instead
// of crc(payload).  xor_weight is the number of packets folded together.
uint32_t crc32_zero(size_t payload_bits);

bool crc32_check(const Bits& payload, const Bits& field, int xor_weight = 1);

}  // namespace ncma
