#pragma once

#include <optional>
#include <utility>

#include "ncma/bits.hpp"

namespace ncma {

// GF(2^8) with the usual 0x11D reduction polynomial.
namespace gf256 {
void init_tables();
uint8_t mul(uint8_t a, uint8_t b);
uint8_t inv(uint8_t a);
}  // namespace gf256

// Systematic MDS erasure code over byte symbols.  A message is l packets of
// packet_bits each; encoding yields n_total packets, the first l of them the
// message itself, and any l distinct packets reconstruct the message.
// Packet p is the column (G[p] . m) applied independently at every byte
// position, G the n x l generator with Vandermonde structure normalized so
// its top l rows are the identity.
struct MacCodeSpec {
    int l = 0;
    int n_total = 0;
    int packet_bits = 0;

    void validate() const;
};

std::vector<Bits> mac_encode(const Bits& message, const MacCodeSpec& spec);
Bits mac_reencode(const Bits& message, const MacCodeSpec& spec, int index);

// Returns the message once >= l distinct packets are supplied; nullopt means
// not enough packets yet.  Duplicate indices or wrong sizes throw.
std::optional<Bits> mac_decode(const std::vector<std::pair<int, Bits>>& packets,
                               const MacCodeSpec& spec);

}  // namespace ncma
