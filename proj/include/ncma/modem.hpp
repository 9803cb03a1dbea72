#pragma once

#include <complex>

#include "ncma/bits.hpp"

namespace ncma {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

enum class Mod { Bpsk, Qpsk };

// Constellations are left unnormalized here (BPSK +-1, QPSK +-1 +-j); the
// channel scales each user's block to unit average symbol power.

// x[k] = 1 - 2 v[k]
CVec bpsk_modulate(const Bits& coded);

// Gray-less direct mapping: odd-position bit (v[2k]) on I, even-position
// (v[2k+1]) on Q, zero-based.  coded.size() must be even.
CVec qpsk_modulate(const Bits& coded);

// Two independently coded rails, one on each quadrature axis.
CVec qpsk_split_modulate(const Bits& rail_i, const Bits& rail_q);

// XOR bit carried by a product of BPSK symbols: +1 -> 0, -1 -> 1.
inline int pnc_bit_map(int symbol_product) {
    if (symbol_product != 1 && symbol_product != -1)
        throw std::invalid_argument("pnc_bit_map: product must be +-1");
    return (1 - symbol_product) / 2;
}

// Average |x|^2 of the unnormalized constellation.
inline double mod_symbol_energy(Mod m) { return m == Mod::Qpsk ? 2.0 : 1.0; }

}  // namespace ncma
