#include "ncma/modem.hpp"

namespace ncma {

CVec bpsk_modulate(const Bits& coded) {
    CVec out(coded.size());
    for (size_t i = 0; i < coded.size(); ++i) out[i] = cplx(1.0 - 2.0 * (coded[i] & 1), 0.0);
    return out;
}

CVec qpsk_modulate(const Bits& coded) {
    if (coded.size() % 2 != 0)
        throw std::invalid_argument("qpsk_modulate: odd number of coded bits");
    CVec out(coded.size() / 2);
    for (size_t k = 0; k < out.size(); ++k)
        out[k] = cplx(1.0 - 2.0 * (coded[2 * k] & 1), 1.0 - 2.0 * (coded[2 * k + 1] & 1));
    return out;
}

CVec qpsk_split_modulate(const Bits& rail_i, const Bits& rail_q) {
    if (rail_i.size() != rail_q.size())
        throw std::invalid_argument("qpsk_split_modulate: rail length mismatch");
    CVec out(rail_i.size());
    for (size_t k = 0; k < out.size(); ++k)
        out[k] = cplx(1.0 - 2.0 * (rail_i[k] & 1), 1.0 - 2.0 * (rail_q[k] & 1));
    return out;
}

}  // namespace ncma
