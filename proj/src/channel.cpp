#include "ncma/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ncma/rng.hpp"

namespace ncma {

ChannelRealization draw_channel(const std::vector<UserChannelSpec>& users, Fading fading,
                                double sigma2, uint64_t seed) {
    if (users.empty() || users.size() > kMaxUsers)
        throw std::invalid_argument("draw_channel: need 1..3 users");
    if (sigma2 <= 0.0) throw std::invalid_argument("draw_channel: sigma2 must be positive");

    ChannelRealization ch;
    ch.n_users = static_cast<int>(users.size());
    ch.sigma2 = sigma2;
    auto rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);

    for (const auto& u : users) {
        if (u.user < 0 || u.user >= kMaxUsers)
            throw std::invalid_argument("draw_channel: user index out of range");
        double p = std::pow(10.0, u.snr_db / 10.0) * sigma2;  // target E|h|^2
        for (int a = 0; a < kAntennas; ++a) {
            if (fading == Fading::RayleighBlock) {
                ch.gain[u.user][a] =
                    std::sqrt(p / 2.0) * cplx(gauss(rng), gauss(rng));
            } else {
                ch.gain[u.user][a] = std::polar(std::sqrt(p), phase(rng));
            }
        }
    }
    return ch;
}

SlotObservation transmit_slot(const std::vector<TxBlock>& blocks, const ChannelRealization& ch,
                              uint64_t seed) {
    if (blocks.empty()) throw std::invalid_argument("transmit_slot: no blocks");
    const size_t n = blocks[0].symbols.size();
    for (const auto& b : blocks)
        if (b.symbols.size() != n)
            throw std::invalid_argument("transmit_slot: symbol blocks differ in length");

    SlotObservation obs;
    obs.n_users = ch.n_users;
    obs.n_symbols = static_cast<int>(n);
    obs.sigma2 = ch.sigma2;
    obs.realization = ch;

    for (int a = 0; a < kAntennas; ++a) obs.y[a].assign(n, cplx(0.0, 0.0));

    for (const auto& b : blocks) {
        if (b.user < 0 || b.user >= kMaxUsers)
            throw std::invalid_argument("transmit_slot: user index out of range");
        double amp = 1.0 / std::sqrt(mod_symbol_energy(b.mod));
        for (int a = 0; a < kAntennas; ++a) {
            cplx g = ch.gain[b.user][a] * amp;
            obs.eff_gain[b.user][a] = g;
            for (size_t k = 0; k < n; ++k) obs.y[a][k] += g * b.symbols[k];
        }
    }

    auto rng = make_rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(ch.sigma2 / 2.0));
    for (int a = 0; a < kAntennas; ++a)
        for (size_t k = 0; k < n; ++k) obs.y[a][k] += cplx(gauss(rng), gauss(rng));

    return obs;
}

}  // namespace ncma
