#include "ncma/analysis.hpp"

#include <cmath>
#include <stdexcept>

namespace ncma {

double rate_gain(double power_linear) {
    if (power_linear <= 0.0) throw std::invalid_argument("rate_gain: power must be positive");
    double base = std::log(1.0 + power_linear);
    return (std::log(1.0 + 2.0 * power_linear) - base) / base;
}

double sic_first_user_sinr(double power_linear, double sigma2) {
    if (power_linear <= 0.0 || sigma2 <= 0.0)
        throw std::invalid_argument("sic_first_user_sinr: arguments must be positive");
    return power_linear / (power_linear + sigma2);
}

ThroughputRecord tally_throughput(const std::array<uint64_t, kMaxUsers>& messages,
                                  const std::array<int, kMaxUsers>& l, int n_slots) {
    if (n_slots <= 0) throw std::invalid_argument("tally_throughput: slot count must be positive");
    ThroughputRecord r;
    r.th_a = double(l[0]) * double(messages[0]) / n_slots;
    r.th_b = double(l[1]) * double(messages[1]) / n_slots;
    r.th_c = double(l[2]) * double(messages[2]) / n_slots;
    r.th_sys = r.th_a + r.th_b + r.th_c;
    return r;
}

}  // namespace ncma
