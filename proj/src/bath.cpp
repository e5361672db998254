#include "mpemba/bath.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mpemba {

BathParams make_bath(double gamma, double omega0, double n_th) {
    if (!(gamma > 0.0))
        throw std::invalid_argument("make_bath: gamma must be positive");
    if (!(omega0 >= 0.0))
        throw std::invalid_argument("make_bath: omega0 must be nonnegative");
    if (!(n_th >= 0.0))
        throw std::invalid_argument("make_bath: n_th must be nonnegative");
    return BathParams{gamma, omega0, n_th};
}

BathParams bath_from_temperature_ratio(double gamma, double omega0, double x) {
    if (!(x > 0.0))
        throw std::invalid_argument("bath_from_temperature_ratio: x must be positive");
    return make_bath(gamma, omega0, 1.0 / std::expm1(x));
}

int thermal_truncation(double n_th, const TruncationPolicy& policy) {
    if (!(policy.tail_tol > 0.0) || policy.n_min < 1 || policy.n_max_cap < policy.n_min)
        throw std::invalid_argument("thermal_truncation: bad truncation policy");
    if (n_th <= 0.0) return policy.n_min;
    const double q = n_th / (1.0 + n_th);
    // q^N < tail_tol  <=>  N > log(tail_tol)/log(q)
    const int needed = static_cast<int>(std::ceil(std::log(policy.tail_tol) / std::log(q))) + 1;
    if (needed > policy.n_max_cap)
        throw std::domain_error("thermal_truncation: required N " + std::to_string(needed) +
                                " exceeds cap " + std::to_string(policy.n_max_cap));
    return std::max(needed, policy.n_min);
}

}  // namespace mpemba
