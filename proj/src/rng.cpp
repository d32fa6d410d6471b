#include "lgcn/rng.hpp"

#include <cmath>

namespace lgcn {

std::vector<double> Rng::unit_vector(std::size_t n) {
    std::vector<double> v(n);
    double s = 0.0;
    do {
        s = 0.0;
        for (auto& x : v) {
            x = normal();
            s += x * x;
        }
    } while (s == 0.0);
    const double inv = 1.0 / std::sqrt(s);
    for (auto& x : v) x *= inv;
    return v;
}

} // namespace lgcn
