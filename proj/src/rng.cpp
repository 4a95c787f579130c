#include "spdeflow/rng.hpp"

#include <cmath>

namespace spdeflow {

namespace {
constexpr std::uint64_t kPhiloxM = 0xD2B74407B1CE6E93ull;
constexpr std::uint64_t kWeyl = 0x9E3779B97F4A7C15ull;

inline void mul128(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 prod = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(prod >> 64);
    lo = static_cast<std::uint64_t>(prod);
}
}  // namespace

Philox2x64 philox2x64(std::uint64_t key, std::uint64_t ctr0, std::uint64_t ctr1) {
    std::uint64_t x0 = ctr0, x1 = ctr1, k = key;
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi, lo;
        mul128(x0, kPhiloxM, hi, lo);
        x0 = hi ^ k ^ x1;
        x1 = lo;
        k += kWeyl;
    }
    return Philox2x64{x0, x1};
}

double normal_icdf(double p) {
    // Wichura, Applied Statistics 37 (1988), algorithm AS 241, PPND16.
    const double q = p - 0.5;
    double r;
    if (std::fabs(q) <= 0.425) {
        r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double v;
    if (r <= 5.0) {
        r -= 1.6;
        v = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        v = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -v : v;
}

double counter_gauss(std::uint64_t seed, std::uint64_t path, std::uint64_t index) {
    const Philox2x64 out = philox2x64(seed, path, index >> 1);
    const std::uint64_t word = (index & 1ull) ? out.v1 : out.v0;
    return normal_icdf(uniform_open01(word));
}

}  // namespace spdeflow
