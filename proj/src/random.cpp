#include "herdsim/random.hpp"

#include <cmath>
#include <stdexcept>

namespace herdsim {

namespace {

// Philox4x64 round constants (multipliers and Weyl key increments).
constexpr std::uint64_t kMult0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMult1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(std::uint64_t key0, std::uint64_t key1,
                                        std::uint64_t ctr0, std::uint64_t ctr1,
                                        std::uint64_t ctr2, std::uint64_t ctr3) {
    std::uint64_t x0 = ctr0, x1 = ctr1, x2 = ctr2, x3 = ctr3;
    std::uint64_t k0 = key0, k1 = key1;
    for (int round = 0; round < 10; ++round) {
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(kMult0, x0, hi0, lo0);
        mulhilo(kMult1, x2, hi1, lo1);
        x0 = hi1 ^ x1 ^ k0;
        x1 = lo1;
        x2 = hi0 ^ x3 ^ k1;
        x3 = lo0;
        k0 += kWeyl0;
        k1 += kWeyl1;
    }
    return {x0, x1, x2, x3};
}

// AS 241 (Wichura 1988), the double-precision PPND16 variant. Three rational
// approximations: a central one for |u - 0.5| <= 0.425 and two tail branches
// in the variable sqrt(-log(min(u, 1-u))).
double normal_icdf(double u) {
    const double q = u - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                  6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
              1.3314166789178437745e2) * r + 3.3871328727963666080e0);
        const double den =
            (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                  3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
              4.2313330701600911252e1) * r + 1.0);
        return q * num / den;
    }
    double r = (q < 0.0) ? u : 1.0 - u;
    r = std::sqrt(-std::log(r));
    double z;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
        z = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
        z = num / den;
    }
    return (q < 0.0) ? -z : z;
}

std::uint64_t RandomStream::raw() {
    const std::uint64_t t = tick_++;
    const std::uint64_t block = t >> 2;
    if (block != cached_block_) {
        block_ = philox4x64(seed_, substream_, block);
        cached_block_ = block;
    }
    return block_[t & 3];
}

std::uint64_t RandomStream::raw_at(std::uint64_t tick) const {
    return philox4x64(seed_, substream_, tick >> 2)[tick & 3];
}

double RandomStream::gaussian() { return normal_icdf(to_unit_open(raw())); }

double RandomStream::gaussian_at(std::uint64_t tick) const {
    return normal_icdf(to_unit_open(raw_at(tick)));
}

double RandomStream::uniform(double a, double b) {
    if (a > b) throw std::invalid_argument("uniform: lower bound exceeds upper bound");
    return a + (b - a) * to_unit_open(raw());
}

double RandomStream::uniform_at(std::uint64_t tick, double a, double b) const {
    if (a > b) throw std::invalid_argument("uniform: lower bound exceeds upper bound");
    return a + (b - a) * to_unit_open(raw_at(tick));
}

}  // namespace herdsim
