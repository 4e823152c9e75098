#include "provi/rng.hpp"

#include <cmath>

#include "provi/errors.hpp"

namespace provi {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t key) : key_(mix64(key ^ 0x5851F42D4C957F2DULL)) {}

std::uint64_t RngStream::next_u64() { return mix64(key_ + kGamma * ++counter_); }

double RngStream::uniform() {
    // 53-bit mantissa; shift into (0,1) to keep log/quantile transforms finite.
    const double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return u > 0.0 ? u : 0x1.0p-53;
}

double RngStream::normal() { return inverse_normal_cdf(uniform()); }

RngStream RngStream::child(std::uint64_t index) const {
    RngStream c(0);
    c.key_ = mix64(key_ ^ mix64(index + 0xD1B54A32D192ED03ULL));
    return c;
}

std::int64_t RngStream::poisson(double rate) {
    if (!(rate > 0.0)) throw DomainError("poisson rate must be positive");
    std::int64_t n = 0;
    // Knuth's product method, chunked so the uniform product never underflows.
    while (rate > 0.0) {
        const double chunk = rate > 20.0 ? 20.0 : rate;
        rate -= chunk;
        const double limit = std::exp(-chunk);
        double prod = uniform();
        while (prod > limit) {
            ++n;
            prod *= uniform();
        }
    }
    return n;
}

double RngStream::gamma(double shape) {
    if (!(shape > 0.0)) throw DomainError("gamma shape must be positive");
    // Marsaglia-Tsang; the shape<1 boost uses one extra uniform.
    if (shape < 1.0) {
        const double u = uniform();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = normal();
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double RngStream::beta(double a, double b) {
    const double ga = gamma(a);
    const double gb = gamma(b);
    return ga / (ga + gb);
}

std::size_t RngStream::categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw DomainError("categorical draw needs positive total weight");
    double u = uniform() * total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
        u -= weights[i];
        if (u <= 0.0) return i;
    }
    return weights.size() - 1;
}

// Wichura (1988), algorithm AS 241, PPND16.
double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("inverse_normal_cdf needs p in (0,1)");
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                     6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                   1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                 1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
               (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                     3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                   5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                 4.2313330701600911252e+1) * r + 1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double result;
    if (r <= 5.0) {
        r -= 1.6;
        result = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                       2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                     3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
                   4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
                 (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                       1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                     6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
                   2.05319162663775882187e+0) * r + 1.0);
    } else {
        r -= 5.0;
        result = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                       1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                     2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
                   5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
                 (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                       1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                     1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                   5.99832206555887937690e-1) * r + 1.0);
    }
    return q < 0.0 ? -result : result;
}

}  // namespace provi
