#pragma once

#include <cstdint>
#include <span>

namespace provi {

/// Counter-based random stream. A stream is identified by a 64-bit key;
/// draw n is a hash of (key, n), so streams can be re-derived and replayed
/// deterministically regardless of thread layout.
///
/// Substream discipline used across the library:
///   - `child(i)` is a pure function of (key, i): the same index always
///     names the same stream. Combinators that need independence (loss
///     products, enumeration branches, particle sets) use fixed indices.
///   - `fork()` derives successive children from a separate index range.
/// Batch drivers give sample j the stream `root.child(j)`, which makes
/// results independent of worker count.
class RngStream {
  public:
    explicit RngStream(std::uint64_t key);

    std::uint64_t next_u64();
    /// Uniform draw in the open interval (0, 1).
    double uniform();
    /// Standard normal via the inverse CDF (one uniform per draw).
    double normal();
    bool bernoulli(double p) { return uniform() < p; }
    std::int64_t poisson(double rate);
    double gamma(double shape);
    double beta(double a, double b);
    /// Index draw by CDF walk over (not necessarily normalized) weights.
    std::size_t categorical(std::span<const double> weights);

    RngStream child(std::uint64_t index) const;
    RngStream fork() { return child(kForkBase + forks_++); }

    std::uint64_t key() const { return key_; }

  private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    std::uint64_t forks_ = 0;

    static constexpr std::uint64_t kForkBase = 0x100000000ULL;  // reserved for fork()
};

/// Inverse of the standard normal CDF (Wichura's double-precision rational
/// approximation). Exposed for the simulate paths and test oracles.
double inverse_normal_cdf(double p);

}  // namespace provi
