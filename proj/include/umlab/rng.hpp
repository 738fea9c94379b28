#pragma once

#include "umlab/types.hpp"

#include <array>
#include <cstdint>

namespace umlab {

/// Philox4x32-10 counter-based generator (Salmon et al., SC 2011).
/// Stateless: every 128-bit counter / 64-bit key pair maps to four
/// independent 32-bit words, so draws can be produced in any order and
/// by any number of workers with identical results.
struct Philox4x32 {
    using Counter = std::array<std::uint32_t, 4>;

    static Counter block(std::uint64_t key, const Counter& counter);
};

/// Deterministic normal variates addressed by (seed, stream, path, index).
/// Stream 0 carries the main driver, stream 1 the orthogonal second driver;
/// disjoint counters make the streams independent by construction.
class NormalSampler {
  public:
    NormalSampler(std::uint64_t seed, std::uint32_t stream) : seed_(seed), stream_(stream) {}

    /// The k-th N(0,1) variate of the given path.
    double normal(std::uint64_t path, std::uint64_t index) const;

    /// Fills one column (all paths) with the index-th variate of each path.
    void fill_column(Eigen::Ref<Vec> out, std::uint64_t index) const;

    /// Fills variates 2*pair and 2*pair+1 for all paths from a single
    /// Philox block per path.
    void fill_pair(Eigen::Ref<Vec> even, Eigen::Ref<Vec> odd, std::uint64_t pair) const;

  private:
    std::uint64_t seed_;
    std::uint32_t stream_;
};

}  // namespace umlab
