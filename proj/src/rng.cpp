#include "umlab/rng.hpp"

#include "umlab/normal.hpp"

namespace umlab {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mul_hi_lo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline void philox_round(Philox4x32::Counter& x, std::uint32_t k0, std::uint32_t k1) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mul_hi_lo(kPhiloxM0, x[0], hi0, lo0);
    mul_hi_lo(kPhiloxM1, x[2], hi1, lo1);
    x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
}

// Two uniforms in (0,1) from one 4x32 block, 53-bit resolution each.
inline void block_to_uniforms(const Philox4x32::Counter& r, double& u0, double& u1) {
    std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 32) | r[1];
    std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 32) | r[3];
    u0 = (static_cast<double>(a >> 11) + 0.5) * 0x1.0p-53;
    u1 = (static_cast<double>(b >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Counter Philox4x32::block(std::uint64_t key, const Counter& counter) {
    Counter x = counter;
    std::uint32_t k0 = static_cast<std::uint32_t>(key);
    std::uint32_t k1 = static_cast<std::uint32_t>(key >> 32);
    for (int round = 0; round < 10; ++round) {
        philox_round(x, k0, k1);
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return x;
}

double NormalSampler::normal(std::uint64_t path, std::uint64_t index) const {
    Philox4x32::Counter ctr = {static_cast<std::uint32_t>(index >> 1),
                               static_cast<std::uint32_t>(path),
                               static_cast<std::uint32_t>(path >> 32), stream_};
    Philox4x32::Counter r = Philox4x32::block(seed_, ctr);
    double u0, u1;
    block_to_uniforms(r, u0, u1);
    return norm_quantile_fast((index & 1) == 0 ? u0 : u1);
}

void NormalSampler::fill_column(Eigen::Ref<Vec> out, std::uint64_t index) const {
    const Index n = out.size();
    for (Index i = 0; i < n; ++i) {
        out[i] = normal(static_cast<std::uint64_t>(i), index);
    }
}

void NormalSampler::fill_pair(Eigen::Ref<Vec> even, Eigen::Ref<Vec> odd, std::uint64_t pair) const {
    const std::uint32_t hi = static_cast<std::uint32_t>(pair);
    const Index n = even.size();
    for (Index i = 0; i < n; ++i) {
        Philox4x32::Counter ctr = {hi, static_cast<std::uint32_t>(i),
                                   static_cast<std::uint32_t>(static_cast<std::uint64_t>(i) >> 32),
                                   stream_};
        Philox4x32::Counter r = Philox4x32::block(seed_, ctr);
        double u0, u1;
        block_to_uniforms(r, u0, u1);
        even[i] = norm_quantile_fast(u0);
        odd[i] = norm_quantile_fast(u1);
    }
}

}  // namespace umlab
