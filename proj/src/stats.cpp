#include "umlab/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace umlab {

double pairwise_sum(const double* data, Index n) {
    if (n <= 32) {
        double s = 0.0;
        for (Index i = 0; i < n; ++i) s += data[i];
        return s;
    }
    Index half = n / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, n - half);
}

double pairwise_sum(const Vec& v) { return pairwise_sum(v.data(), v.size()); }

MCStat mc_mean(const Vec& samples) {
    const Index n = samples.size();
    if (n == 0) throw std::invalid_argument("mc_mean: empty sample");
    MCStat s;
    s.n = n;
    s.value = pairwise_sum(samples) / static_cast<double>(n);
    if (n > 1) {
        Vec dev = samples - s.value;
        double ss = pairwise_sum(Vec(dev * dev));
        s.se = std::sqrt(ss / (static_cast<double>(n) * static_cast<double>(n - 1)));
    }
    return s;
}

MCStat mc_mean_diff(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("mc_mean_diff: size mismatch");
    return mc_mean(Vec(a - b));
}

}  // namespace umlab
