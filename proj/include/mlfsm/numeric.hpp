#ifndef MLFSM_NUMERIC_HPP
#define MLFSM_NUMERIC_HPP

#include <cstddef>
#include <functional>
#include <vector>

namespace mlfsm {

// Pairwise (cascade) summation. Reduction order depends only on the element
// count, so results are bit-reproducible regardless of how callers chunk work.
template <typename F>
double pairwise_sum_fn(std::size_t lo, std::size_t hi, const F& value) {
    const std::size_t n = hi - lo;
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += value(i);
        return s;
    }
    const std::size_t mid = lo + n / 2;
    return pairwise_sum_fn(lo, mid, value) + pairwise_sum_fn(mid, hi, value);
}

inline double pairwise_sum(const std::vector<double>& v) {
    return pairwise_sum_fn(0, v.size(), [&](std::size_t i) { return v[i]; });
}

template <typename F>
double pairwise_mean(const std::vector<double>& v, const F& transform) {
    if (v.empty()) return 0.0;
    return pairwise_sum_fn(0, v.size(), [&](std::size_t i) { return transform(v[i]); }) /
           static_cast<double>(v.size());
}

inline double pairwise_mean(const std::vector<double>& v) {
    return pairwise_mean(v, [](double x) { return x; });
}

// Unbiased sample variance with pairwise reductions.
inline double sample_variance(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = pairwise_mean(v);
    const double ss = pairwise_sum_fn(0, v.size(), [&](std::size_t i) {
        const double d = v[i] - m;
        return d * d;
    });
    return ss / static_cast<double>(v.size() - 1);
}

} // namespace mlfsm

#endif
