#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

namespace zoolab {

// Monte Carlo result record: {value, stderr, horizon, trials, method}.
struct Estimate {
    double value = 0.0;
    double stderr_ = 0.0;
    int64_t horizon = 0;
    int64_t trials = 0;
    bool converged = true;
    std::string method;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool contains(double x) const { return lo <= x && x <= hi; }
    double width() const { return hi - lo; }
};

// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(uint64_t successes, uint64_t n, double z = 1.959964) {
    if (n == 0) return {0.0, 1.0};
    double p = double(successes) / double(n);
    double z2 = z * z;
    double denom = 1.0 + z2 / double(n);
    double center = (p + z2 / (2.0 * double(n))) / denom;
    double half = z * std::sqrt(p * (1.0 - p) / double(n) + z2 / (4.0 * double(n) * double(n))) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

inline double binomial_stderr(double p, uint64_t n) {
    if (n == 0) return 1.0;
    return std::sqrt(std::max(0.0, p * (1.0 - p)) / double(n));
}

// Running mean/variance accumulator (Welford).
struct MeanVar {
    int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double m4_sum = 0.0; // raw sum of (x-mean)^4 updated naively at finish; see note below

    void add(double x) {
        ++n;
        double d = x - mean;
        mean += d / double(n);
        m2 += d * (x - mean);
    }
    double variance() const { return n > 1 ? m2 / double(n - 1) : 0.0; }
    double stderr_of_mean() const { return n > 0 ? std::sqrt(variance() / double(n)) : 0.0; }
};

} // namespace zoolab
