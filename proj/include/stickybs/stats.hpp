#pragma once
// Sample statistics used by the test oracles and reports: moments, a
// two-sample Kolmogorov-Smirnov distance, and a least-squares slope.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace stickybs {

inline double mean(const std::vector<double>& v) {
    if (v.empty()) throw std::invalid_argument("mean of empty sample");
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Unbiased (n-1) sample standard deviation.
inline double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean(v), s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

inline double std_error(const std::vector<double>& v) {
    return sample_std(v) / std::sqrt(static_cast<double>(v.size()));
}

inline double skewness(const std::vector<double>& v) {
    double m = mean(v), s2 = 0.0, s3 = 0.0;
    for (double x : v) {
        double d = x - m;
        s2 += d * d;
        s3 += d * d * d;
    }
    double n = static_cast<double>(v.size());
    double sd = std::sqrt(s2 / n);
    return (s3 / n) / (sd * sd * sd);
}

inline double excess_kurtosis(const std::vector<double>& v) {
    double m = mean(v), s2 = 0.0, s4 = 0.0;
    for (double x : v) {
        double d = x - m;
        s2 += d * d;
        s4 += d * d * d * d;
    }
    double n = static_cast<double>(v.size());
    double var = s2 / n;
    return (s4 / n) / (var * var) - 3.0;
}

struct KsResult {
    double statistic = 0.0;  // sup |F_a - F_b|
    double threshold = 0.0;  // c(alpha) * sqrt((n+m)/(n*m))
    bool pass = false;
};

// Two-sample Kolmogorov-Smirnov test at significance `alpha`
// (asymptotic critical value c(alpha) = sqrt(-ln(alpha/2)/2)).
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b, double alpha = 0.01) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsResult res;
    res.statistic = d;
    res.threshold = std::sqrt(-std::log(alpha / 2.0) / 2.0) * std::sqrt((na + nb) / (na * nb));
    res.pass = res.statistic < res.threshold;
    return res;
}

// Least-squares slope of y against x.
inline double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("regression_slope: bad input");
    double mx = mean(x), my = mean(y), sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    return sxy / sxx;
}

}  // namespace stickybs
