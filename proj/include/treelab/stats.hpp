#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "treelab/common.hpp"

namespace treelab {

/// Pairwise (cascade) sum: order-independent up to association, so results
/// do not depend on how replicates were scheduled across threads.
inline double pairwise_sum(std::span<const double> xs) {
    if (xs.size() <= 8) {
        double s = 0;
        for (double x : xs) s += x;
        return s;
    }
    std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

struct SampleStats {
    std::size_t count = 0;
    double mean = 0;
    double variance = 0;  // unbiased
    double std_error = 0;
    double skewness = 0;
    double excess_kurtosis = 0;
};

inline SampleStats summarize(std::span<const double> xs) {
    SampleStats s;
    s.count = xs.size();
    if (xs.empty()) return s;
    double n = static_cast<double>(xs.size());
    s.mean = pairwise_sum(xs) / n;
    std::vector<double> d2(xs.size()), d3(xs.size()), d4(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double d = xs[i] - s.mean;
        d2[i] = d * d;
        d3[i] = d2[i] * d;
        d4[i] = d2[i] * d2[i];
    }
    double m2 = pairwise_sum(d2) / n;
    double m3 = pairwise_sum(d3) / n;
    double m4 = pairwise_sum(d4) / n;
    s.variance = xs.size() > 1 ? m2 * n / (n - 1.0) : 0.0;
    s.std_error = std::sqrt(s.variance / n);
    if (m2 > 0) {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return s;
}

/// Survival function of the chi-square distribution, closed form:
/// finite sum for even dof, erfc-based sum for odd dof.
inline double chi_square_survival(unsigned dof, double x) {
    if (x <= 0.0) return 1.0;
    double h = 0.5 * x;
    if (dof % 2 == 0) {
        double term = std::exp(-h);
        double acc = term;
        for (unsigned j = 1; j < dof / 2; ++j) {
            term *= h / j;
            acc += term;
        }
        return std::min(1.0, acc);
    }
    // Q(2k+1, x) = erfc(sqrt(h)) + e^{-h} sum_{j=1..k} h^{j-1/2} / Gamma(j+1/2)
    double acc = std::erfc(std::sqrt(h));
    double term = std::exp(-h) * std::sqrt(h) / std::sqrt(M_PI) * 2.0;
    for (unsigned j = 1; j <= dof / 2; ++j) {
        acc += term;
        term *= h / (j + 0.5);
    }
    return std::min(1.0, acc);
}

struct ChiSquareResult {
    double statistic = 0;
    unsigned dof = 0;
    double p_value = 1;
};

/// Goodness-of-fit against expected category probabilities.
inline ChiSquareResult chi_square_test(std::span<const std::uint64_t> observed,
                                       std::span<const double> probs) {
    if (observed.size() != probs.size() || observed.empty())
        throw ParameterDomain("need matching nonempty category vectors");
    std::uint64_t total = 0;
    for (auto o : observed) total += o;
    ChiSquareResult r;
    r.dof = static_cast<unsigned>(observed.size() - 1);
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double expect = probs[i] * static_cast<double>(total);
        if (expect <= 0.0) throw ParameterDomain("zero expected count");
        double d = static_cast<double>(observed[i]) - expect;
        r.statistic += d * d / expect;
    }
    r.p_value = chi_square_survival(r.dof, r.statistic);
    return r;
}

/// Asymptotic Kolmogorov survival Q(lambda) = 2 sum (-1)^{j-1} e^{-2 j^2 lambda^2}.
inline double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double acc = 0.0;
    for (int j = 1; j <= 100; ++j) {
        double term = 2.0 * std::exp(-2.0 * j * j * lambda * lambda);
        acc += (j % 2 == 1) ? term : -term;
        if (term < 1e-16) break;
    }
    return std::clamp(acc, 0.0, 1.0);
}

struct KsResult {
    double statistic = 0;
    double p_value = 1;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw ParameterDomain("empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    double ne = std::sqrt(na * nb / (na + nb));
    return {d, kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d)};
}

}  // namespace treelab
