#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "treelab/common.hpp"
#include "treelab/rng.hpp"

namespace treelab {

/// Critical offspring distribution of a conditioned Galton-Watson tree.
///
/// Finite-support laws hold an explicit probability vector; the geometric and
/// power-law families keep their parametric form so sampling stays exact on
/// the unbounded support.
class OffspringDistribution {
  public:
    enum class Family { Finite, Binary, Geometric, PowerLaw };

    static OffspringDistribution binary() {
        OffspringDistribution d;
        d.family_ = Family::Binary;
        d.probs_ = {0.5, 0.0, 0.5};
        d.mean_ = 1.0;
        d.variance_ = 1.0;
        d.span_ = 2;
        return d;
    }

    /// Shifted geometric p(k) = q(1-q)^k, criticalized to q = 1/2.
    static OffspringDistribution geometric() {
        OffspringDistribution d;
        d.family_ = Family::Geometric;
        d.mean_ = 1.0;
        d.variance_ = 2.0;
        d.span_ = 1;
        return d;
    }

    /// p(k) = k^{-1-gamma}/zeta(gamma) for k >= 1, p(0) = 1 - zeta(1+gamma)/zeta(gamma).
    /// Critical by construction; infinite variance for gamma < 2 (stable domain).
    static OffspringDistribution power_law(double gamma) {
        if (!(gamma > 1.0)) throw ParameterDomain("power-law exponent must exceed 1");
        OffspringDistribution d;
        d.family_ = Family::PowerLaw;
        d.gamma_ = gamma;
        d.zeta_gamma_ = std::riemann_zeta(gamma);
        d.p0_ = 1.0 - std::riemann_zeta(1.0 + gamma) / d.zeta_gamma_;
        d.mean_ = 1.0;
        d.variance_ = gamma > 2.0 ? std::riemann_zeta(gamma - 1.0) / d.zeta_gamma_ - 1.0
                                  : std::numeric_limits<double>::infinity();
        d.span_ = 1;
        return d;
    }

    Family family() const { return family_; }
    double mean() const { return mean_; }
    double variance() const { return variance_; }
    double stddev() const { return std::sqrt(variance_); }
    std::uint32_t span() const { return span_; }

    double prob(std::uint32_t k) const {
        switch (family_) {
            case Family::Binary:
            case Family::Finite:
                return k < probs_.size() ? probs_[k] : 0.0;
            case Family::Geometric:
                return std::ldexp(1.0, -static_cast<int>(k) - 1);
            case Family::PowerLaw:
                return k == 0 ? p0_ : std::pow(static_cast<double>(k), -1.0 - gamma_) / zeta_gamma_;
        }
        return 0.0;
    }

    /// True when P(|tau| = p) > 0: p = 1 (mod span), interpreting the usual
    /// lattice condition gcd{k : p(k) > 0, k >= 1} on the progeny size.
    bool feasible_size(std::uint64_t p) const { return p >= 1 && (p - 1) % span_ == 0; }

    std::uint32_t sample(CounterRng& rng) const {
        switch (family_) {
            case Family::Binary:
                return rng.next_bit() ? 2u : 0u;
            case Family::Geometric: {
                // floor(log2 of a uniform) without the log: count leading draws
                // is wasteful, the closed inverse CDF is one log.
                double u = rng.next_double_pos();
                double k = std::floor(-std::log2(u));
                return k < 4096.0 ? static_cast<std::uint32_t>(k) : 4096u;
            }
            case Family::Finite: {
                double u = rng.next_double();
                double acc = 0.0;
                for (std::size_t k = 0; k + 1 < probs_.size(); ++k) {
                    acc += probs_[k];
                    if (u < acc) return static_cast<std::uint32_t>(k);
                }
                return static_cast<std::uint32_t>(probs_.size() - 1);
            }
            case Family::PowerLaw: {
                // Lazy inverse-CDF walk; expected cost is O(1) since the mean is 1.
                double u = rng.next_double();
                if (u < p0_) return 0;
                double acc = p0_;
                for (std::uint32_t k = 1;; ++k) {
                    acc += std::pow(static_cast<double>(k), -1.0 - gamma_) / zeta_gamma_;
                    if (u < acc || k == UINT32_MAX) return k;
                }
            }
        }
        return 0;
    }

    /// Probability vector up to max_k inclusive (exact law enumeration helper).
    std::vector<double> prob_vector(std::uint32_t max_k) const {
        std::vector<double> v(max_k + 1);
        for (std::uint32_t k = 0; k <= max_k; ++k) v[k] = prob(k);
        return v;
    }

    std::string describe() const {
        switch (family_) {
            case Family::Binary:
                return "binary(1/2)";
            case Family::Geometric:
                return "geometric(1/2)";
            case Family::PowerLaw:
                return "powerlaw(" + std::to_string(gamma_) + ")";
            case Family::Finite:
                return "finite[" + std::to_string(probs_.size()) + "]";
        }
        return "?";
    }

    friend OffspringDistribution criticalize(const std::vector<double>& weights);

  private:
    Family family_ = Family::Finite;
    std::vector<double> probs_;
    double mean_ = 0, variance_ = 0;
    double gamma_ = 0, zeta_gamma_ = 0, p0_ = 0;
    std::uint32_t span_ = 1;
};

namespace detail {

inline double weighted_gen(const std::vector<double>& w, double q) {
    // g(q) = sum w_k q^k, Horner form.
    double acc = 0.0;
    for (std::size_t k = w.size(); k-- > 0;) acc = acc * q + w[k];
    return acc;
}

inline double weighted_gen_deriv(const std::vector<double>& w, double q) {
    double acc = 0.0;
    for (std::size_t k = w.size(); k-- > 1;) acc = acc * q + w[k] * static_cast<double>(k);
    return acc;
}

}  // namespace detail

/// Normalize a nonnegative weight sequence into the critical probability law
/// with the same conditioned-tree distribution: find the root q of
/// g(q) = q g'(q) and tilt p(k) = w_k q^k / g(q).
inline OffspringDistribution criticalize(const std::vector<double>& weights) {
    if (weights.empty() || weights[0] <= 0.0)
        throw NonGenericWeights("weights need p(0) > 0");
    bool has_branching = false;
    for (std::size_t k = 2; k < weights.size(); ++k)
        if (weights[k] > 0.0) has_branching = true;
    if (!has_branching)
        throw NonGenericWeights("no supported k >= 2; total progeny cannot be conditioned");
    for (double w : weights)
        if (w < 0.0 || !std::isfinite(w)) throw NonGenericWeights("weights must be finite and >= 0");

    // phi(q) = q g'(q) - g(q) is -w_0 < 0 at q = 0 and eventually positive for
    // polynomial g; expand the bracket then bisect.
    auto phi = [&](double q) {
        return q * detail::weighted_gen_deriv(weights, q) - detail::weighted_gen(weights, q);
    };
    double lo = 0.0, hi = 1.0;
    int expansions = 0;
    while (phi(hi) < 0.0) {
        hi *= 2.0;
        if (!std::isfinite(detail::weighted_gen(weights, hi)) || ++expansions > 2100)
            throw DivergentSeries("generating function overflows before criticality root");
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (phi(mid) < 0.0 ? lo : hi) = mid;
        if (hi - lo <= 1e-15 * hi) break;
    }
    double q = 0.5 * (lo + hi);
    double g = detail::weighted_gen(weights, q);

    OffspringDistribution d;
    d.family_ = OffspringDistribution::Family::Finite;
    d.probs_.resize(weights.size());
    double qk = 1.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        d.probs_[k] = weights[k] * qk / g;
        qk *= q;
    }
    double mean = 0, m2 = 0, total = 0;
    std::uint32_t span = 0;
    for (std::size_t k = 0; k < d.probs_.size(); ++k) {
        total += d.probs_[k];
        mean += static_cast<double>(k) * d.probs_[k];
        m2 += static_cast<double>(k) * static_cast<double>(k) * d.probs_[k];
        if (k >= 1 && d.probs_[k] > 0.0)
            span = std::gcd(span, static_cast<std::uint32_t>(k));
    }
    d.mean_ = mean;
    d.variance_ = m2 - mean * mean;
    d.span_ = span == 0 ? 1 : span;
    if (std::abs(total - 1.0) > 1e-12 || std::abs(mean - 1.0) > 1e-12)
        throw NonGenericWeights("criticalization did not converge");
    // Binary weight pairs tilt to the fair coin exactly; snap and keep the
    // single-bit sampler.
    if (d.probs_.size() == 3 && d.probs_[1] == 0.0) {
        d.family_ = OffspringDistribution::Family::Binary;
        d.probs_ = {0.5, 0.0, 0.5};
        d.mean_ = 1.0;
        d.variance_ = 1.0;
    }
    return d;
}

}  // namespace treelab
