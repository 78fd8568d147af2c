#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "treelab/common.hpp"
#include "treelab/rng.hpp"

namespace treelab {

/// E[Z_beta] = (1 / 2 sqrt(alpha)) Gamma(beta - 1/2) / Gamma(beta), beta > 1/2.
inline double expected_z(double beta, double alpha) {
    if (!(beta > 0.5)) throw BetaOutOfRange("E[Z_beta] finite only for beta > 1/2");
    if (!(alpha > 0.0)) throw ParameterDomain("alpha must be positive");
    return 0.5 / std::sqrt(alpha) * std::exp(std::lgamma(beta - 0.5) - std::lgamma(beta));
}

/// E[Z_beta^H] = (1 / gamma kappa^{1/gamma}) Gamma(beta - 1/gamma) /
/// Gamma(beta + 1 - 2/gamma) for the stable height process, beta > 1/gamma.
/// At gamma = 2, kappa = alpha this reduces to expected_z.
inline double expected_z_H(double beta, double gamma, double kappa) {
    if (!(gamma > 1.0 && gamma <= 2.0)) throw ParameterDomain("gamma must lie in (1,2]");
    if (!(kappa > 0.0)) throw ParameterDomain("kappa must be positive");
    if (!(beta > 1.0 / gamma)) throw BetaOutOfRange("E[Z_beta^H] finite only for beta > 1/gamma");
    return std::exp(std::lgamma(beta - 1.0 / gamma) - std::lgamma(beta + 1.0 - 2.0 / gamma)) /
           (gamma * std::pow(kappa, 1.0 / gamma));
}

/// E[E_1^a E_2^b / S_m^c] for i.i.d. unit exponentials, S_m their sum:
/// Gamma(1+a) Gamma(1+b) Gamma(m+a+b-c) / Gamma(m+a+b), needs m+a+b > c.
inline double exp_gamma_moment(unsigned m, double a, double b, double c) {
    if (m < 2) throw ParameterDomain("need m >= 2");
    if (a < 0 || b < 0 || c < 0 || !(m + a + b > c)) throw ParameterDomain("need m+a+b > c >= 0");
    return std::exp(std::lgamma(1.0 + a) + std::lgamma(1.0 + b) + std::lgamma(m + a + b - c) -
                    std::lgamma(static_cast<double>(m) + a + b));
}

/// Monte Carlo companion of exp_gamma_moment for cross-checks.
struct MonteCarloEstimate {
    double mean = 0;
    double std_error = 0;
};
inline MonteCarloEstimate exp_gamma_moment_mc(unsigned m, double a, double b, double c,
                                              std::uint64_t draws, CounterRng& rng) {
    double sum = 0, sumsq = 0;
    for (std::uint64_t i = 0; i < draws; ++i) {
        double e1 = rng.next_exponential();
        double e2 = rng.next_exponential();
        double s = e1 + e2;
        for (unsigned j = 2; j < m; ++j) s += rng.next_exponential();
        double x = std::pow(e1, a) * std::pow(e2, b) / std::pow(s, c);
        sum += x;
        sumsq += x * x;
    }
    double n = static_cast<double>(draws);
    double mean = sum / n;
    double var = (sumsq - n * mean * mean) / (n - 1.0);
    return {mean, std::sqrt(var / n)};
}

/// E[1/(1+X)] for X ~ Binomial(n, p): (1 - (1-p)^{n+1}) / (p(n+1)).
inline double binomial_inverse_moment(unsigned n, double p) {
    if (!(p > 0.0 && p < 1.0)) throw ParameterDomain("p must lie in (0,1)");
    return (1.0 - std::pow(1.0 - p, n + 1)) / (p * (n + 1));
}

/// Full-pmf enumeration of E[g(X)] for X ~ Binomial(n, p).
template <typename G>
inline double binomial_expectation(unsigned n, double p, G&& g) {
    double acc = 0.0;
    double logp = std::log(p), logq = std::log1p(-p);
    for (unsigned k = 0; k <= n; ++k) {
        double logw = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                      k * logp + (n - k) * logq;
        acc += std::exp(logw) * g(k);
    }
    return acc;
}

/// Bound (i) of the binomial lemma: E[(2X+1)^{-a}] <= (1 ^ 1/(p(n+1)))^a.
inline bool binomial_bound_holds(unsigned n, double p, double a, double slack = 1e-12) {
    double lhs = binomial_expectation(n, p, [a](unsigned k) {
        return std::pow(2.0 * k + 1.0, -a);
    });
    double rhs = std::pow(std::min(1.0, 1.0 / (p * (n + 1))), a);
    return lhs <= rhs + slack;
}

/// (n+1)^{s-1} <= Gamma(n+s)/Gamma(n+1) <= n^{s-1} for n >= 1, s in [0,1].
inline bool gamma_ratio_bracket_holds(unsigned n, double s, double slack = 1e-12) {
    if (n < 1 || s < 0.0 || s > 1.0) throw ParameterDomain("need n >= 1 and s in [0,1]");
    double ratio = std::exp(std::lgamma(n + s) - std::lgamma(n + 1.0));
    double lo = std::pow(n + 1.0, s - 1.0);
    double hi = std::pow(static_cast<double>(n), s - 1.0);
    return lo <= ratio + slack && ratio <= hi + slack;
}

}  // namespace treelab
