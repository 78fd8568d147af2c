#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "treelab/offspring.hpp"

using namespace treelab;

TEST_CASE("criticalize tilts binary weights to the fair coin") {
    auto d = criticalize({1.0, 0.0, 1.0});
    CHECK(d.prob(0) == 0.5);
    CHECK(d.prob(2) == 0.5);
    CHECK(d.mean() == Catch::Approx(1.0).margin(1e-12));
    CHECK(d.variance() == Catch::Approx(1.0).margin(1e-12));
    CHECK(d.span() == 2);

    // already critical: unnormalized scaling of (1/2, 0, 1/2) is a fixed point
    auto again = criticalize({0.5, 0.0, 0.5});
    CHECK(again.prob(0) == 0.5);
    CHECK(again.prob(2) == 0.5);
}

TEST_CASE("criticalized truncated geometric weights stay geometric") {
    // p(k) = 2^-(k+1) is critical already; a long truncation must come back
    // nearly unchanged.
    std::vector<double> w(40);
    for (std::size_t k = 0; k < w.size(); ++k) w[k] = std::ldexp(1.0, -static_cast<int>(k) - 1);
    auto d = criticalize(w);
    for (std::uint32_t k = 0; k < 10; ++k)
        CHECK(d.prob(k) == Catch::Approx(std::ldexp(1.0, -static_cast<int>(k) - 1)).epsilon(1e-9));
    CHECK(d.span() == 1);
}

TEST_CASE("Poisson-type weights criticalize to Poisson(1)") {
    std::vector<double> w(35);
    double fact = 1;
    for (std::size_t k = 0; k < w.size(); ++k) {
        w[k] = 1.0 / fact;
        fact *= static_cast<double>(k + 1);
    }
    auto d = criticalize(w);
    const double e1 = std::exp(-1.0);
    double f = 1;
    for (std::uint32_t k = 0; k < 8; ++k) {
        CHECK(d.prob(k) == Catch::Approx(e1 / f).epsilon(1e-9));
        f *= static_cast<double>(k + 1);
    }
    CHECK(d.mean() == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("non-generic and divergent weight sequences are rejected") {
    CHECK_THROWS_AS(criticalize({1.0, 0.9}), NonGenericWeights);       // no k >= 2 support
    CHECK_THROWS_AS(criticalize({}), NonGenericWeights);               // empty
    CHECK_THROWS_AS(criticalize({0.0, 0.0, 1.0}), NonGenericWeights);  // p(0) = 0
    CHECK_THROWS_AS(criticalize({1e308, 0.0, 5e-324}), DivergentSeries);
}

TEST_CASE("parametric families report the documented laws") {
    auto bin = OffspringDistribution::binary();
    CHECK(bin.prob(0) == 0.5);
    CHECK(bin.prob(1) == 0.0);
    CHECK(bin.prob(2) == 0.5);
    CHECK(bin.span() == 2);
    CHECK(bin.feasible_size(7));
    CHECK_FALSE(bin.feasible_size(2));

    auto geo = OffspringDistribution::geometric();
    CHECK(geo.prob(0) == 0.5);
    CHECK(geo.prob(3) == Catch::Approx(1.0 / 16.0));
    CHECK(geo.variance() == Catch::Approx(2.0));
    CHECK(geo.span() == 1);

    auto pl = OffspringDistribution::power_law(1.5);
    // p(0) = 1 - zeta(2.5)/zeta(1.5), p(k) = k^{-2.5}/zeta(1.5)
    const double z15 = std::riemann_zeta(1.5), z25 = std::riemann_zeta(2.5);
    CHECK(pl.prob(0) == Catch::Approx(1.0 - z25 / z15).epsilon(1e-12));
    CHECK(pl.prob(2) == Catch::Approx(std::pow(2.0, -2.5) / z15).epsilon(1e-12));
    CHECK(std::isinf(pl.variance()));
    // criticality: the mean telescopes to 1 by construction
    double mean = 0;
    for (std::uint32_t k = 1; k < 2000000; ++k) mean += k * pl.prob(k);
    CHECK(mean == Catch::Approx(1.0).margin(2e-3));  // slow zeta tail
}

TEST_CASE("family samplers hit their laws") {
    CounterRng rng(5, 0);
    auto geo = OffspringDistribution::geometric();
    const int n = 200000;
    std::array<int, 6> counts{};
    for (int i = 0; i < n; ++i) {
        auto k = geo.sample(rng);
        if (k < counts.size()) ++counts[k];
    }
    for (std::size_t k = 0; k < counts.size(); ++k) {
        double p = std::ldexp(1.0, -static_cast<int>(k) - 1);
        CHECK(std::abs(counts[k] - n * p) < 5 * std::sqrt(n * p * (1 - p)));
    }

    auto pl = OffspringDistribution::power_law(1.5);
    double mean = 0;
    for (int i = 0; i < n; ++i) mean += pl.sample(rng);
    // infinite variance: the running mean is noisy, just a sanity corridor
    CHECK(mean / n > 0.5);
    CHECK(mean / n < 2.0);
}
