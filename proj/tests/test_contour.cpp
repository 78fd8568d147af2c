#include <catch2/catch_amalgamated.hpp>

#include "support/oracles.hpp"
#include "treelab/contour.hpp"
#include "treelab/functionals.hpp"
#include "treelab/sampler.hpp"
#include "treelab/stats.hpp"

using namespace treelab;

namespace {
Tree random_tree(std::uint64_t p, CounterRng& rng) {
    static const OffspringDistribution geo = OffspringDistribution::geometric();
    return sample_conditioned_gw(geo, p, rng);
}

/// Midpoint-quadrature oracle for D_2 = (1/4) int m over [0, 2|t|]^2, with
/// m evaluated by scanning a dense sampling of the contour.
double d2_quadrature_oracle(const Contour& c, std::size_t grid) {
    const double T = static_cast<double>(c.duration());
    const std::size_t fine = 16 * c.duration();
    std::vector<double> dense(fine + 1);
    for (std::size_t i = 0; i <= fine; ++i)
        dense[i] = c.eval(T * static_cast<double>(i) / static_cast<double>(fine));
    auto m = [&](double a, double b) {
        std::size_t ia = static_cast<std::size_t>(std::ceil(a / T * fine));
        std::size_t ib = static_cast<std::size_t>(std::floor(b / T * fine));
        double mn = std::min(c.eval(a), c.eval(b));
        for (std::size_t i = ia; i <= ib && i <= fine; ++i) mn = std::min(mn, dense[i]);
        return mn;
    };
    const double step = T / static_cast<double>(grid);
    double acc = 0;
    for (std::size_t i = 0; i < grid; ++i) {
        double u = (static_cast<double>(i) + 0.5) * step;
        acc += m(u, u);
        for (std::size_t j = i + 1; j < grid; ++j) {
            double v = (static_cast<double>(j) + 0.5) * step;
            acc += 2.0 * m(u, v);
        }
    }
    return 0.25 * acc * step * step;
}
}  // namespace

TEST_CASE("contour heights on the hand examples") {
    Contour leaf(tree_from_degrees(std::vector<std::uint32_t>{0}));
    CHECK(leaf.heights() == std::vector<std::int32_t>{0, 0, 0});

    Tree cherry_t = tree_from_degrees(std::vector<std::uint32_t>{2, 0, 0});
    Contour cherry(cherry_t);
    CHECK(cherry.heights() == std::vector<std::int32_t>{0, 1, 0, 1, 0, 0, 0});

    Tree cat_t = tree_from_degrees(std::vector<std::uint32_t>{2, 2, 0, 0, 0});
    Contour cat(cat_t);
    CHECK(cat.heights() == std::vector<std::int32_t>{0, 1, 2, 1, 2, 1, 0, 1, 0, 0, 0});
}

TEST_CASE("exploration intervals partition the time axis") {
    CounterRng rng(97, 0);
    for (int trial = 0; trial < 25; ++trial) {
        Tree t = random_tree(1 + 2 * rng.below(150), rng);
        Contour c(t);
        // every interval has length 2; pieces tile [0, 2|t|]
        std::vector<std::pair<double, double>> pieces;
        for (std::uint32_t v = 0; v < t.node_count(); ++v) {
            double len = 0;
            for (auto [lo, hi] : c.interval(v)) {
                pieces.emplace_back(lo, hi);
                len += hi - lo;
            }
            REQUIRE(len == 2.0);
        }
        std::sort(pieces.begin(), pieces.end());
        REQUIRE(pieces.front().first == 0.0);
        REQUIRE(pieces.back().second == static_cast<double>(c.duration()));
        for (std::size_t i = 0; i + 1 < pieces.size(); ++i)
            REQUIRE(pieces[i].second == pieces[i + 1].first);
    }
}

TEST_CASE("the interval height bracket C <= d <= C + 1 holds densely") {
    CounterRng rng(101, 0);
    for (int trial = 0; trial < 15; ++trial) {
        Tree t = trial % 2 == 0 ? random_tree(1 + 2 * rng.below(1000), rng)
                                : sample_uniform_full_binary(rng.below(1000), rng);
        Contour c(t);
        auto depth = t.depths();
        for (std::uint32_t v = 0; v < t.node_count(); ++v) {
            for (auto [lo, hi] : c.interval(v)) {
                for (int q = 0; q < 8; ++q) {
                    double s = lo + (hi - lo) * (static_cast<double>(q) + 0.25) / 8.0;
                    double cs = c.eval(s);
                    REQUIRE(cs <= static_cast<double>(depth[v]) + 1e-12);
                    REQUIRE(static_cast<double>(depth[v]) <= cs + 1.0 + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("contour_min on the hand examples") {
    Contour cherry(tree_from_degrees(std::vector<std::uint32_t>{2, 0, 0}));
    CHECK(cherry.min_on(1.0, 3.0) == 0.0);
    CHECK(cherry.min_on(0.5, 0.5) == 0.5);
    CHECK(cherry.min_on(0.5, 1.0) == 0.5);
    Contour cat(tree_from_degrees(std::vector<std::uint32_t>{2, 2, 0, 0, 0}));
    CHECK(cat.min_on(2.0, 4.0) == 1.0);
    CHECK(cat.min_on(4.0, 2.0) == 1.0);
    CHECK_THROWS_AS(cat.min_on(-0.1, 2.0), OutOfDomain);
    CHECK_THROWS_AS(cat.min_on(0.0, 11.0), OutOfDomain);
}

TEST_CASE("exact contour functionals on the hand examples") {
    Contour leaf(tree_from_degrees(std::vector<std::uint32_t>{0}));
    CHECK(leaf.discrete_Dk(1).value == 0.0);
    CHECK(leaf.discrete_Dk(2).value == 0.0);
    CHECK(leaf.discrete_Dk(3).value == 0.0);

    Tree cherry_t = tree_from_degrees(std::vector<std::uint32_t>{2, 0, 0});
    Contour cherry(cherry_t);
    CHECK(cherry.discrete_Dk(1).value == 1.0);
    CHECK(cherry.discrete_Dk(2).value == Catch::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(cherry.dk_exact_num192(2) == 128);
    // sandwich with the exact D_k: D_1 - cal(D)_1 = 2 - 1, D_2 - cal(D)_2 = 2 - 2/3
    CHECK(static_cast<long long>(d_k(cherry_t, 1)) == 2);

    Tree cat_t = tree_from_degrees(std::vector<std::uint32_t>{2, 2, 0, 0, 0});
    Contour cat(cat_t);
    CHECK(cat.discrete_Dk(1).value == 4.0);
    CHECK(static_cast<long long>(d_k(cat_t, 1)) == 6);
}

TEST_CASE("quadrature oracle confirms the exact D_2 cell integrals") {
    CounterRng rng(103, 0);
    Contour cherry(tree_from_degrees(std::vector<std::uint32_t>{2, 0, 0}));
    CHECK(d2_quadrature_oracle(cherry, 384) == Catch::Approx(2.0 / 3.0).margin(2e-3));
    for (int trial = 0; trial < 4; ++trial) {
        Tree t = random_tree(9, rng);
        Contour c(t);
        double exact = c.discrete_Dk(2).value;
        double quad = d2_quadrature_oracle(c, 512);
        REQUIRE(quad == Catch::Approx(exact).epsilon(2e-2));
    }
}

TEST_CASE("Lemma d=D sandwich is exact for k in {1,2}") {
    CounterRng rng(107, 0);
    for (int trial = 0; trial < 30; ++trial) {
        Tree t = trial % 2 == 0 ? random_tree(1 + 2 * rng.below(400), rng)
                                : sample_uniform_full_binary(rng.below(400), rng);
        Contour c(t);
        for (unsigned k : {1u, 2u}) {
            // 0 <= D_k - cal(D)_k <= |t|^k, scaled by 192 in exact integers
            wide_int dk192 = 192 * d_k(t, k);
            wide_int num = c.dk_exact_num192(k);
            wide_int bound = 192;
            for (unsigned i = 0; i < k; ++i) bound *= static_cast<wide_int>(t.node_count());
            REQUIRE(dk192 - num >= 0);
            REQUIRE(dk192 - num <= bound);
        }
    }
}

TEST_CASE("sandwich for k = 3 within the quadrature tolerance") {
    CounterRng rng(109, 0);
    for (int trial = 0; trial < 6; ++trial) {
        Tree t = random_tree(1 + 2 * rng.below(25), rng);
        Contour c(t);
        auto [value, step, exact] = c.discrete_Dk(3, 8);
        REQUIRE_FALSE(exact);
        double n3 = std::pow(static_cast<double>(t.node_count()), 3.0);
        double tol = n3 * step;
        double gap = static_cast<double>(d_k(t, 3)) - value;
        REQUIRE(gap >= -tol);
        REQUIRE(gap <= n3 + tol);
    }
}

TEST_CASE("scaled contour sup-norm is stable across sizes (smoke)") {
    // (a_p/p) C(2ps) with a_p = sqrt(p): compare sup norms at p = 1001, 4001.
    CounterRng rng(113, 0);
    const int reps = 500;
    auto sup_scaled = [&](std::uint64_t p) {
        std::vector<double> sups(reps);
        for (int r = 0; r < reps; ++r) {
            Tree t = sample_uniform_full_binary((p - 1) / 2, rng);
            Contour c(t);
            std::int32_t mx = 0;
            for (auto h : c.heights()) mx = std::max(mx, h);
            sups[r] = static_cast<double>(mx) / std::sqrt(static_cast<double>(p));
        }
        return sups;
    };
    auto a = sup_scaled(1001);
    auto b = sup_scaled(4001);
    auto ks = ks_two_sample(a, b);
    CHECK(ks.p_value > 0.001);
}
