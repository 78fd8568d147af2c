#include <catch2/catch_amalgamated.hpp>

#include "support/oracles.hpp"
#include "treelab/functionals.hpp"
#include "treelab/sampler.hpp"

using namespace treelab;

namespace {
const std::vector<std::uint32_t> kCherry{2, 0, 0};
const std::vector<std::uint32_t> kCaterpillar{2, 2, 0, 0, 0};

Tree random_tree(std::uint64_t p, CounterRng& rng) {
    static const OffspringDistribution geo = OffspringDistribution::geometric();
    return sample_conditioned_gw(geo, p, rng);
}
}  // namespace

TEST_CASE("measure A on the hand examples") {
    Tree cherry = tree_from_degrees(kCherry);
    CHECK(measure_A(cherry, WeightFunction::constant(1.0)) == 5.0);
    CHECK(measure_A(cherry, WeightFunction::power(1.0)) == Catch::Approx(11.0 / 3.0));

    Tree leaf = tree_from_degrees(std::vector<std::uint32_t>{0});
    CHECK(measure_A(leaf, WeightFunction::power(-0.3)) == 1.0);
    CHECK(measure_A(leaf, WeightFunction::power(2.0)) == 1.0);
}

TEST_CASE("power convention vanishes at zero") {
    auto f = WeightFunction::power(0.0);
    CHECK(f(0.0) == 0.0);
    CHECK(f(1.0) == 1.0);
    auto g = WeightFunction::power(-0.25);
    CHECK(g(0.0) == 0.0);
    CHECK(g(0.5) == Catch::Approx(std::pow(0.5, -0.25)));
}

TEST_CASE("additive functional equals the toll sum and the recursion") {
    Tree cherry = tree_from_degrees(kCherry);
    auto id = [](std::uint64_t n) { return static_cast<double>(n); };
    CHECK(additive_functional(cherry, id) == 5.0);
    CHECK(additive_functional(cherry, id) ==
          measure_A(cherry, WeightFunction::constant(1.0)));
    auto sq = [](std::uint64_t n) { return static_cast<double>(n) * n; };
    CHECK(additive_functional(cherry, sq) == 11.0);
    // |t|^{beta+1/2} A_n(x^{beta-1}) with beta = 2 is the same sum
    CHECK(std::pow(3.0, 2.5) * measure_A_scaled(cherry, WeightFunction::power(1.0)) ==
          Catch::Approx(11.0));

    Tree leaf = tree_from_degrees(std::vector<std::uint32_t>{0});
    CHECK(additive_functional(leaf, sq) == 1.0);  // F({root}) = b_1

    CounterRng rng(61, 0);
    for (std::uint64_t n : {10ull, 100ull, 4999ull}) {
        Tree t = sample_uniform_full_binary(n, rng);
        double direct = additive_functional(t, sq);
        double recursive = additive_functional_by_recursion(t, sq);
        REQUIRE(direct == Catch::Approx(recursive).epsilon(1e-12));
    }

    Tree chain = tree_from_degrees(std::vector<std::uint32_t>{1, 0});
    CHECK_THROWS_AS(additive_functional_by_recursion(chain, id), NotFullBinary);
    CHECK_THROWS_AS(additive_functional(cherry, std::vector<double>{1.0, 2.0}), TollUndefined);
}

TEST_CASE("classic indices on the cherry and caterpillar") {
    IndexBundle ch = classic_indices(tree_from_degrees(kCherry));
    CHECK(ch.total_path_length == 2);
    CHECK(ch.wiener == 8);
    CHECK(ch.sackin == 2);
    CHECK(ch.colless == 0);
    CHECK(ch.cophenetic == 0);
    CHECK(ch.chi == 1);

    IndexBundle cat = classic_indices(tree_from_degrees(kCaterpillar));
    CHECK(cat.total_path_length == 6);
    CHECK(cat.sackin == 5);
    CHECK(cat.chi == 2);
    CHECK(cat.colless == 1);
    CHECK(cat.cophenetic == 2);

    IndexBundle leaf = classic_indices(tree_from_degrees(std::vector<std::uint32_t>{0}));
    CHECK(leaf.total_path_length == 0);
    CHECK(leaf.wiener == 0);
    CHECK(leaf.sackin == 0);

    Tree chain = tree_from_degrees(std::vector<std::uint32_t>{1, 0});
    CHECK_FALSE(classic_indices(chain).binary_indices_valid);
    CHECK_THROWS_AS(chi_statistic(chain), NotFullBinary);
}

TEST_CASE("fast indices equal brute force on random trees") {
    CounterRng rng(67, 0);
    for (int i = 0; i < 60; ++i) {
        Tree t = i % 2 == 0 ? random_tree(1 + 2 * rng.below(60), rng)
                            : sample_uniform_full_binary(rng.below(60), rng);
        IndexBundle fast = classic_indices(t);
        IndexBundle brute = classic_indices_brute_force(t);
        REQUIRE(fast.total_path_length == brute.total_path_length);
        REQUIRE(fast.wiener == brute.wiener);
        REQUIRE(fast.shape == Catch::Approx(brute.shape).margin(1e-9));
        if (fast.binary_indices_valid) {
            REQUIRE(fast.sackin == brute.sackin);
            REQUIRE(fast.colless == brute.colless);
            REQUIRE(fast.cophenetic == brute.cophenetic);
            REQUIRE(fast.chi == brute.chi);
        }
    }
}

TEST_CASE("power sums on the hand examples and the beta = 1 identity") {
    Tree cherry = tree_from_degrees(kCherry);
    Tree cat = tree_from_degrees(kCaterpillar);
    CHECK(power_sum(cherry, 2.0) == 11.0);
    CHECK(power_sum(cat, 2.0) == 37.0);
    CHECK(power_sum_exact(cat, 2) == wide_int{37});

    CounterRng rng(71, 0);
    for (int i = 0; i < 20; ++i) {
        Tree t = random_tree(1 + 2 * rng.below(200), rng);
        IndexBundle b = classic_indices(t);
        REQUIRE(power_sum(t, 1.0) ==
                Catch::Approx(static_cast<double>(b.total_path_length + t.node_count())));
    }
}

TEST_CASE("D_k identity route, mrca-counting route and enumeration agree") {
    Tree cherry = tree_from_degrees(kCherry);
    CHECK(d_k(cherry, 1) == wide_int{2});
    CHECK(d_k(cherry, 2) == wide_int{2});
    Tree cat = tree_from_degrees(kCaterpillar);
    CHECK(d_k(cat, 2) == wide_int{12});

    CounterRng rng(73, 0);
    for (int i = 0; i < 40; ++i) {
        Tree t = random_tree(1 + 2 * rng.below(6), rng);  // <= 11 nodes
        for (unsigned k = 1; k <= 3; ++k) {
            wide_int fast = d_k(t, k);
            REQUIRE(fast == d_k_by_mrca_counting(t, k));
            REQUIRE(fast == testsupport::d_k_by_enumeration(t, k));
        }
    }
    for (int i = 0; i < 10; ++i) {
        Tree t = random_tree(1 + 2 * rng.below(500), rng);
        for (unsigned k = 1; k <= 8; ++k) REQUIRE(d_k(t, k) == d_k_by_mrca_counting(t, k));
    }
    CHECK_THROWS_AS(d_k(cherry, 9), KTooLarge);
    CHECK_THROWS_AS(d_k(cherry, 0), KTooLarge);
}

TEST_CASE("leafless-tree identities of full binary trees") {
    CounterRng rng(79, 0);
    for (int i = 0; i < 25; ++i) {
        Tree t = sample_uniform_full_binary(1 + rng.below(80), rng);
        Tree star = strip_leaves(t);
        REQUIRE(star.node_count() == (t.node_count() - 1) / 2);
        // |t*_v| = (|t_v| - 1) / 2 along the preserved internal nodes
        std::vector<std::uint32_t> internal;
        for (std::uint32_t v = 0; v < t.node_count(); ++v)
            if (!t.is_leaf(v)) internal.push_back(v);
        REQUIRE(internal.size() == star.node_count());
        for (std::size_t j = 0; j < internal.size(); ++j)
            REQUIRE(star.subtree_size[j] == (t.subtree_size[internal[j]] - 1) / 2);
    }
}

TEST_CASE("power sums grow monotonically under leaf attachment") {
    CounterRng rng(83, 0);
    for (double a : {-0.4, 0.0, 0.7}) {
        std::vector<std::uint32_t> degs{0};
        Tree t = tree_from_degrees(degs);
        double prev = power_sum(t, 1.0 + a);
        for (int step = 0; step < 60; ++step) {
            // attach a new leaf as an extra child of a random node
            std::uint32_t target = static_cast<std::uint32_t>(rng.below(t.node_count()));
            std::vector<std::uint32_t> next;
            for (std::uint32_t v = 0; v < t.node_count(); ++v) {
                next.push_back(t.degrees[v] + (v == target ? 1 : 0));
                if (v == target) next.push_back(0);
            }
            t = tree_from_degrees(next);
            double cur = power_sum(t, 1.0 + a);
            REQUIRE(cur >= prev - 1e-12);
            prev = cur;
        }
    }
}

TEST_CASE("shape functional is the log sum") {
    Tree cat = tree_from_degrees(kCaterpillar);
    double expect = std::log(5.0) + std::log(3.0);
    CHECK(classic_indices(cat).shape == Catch::Approx(expect));
}
