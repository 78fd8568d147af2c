#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "treelab/common.hpp"
#include "treelab/tree.hpp"

namespace treelab {

/// Weight function f on [0,1] for the measure A_t.  The power kind follows
/// the convention x^a 1_{(0,1]}(x): it vanishes at 0 for every a, including
/// a = 0 and negative a.
class WeightFunction {
  public:
    static WeightFunction power(double a) {
        WeightFunction f;
        f.kind_ = Kind::Power;
        f.a_ = a;
        return f;
    }
    static WeightFunction constant(double c) {
        WeightFunction f;
        f.kind_ = Kind::Constant;
        f.c_ = c;
        return f;
    }
    static WeightFunction callback(std::function<double(double)> fn) {
        WeightFunction f;
        f.kind_ = Kind::Callback;
        f.fn_ = std::move(fn);
        return f;
    }

    double operator()(double x) const {
        switch (kind_) {
            case Kind::Power:
                return x > 0.0 ? std::pow(x, a_) : 0.0;
            case Kind::Constant:
                return c_;
            case Kind::Callback:
                return fn_(x);
        }
        return 0.0;
    }

    bool is_constant() const { return kind_ == Kind::Constant; }
    double constant_value() const { return c_; }

  private:
    enum class Kind { Power, Constant, Callback };
    Kind kind_ = Kind::Constant;
    double a_ = 0, c_ = 0;
    std::function<double(double)> fn_;
};

/// A_t(f) = sum_v |t_v| f(|t_v| / |t|), one pass over the subtree-size cache.
inline double measure_A(const Tree& t, const WeightFunction& f) {
    double n = static_cast<double>(t.node_count());
    double acc = 0.0;
    for (std::uint32_t s : t.subtree_size) acc += static_cast<double>(s) * f(s / n);
    return acc;
}

/// Scaled measure A_n(f) = |t|^{-3/2} A_t(f).
inline double measure_A_scaled(const Tree& t, const WeightFunction& f) {
    return measure_A(t, f) * std::pow(static_cast<double>(t.node_count()), -1.5);
}

/// F(t) = sum_v b_{|t_v|} for a toll callback b(n), n = 1..|t|.
inline double additive_functional(const Tree& t, const std::function<double(std::uint64_t)>& toll) {
    double acc = 0.0;
    for (std::uint32_t s : t.subtree_size) acc += toll(s);
    return acc;
}

/// F(t) = sum_v b_{|t_v|} for a toll sequence b[1..], 1-indexed via b[n-1].
inline double additive_functional(const Tree& t, const std::vector<double>& toll) {
    double acc = 0.0;
    for (std::uint32_t s : t.subtree_size) {
        if (s > toll.size()) throw TollUndefined("toll undefined at n = " + std::to_string(s));
        acc += toll[s - 1];
    }
    return acc;
}

/// Same functional evaluated through the divide-and-conquer recursion
/// F(t) = F(t_1) + F(t_2) + b_{|t|}, F({root}) = b_1; full binary trees only.
inline double additive_functional_by_recursion(const Tree& t,
                                               const std::function<double(std::uint64_t)>& toll) {
    if (!t.is_full_binary()) throw NotFullBinary("recursion form needs a full binary tree");
    // Post-order over the flattened layout: children accumulate into parents.
    std::vector<double> acc(t.node_count(), 0.0);
    for (std::size_t v = t.node_count(); v-- > 0;) {
        acc[v] += toll(t.subtree_size[v]);
        if (v > 0) acc[t.parent[v]] += acc[v];
    }
    return acc[0];
}

/// Z*_beta(t) = sum_v |t_v|^beta.
inline double power_sum(const Tree& t, double beta) {
    double acc = 0.0;
    for (std::uint32_t s : t.subtree_size) acc += std::pow(static_cast<double>(s), beta);
    return acc;
}

/// Corollary-cvZ scaling |t|^{-(beta+1/2)} Z*_beta(t).
inline double power_sum_scaled(const Tree& t, double beta) {
    return power_sum(t, beta) * std::pow(static_cast<double>(t.node_count()), -(beta + 0.5));
}

/// Exact integer power sum sum_v |t_v|^k.
inline wide_int power_sum_exact(const Tree& t, unsigned k) {
    wide_int acc = 0;
    for (std::uint32_t s : t.subtree_size) {
        wide_int term = 1;
        for (unsigned i = 0; i < k; ++i) term *= s;
        acc += term;
    }
    return acc;
}

namespace detail {
inline void check_dk_domain(const Tree& t, unsigned k) {
    if (k == 0 || k > 8) throw KTooLarge("k must be in 1..8");
    double bits = (k + 1) * std::log2(static_cast<double>(t.node_count()) + 1.0);
    if (bits >= 126.0) throw KTooLarge("|t|^(k+1) exceeds 128-bit accumulation");
}
inline wide_int ipow(wide_int base, unsigned k) {
    wide_int r = 1;
    for (unsigned i = 0; i < k; ++i) r *= base;
    return r;
}
}  // namespace detail

/// D_k(t) = sum over k-tuples of the mrca depth, via the exact identity
/// D_k = sum_v |t_v|^k - |t|^k.
inline wide_int d_k(const Tree& t, unsigned k) {
    detail::check_dk_domain(t, k);
    return power_sum_exact(t, k) - detail::ipow(static_cast<wide_int>(t.node_count()), k);
}

/// D_k computed by the independent mrca-counting route: the number of
/// k-tuples whose mrca is exactly w equals |t_w|^k - sum over children
/// |t_c|^k; weight each count by depth(w).
inline wide_int d_k_by_mrca_counting(const Tree& t, unsigned k) {
    detail::check_dk_domain(t, k);
    auto depth = t.depths();
    wide_int acc = 0;
    for (std::size_t w = 0; w < t.node_count(); ++w) {
        wide_int count = detail::ipow(t.subtree_size[w], k);
        std::size_t c = w + 1;
        for (std::uint32_t i = 0; i < t.degrees[w]; ++i) {
            count -= detail::ipow(t.subtree_size[c], k);
            c += t.subtree_size[c];
        }
        acc += static_cast<wide_int>(depth[w]) * count;
    }
    return acc;
}

/// The classical index bundle.  P, W and the shape functional accept any
/// tree; S, C, Co and chi require a full binary tree.  Wiener and cophenetic
/// sums run over ordered pairs, matching the double sums they come from.
struct IndexBundle {
    long long total_path_length = 0;  // P
    long long wiener = 0;             // W
    long long sackin = 0;             // S
    long long colless = 0;            // C
    long long cophenetic = 0;         // Co
    long long chi = 0;                // chi
    double shape = 0;                 // sum_v log |t_v|
    bool binary_indices_valid = false;
};

inline long long chi_statistic(const Tree& t) {
    if (!t.is_full_binary()) throw NotFullBinary("chi needs a full binary tree");
    long long chi = 0;
    for (std::size_t v = 0; v < t.node_count(); ++v) {
        if (t.degrees[v] != 2) continue;
        std::uint32_t left = static_cast<std::uint32_t>(v + 1);
        std::uint32_t right = left + t.subtree_size[left];
        chi += std::min(t.subtree_size[left], t.subtree_size[right]);
    }
    return chi;
}

/// Fast path: every index through A_t(1) = sum |t_v| and sum |t_v|^2,
/// exact integer arithmetic throughout.
inline IndexBundle classic_indices(const Tree& t) {
    IndexBundle b;
    const long long n = static_cast<long long>(t.node_count());
    long long s1 = 0;
    wide_int s2 = 0;
    double shape = 0.0;
    for (std::uint32_t s : t.subtree_size) {
        s1 += s;
        s2 += static_cast<wide_int>(s) * s;
        shape += std::log(static_cast<double>(s));
    }
    b.total_path_length = s1 - n;
    b.wiener = static_cast<long long>(2 * static_cast<wide_int>(n) * s1 - 2 * s2);
    b.shape = shape;
    if (t.is_full_binary()) {
        b.binary_indices_valid = true;
        b.chi = chi_statistic(t);
        b.sackin = (s1 - 1) / 2;
        b.colless = (s1 - n - 2 * b.chi) / 2;
        b.cophenetic = static_cast<long long>(
            (s2 - static_cast<wide_int>(n) * n - n + 1) / 4);
    }
    return b;
}

/// Brute-force path, each index from its raw definition.  Meant for oracle
/// cross-checks on small trees: Wiener is all-pairs BFS, Sackin a leaf-depth
/// sum, cophenetic a leaf-pair mrca scan.
inline IndexBundle classic_indices_brute_force(const Tree& t) {
    IndexBundle b;
    const std::size_t n = t.node_count();
    auto depth = t.depths();

    for (std::size_t v = 0; v < n; ++v) b.total_path_length += depth[v];

    // All-pairs BFS over the adjacency lists.
    std::vector<std::vector<std::uint32_t>> adj(n);
    for (std::size_t v = 1; v < n; ++v) {
        adj[v].push_back(t.parent[v]);
        adj[t.parent[v]].push_back(static_cast<std::uint32_t>(v));
    }
    std::vector<std::int64_t> dist(n);
    std::vector<std::uint32_t> queue(n);
    for (std::size_t src = 0; src < n; ++src) {
        std::fill(dist.begin(), dist.end(), -1);
        dist[src] = 0;
        std::size_t head = 0, tail = 0;
        queue[tail++] = static_cast<std::uint32_t>(src);
        while (head < tail) {
            std::uint32_t u = queue[head++];
            for (std::uint32_t w : adj[u])
                if (dist[w] < 0) {
                    dist[w] = dist[u] + 1;
                    queue[tail++] = w;
                }
        }
        for (std::size_t v = 0; v < n; ++v) b.wiener += dist[v];
    }

    for (std::size_t v = 0; v < n; ++v) b.shape += std::log(static_cast<double>(t.subtree_size[v]));

    if (t.is_full_binary()) {
        b.binary_indices_valid = true;
        std::vector<std::uint32_t> leaves;
        for (std::size_t v = 0; v < n; ++v)
            if (t.is_leaf(v)) leaves.push_back(static_cast<std::uint32_t>(v));
        for (std::uint32_t v : leaves) b.sackin += depth[v];
        for (std::uint32_t u : leaves)
            for (std::uint32_t w : leaves) {
                if (u == w) continue;
                std::array<std::uint32_t, 2> pair{u, w};
                b.cophenetic += static_cast<long long>(mrca_depth(t, pair));
            }
        // Colless from per-subtree leaf counts.
        std::vector<std::uint32_t> leaf_cnt(n, 0);
        for (std::size_t v = n; v-- > 0;) {
            if (t.is_leaf(v)) leaf_cnt[v] = 1;
            if (v > 0) leaf_cnt[t.parent[v]] += leaf_cnt[v];
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (t.degrees[v] != 2) continue;
            std::uint32_t left = static_cast<std::uint32_t>(v + 1);
            std::uint32_t right = left + t.subtree_size[left];
            b.colless += std::abs(static_cast<long long>(leaf_cnt[left]) -
                                  static_cast<long long>(leaf_cnt[right]));
            b.chi += std::min(t.subtree_size[left], t.subtree_size[right]);
        }
    }
    return b;
}

}  // namespace treelab
