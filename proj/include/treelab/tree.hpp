#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "treelab/common.hpp"

namespace treelab {

/// Ordered rooted finite tree, flattened in preorder.
///
/// Nodes are identified by their preorder index; children of a node occupy a
/// contiguous index range right after it, so the subtree of v is exactly the
/// slice [v, v + subtree_size[v]).  The root's parent entry is the root's own
/// index, which keeps hot loops free of sentinel branching.
class Tree {
  public:
    std::vector<std::uint32_t> degrees;       // k_v, child count per node
    std::vector<std::uint32_t> parent;        // preorder index of parent, parent[0] == 0
    std::vector<std::uint32_t> subtree_size;  // |t_v|

    std::size_t node_count() const { return degrees.size(); }

    bool is_leaf(std::size_t v) const { return degrees[v] == 0; }

    std::size_t leaf_count() const {
        return static_cast<std::size_t>(std::count(degrees.begin(), degrees.end(), 0u));
    }

    bool is_full_binary() const {
        return std::all_of(degrees.begin(), degrees.end(),
                           [](std::uint32_t k) { return k == 0 || k == 2; });
    }

    /// Depth of every node (root 0), one preorder pass.
    std::vector<std::uint32_t> depths() const {
        std::vector<std::uint32_t> d(node_count());
        for (std::size_t v = 1; v < node_count(); ++v) d[v] = d[parent[v]] + 1;
        return d;
    }

    /// Preorder indices of the children of v.
    std::vector<std::uint32_t> children(std::size_t v) const {
        std::vector<std::uint32_t> out;
        out.reserve(degrees[v]);
        std::size_t c = v + 1;
        for (std::uint32_t i = 0; i < degrees[v]; ++i) {
            out.push_back(static_cast<std::uint32_t>(c));
            c += subtree_size[c];
        }
        return out;
    }
};

/// Build a Tree from its preorder degree sequence.
/// Valid sequences are exactly the Lukasiewicz paths: every strict prefix of
/// sum(k_i - 1) stays >= 0 and the total is -1.
inline Tree tree_from_degrees(std::span<const std::uint32_t> degrees) {
    if (degrees.empty()) throw MalformedDegreeSequence("empty degree sequence");
    std::size_t n = degrees.size();
    long long walk = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        walk += static_cast<long long>(degrees[i]) - 1;
        if (walk < 0)
            throw MalformedDegreeSequence("Lukasiewicz prefix drops below 0 at position " +
                                          std::to_string(i));
    }
    walk += static_cast<long long>(degrees[n - 1]) - 1;
    if (walk != -1) throw MalformedDegreeSequence("degree sum is not node count - 1");

    Tree t;
    t.degrees.assign(degrees.begin(), degrees.end());
    t.parent.assign(n, 0);
    t.subtree_size.assign(n, 1);

    // Preorder: maintain the stack of ancestors with unfilled child slots.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> stack;  // (node, remaining children)
    for (std::size_t v = 0; v < n; ++v) {
        if (v > 0) {
            t.parent[v] = stack.back().first;
            if (--stack.back().second == 0) stack.pop_back();
        }
        if (t.degrees[v] > 0) stack.emplace_back(static_cast<std::uint32_t>(v), t.degrees[v]);
    }
    for (std::size_t v = n; v-- > 1;) t.subtree_size[t.parent[v]] += t.subtree_size[v];
    return t;
}

inline Tree tree_from_degrees(const std::vector<std::uint32_t>& degrees) {
    return tree_from_degrees(std::span<const std::uint32_t>(degrees));
}

/// Depth of the most recent common ancestor of a nonempty set of nodes.
inline std::size_t mrca(const Tree& t, std::span<const std::uint32_t> nodes) {
    if (nodes.empty()) throw IndexOutOfRange("mrca of empty node set");
    for (auto v : nodes)
        if (v >= t.node_count()) throw IndexOutOfRange("node index " + std::to_string(v));
    // In preorder-with-contiguous-subtrees form, u is an ancestor of v iff
    // u <= v < u + |t_u|; the mrca of a set is the mrca of its min and max.
    std::uint32_t lo = *std::min_element(nodes.begin(), nodes.end());
    std::uint32_t hi = *std::max_element(nodes.begin(), nodes.end());
    std::uint32_t a = lo;
    while (a + t.subtree_size[a] <= hi) a = t.parent[a];
    return a;
}

inline std::size_t mrca_depth(const Tree& t, std::span<const std::uint32_t> nodes) {
    std::size_t a = mrca(t, nodes);
    std::size_t d = 0;
    while (a != 0) {
        a = t.parent[a];
        ++d;
    }
    return d;
}

/// Graph distance d(u,v) = depth(u) + depth(v) - 2 depth(u ^ v).
inline std::size_t node_distance(const Tree& t, std::uint32_t u, std::uint32_t v) {
    auto depth_of = [&](std::uint32_t w) {
        std::size_t d = 0;
        while (w != 0) {
            w = t.parent[w];
            ++d;
        }
        return d;
    };
    std::array<std::uint32_t, 2> uv{u, v};
    return depth_of(u) + depth_of(v) - 2 * mrca_depth(t, uv);
}

/// The tree t* on the internal nodes of t, ancestry preserved.
inline Tree strip_leaves(const Tree& t) {
    if (t.node_count() <= 1) throw SingleNodeTree("t* undefined for a single node");
    std::size_t n = t.node_count();
    std::vector<std::uint32_t> internal_degree(n, 0);
    for (std::size_t v = 1; v < n; ++v)
        if (!t.is_leaf(v)) ++internal_degree[t.parent[v]];
    std::vector<std::uint32_t> degs;
    degs.reserve(n);
    for (std::size_t v = 0; v < n; ++v)
        if (!t.is_leaf(v)) degs.push_back(internal_degree[v]);
    return tree_from_degrees(degs);
}

/// Canonical one-line serialization: space-separated preorder degrees.
inline std::string serialize_tree(const Tree& t) {
    std::string out;
    for (std::size_t v = 0; v < t.node_count(); ++v) {
        if (v > 0) out.push_back(' ');
        out += std::to_string(t.degrees[v]);
    }
    return out;
}

inline Tree parse_tree(std::string_view text) {
    std::vector<std::uint32_t> degs;
    std::size_t i = 0, n = text.size();
    while (i < n) {
        while (i < n && (text[i] == ' ' || text[i] == '\n' || text[i] == '\r' || text[i] == '\t'))
            ++i;
        if (i == n) break;
        if (text[i] < '0' || text[i] > '9') throw ParseError("expected digit", i);
        std::uint64_t val = 0;
        while (i < n && text[i] >= '0' && text[i] <= '9') {
            val = val * 10 + static_cast<std::uint64_t>(text[i] - '0');
            if (val > UINT32_MAX) throw ParseError("degree too large", i);
            ++i;
        }
        degs.push_back(static_cast<std::uint32_t>(val));
    }
    if (degs.empty()) throw ParseError("no degrees found", 0);
    try {
        return tree_from_degrees(degs);
    } catch (const MalformedDegreeSequence& e) {
        throw ParseError(e.what(), n);
    }
}

}  // namespace treelab
