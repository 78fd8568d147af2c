#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "treelab/common.hpp"
#include "treelab/excursion.hpp"
#include "treelab/rmq.hpp"
#include "treelab/rng.hpp"
#include "treelab/tree.hpp"

namespace treelab {

/// Full binary tree with a positive branch length below each node: the
/// discrete tree spanned by n+1 leaves of the excursion's real tree.
struct MarkedTree {
    Tree shape;                        // 2n+1 nodes, full binary
    std::vector<double> lengths;       // per node, preorder
    double total_length = 0;           // L_n
    std::vector<std::uint32_t> leaf_times;  // sorted grid indices of the leaves
    std::vector<std::uint32_t> leaf_nodes;  // preorder node of the k-th leaf time
};

/// Degenerate grid argmin, carrying which leaf time to resample.
struct DegenerateArgminAt : DegenerateArgmin {
    std::size_t offending_time_index;
    DegenerateArgminAt(const std::string& what, std::size_t k)
        : DegenerateArgmin(what), offending_time_index(k) {}
};

namespace detail {

struct Segment {
    double min_value;
    std::uint32_t argmin;   // leftmost grid argmin
    bool tied;              // min attained at more than one grid point
};

/// Min/argmin/tie data for the path between consecutive leaf times.
inline std::vector<Segment> consecutive_segments(const Excursion& h,
                                                 const std::vector<std::uint32_t>& times) {
    std::vector<Segment> segs(times.size() - 1);
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        Segment s{std::numeric_limits<double>::infinity(), times[k], false};
        for (std::uint32_t i = times[k]; i <= times[k + 1]; ++i) {
            double v = h.values[i];
            if (v < s.min_value) {
                s.min_value = v;
                s.argmin = i;
                s.tied = false;
            } else if (v == s.min_value) {
                s.tied = true;
            }
        }
        segs[k] = s;
    }
    return segs;
}

struct EmbedFrame {
    std::uint32_t first, last;  // leaf index range
    double base;                // height of the split below this window
};

}  // namespace detail

/// The recursive spanned-tree construction on a discretized excursion.
///
/// Windows always run between leaf times, so the window argmin is the min
/// over the consecutive-pair segments it covers; the recursion splits at the
/// unique strictly interior argmin and subtracts the split height.  When
/// `strict` is set, boundary or tied grid argmins throw DegenerateArgminAt
/// (the caller resamples the offending uniform); without it the leftmost
/// minimum is used as-is, which builds the shape but may not yield strictly
/// positive lengths.
inline MarkedTree embed_marked_tree(const Excursion& h, const std::vector<std::uint32_t>& times,
                                    bool strict = true) {
    const std::size_t leaves = times.size();
    if (leaves == 0) throw ParameterDomain("need at least one leaf time");
    for (std::size_t k = 0; k < leaves; ++k) {
        if (times[k] == 0 || times[k] >= h.M)
            throw ParameterDomain("leaf times must be interior grid indices");
        if (k > 0 && times[k] <= times[k - 1])
            throw ParameterDomain("leaf times must be sorted and distinct");
    }

    MarkedTree out;
    out.leaf_times = times;
    out.leaf_nodes.resize(leaves);
    const std::size_t n_nodes = 2 * leaves - 1;
    out.lengths.reserve(n_nodes);
    std::vector<std::uint32_t> degs;
    degs.reserve(n_nodes);

    if (leaves == 1) {
        degs.push_back(0);
        out.lengths.push_back(h.values[times[0]]);
        out.leaf_nodes[0] = 0;
        out.shape = tree_from_degrees(degs);
        out.total_length = out.lengths[0];
        return out;
    }

    auto segs = detail::consecutive_segments(h, times);
    std::vector<double> seg_mins(segs.size());
    for (std::size_t k = 0; k < segs.size(); ++k) seg_mins[k] = segs[k].min_value;
    SparseTableRmq<double> rmq(seg_mins);

    std::vector<detail::EmbedFrame> stack;
    stack.push_back({0, static_cast<std::uint32_t>(leaves - 1), 0.0});
    while (!stack.empty()) {
        auto [first, last, base] = stack.back();
        stack.pop_back();
        if (first == last) {
            out.leaf_nodes[first] = static_cast<std::uint32_t>(degs.size());
            degs.push_back(0);
            double len = h.values[times[first]] - base;
            if (strict && len <= 0.0)
                throw DegenerateArgminAt("leaf at or below the window split", first);
            out.lengths.push_back(len);
            continue;
        }
        const std::size_t k = rmq.argmin(first, last - 1);
        const detail::Segment& s = segs[k];
        if (strict) {
            if (s.tied)
                throw DegenerateArgminAt("tied grid argmin inside a segment", k + 1);
            if (k > first && rmq.min(first, k - 1) == s.min_value)
                throw DegenerateArgminAt("tied argmin across segments", k);
            if (k + 1 < last && rmq.min(k + 1, last - 1) == s.min_value)
                throw DegenerateArgminAt("tied argmin across segments", k + 1);
            if (s.argmin == times[first])
                throw DegenerateArgminAt("window argmin at left boundary", first);
            if (s.argmin == times[last])
                throw DegenerateArgminAt("window argmin at right boundary", last);
            // an argmin at an interior leaf time shows up as a cross-segment
            // tie (shared endpoint), caught above
        }
        degs.push_back(2);
        out.lengths.push_back(s.min_value - base);
        // preorder: left window first
        stack.push_back({static_cast<std::uint32_t>(k + 1), last, s.min_value});
        stack.push_back({first, static_cast<std::uint32_t>(k), s.min_value});
    }

    out.shape = tree_from_degrees(degs);
    out.total_length = 0;
    for (double l : out.lengths) out.total_length += l;
    return out;
}

/// Shape of the spanned tree only (no length validation); used where the
/// downstream statistic depends on the tree shape alone.
inline Tree embed_spanned_shape(const Excursion& h, const std::vector<std::uint32_t>& times) {
    return embed_marked_tree(h, times, /*strict=*/false).shape;
}

/// n+1 distinct interior grid slots from i.i.d. uniforms, keeping a gap of
/// at least 2 grid steps so every consecutive pair has an interior point; a
/// colliding draw is itself resampled.
inline std::vector<std::uint32_t> snap_times(CounterRng& rng, std::size_t n, std::size_t M,
                                             std::uint64_t max_draws_per_time = 1000) {
    const std::size_t want = n + 1;
    if (M < 2 * want + 2) throw ConfigError("grid too coarse for n+1 separated leaf times");
    std::vector<bool> blocked(M + 1, false);
    std::vector<std::uint32_t> slots;
    slots.reserve(want);
    for (std::size_t k = 0; k < want; ++k) {
        bool placed = false;
        for (std::uint64_t attempt = 0; attempt < max_draws_per_time; ++attempt) {
            auto slot = static_cast<std::uint32_t>(
                1 + static_cast<std::size_t>(rng.next_double() * static_cast<double>(M - 1)));
            if (slot >= M) slot = static_cast<std::uint32_t>(M - 1);
            if (blocked[slot]) continue;
            blocked[slot] = true;
            if (slot > 0) blocked[slot - 1] = true;
            if (slot < M) blocked[slot + 1] = true;
            slots.push_back(slot);
            placed = true;
            break;
        }
        if (!placed) throw RejectionBudgetExceeded("could not place distinct leaf times");
    }
    std::sort(slots.begin(), slots.end());
    return slots;
}

/// Embed with the documented repair policy: degenerate windows trigger a
/// resample of the offending uniform, up to `max_repairs` times.
inline MarkedTree embed_with_repair(const Excursion& h, std::size_t n, CounterRng& rng,
                                    std::uint64_t max_repairs = 0) {
    if (max_repairs == 0) max_repairs = 100 * (n + 1);
    std::vector<std::uint32_t> times = snap_times(rng, n, h.M);
    std::vector<bool> blocked(h.M + 1, false);
    auto rebuild_blocked = [&] {
        std::fill(blocked.begin(), blocked.end(), false);
        for (auto s : times) {
            blocked[s] = true;
            if (s > 0) blocked[s - 1] = true;
            if (s < h.M) blocked[s + 1] = true;
        }
    };
    rebuild_blocked();
    for (std::uint64_t repair = 0; repair <= max_repairs; ++repair) {
        try {
            return embed_marked_tree(h, times);
        } catch (const DegenerateArgminAt& e) {
            std::size_t k = std::min(e.offending_time_index, times.size() - 1);
            // release the offender and redraw it
            for (std::uint64_t attempt = 0;; ++attempt) {
                if (attempt >= 1000)
                    throw RejectionBudgetExceeded("could not resample a degenerate leaf time");
                auto slot = static_cast<std::uint32_t>(
                    1 + static_cast<std::size_t>(rng.next_double() * static_cast<double>(h.M - 1)));
                if (slot >= h.M) slot = static_cast<std::uint32_t>(h.M - 1);
                if (blocked[slot]) continue;
                times[k] = slot;
                break;
            }
            std::sort(times.begin(), times.end());
            rebuild_blocked();
        }
    }
    throw RejectionBudgetExceeded("embedding still degenerate after repair budget");
}

/// Branch lengths conditionally on the shape: (L E_v / S) with i.i.d. unit
/// exponentials E_v, S their sum (the Lemma-hh representation).
inline std::vector<double> sample_branch_lengths_gamma(const Tree& shape, double total_length,
                                                       CounterRng& rng) {
    if (!shape.is_full_binary()) throw NotFullBinary("branch-length law is for full binary shapes");
    std::vector<double> e(shape.node_count());
    double s = 0;
    for (auto& x : e) {
        x = rng.next_exponential();
        s += x;
    }
    for (auto& x : e) x = total_length * x / s;
    return e;
}

}  // namespace treelab
