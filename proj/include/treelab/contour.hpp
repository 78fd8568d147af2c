#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "treelab/common.hpp"
#include "treelab/rmq.hpp"
#include "treelab/tree.hpp"

namespace treelab {

struct DkResult {
    double value = 0;
    double quad_step = 0;  // 0 when the integral is exact
    bool exact = true;
};

/// Contour process C^t of a tree: the depth of a particle traversing every
/// edge at unit speed in lexicographic order, with the terminal flat
/// C^t(s) = 0 on [2|t|-2, 2|t|].  Heights live on the integer grid 0..2|t|
/// and the process is linear in between (slopes +-1, then 0 on the flat).
class Contour {
  public:
    explicit Contour(const Tree& t) : tree_(&t) {
        const std::size_t n = t.node_count();
        heights_.reserve(2 * n + 1);
        arrival_.resize(n);
        heights_.push_back(0);
        struct Frame {
            std::uint32_t node;
            std::uint32_t remaining;
        };
        std::vector<Frame> stack;
        std::vector<std::uint32_t> child_cursor(n);
        for (std::size_t v = 0; v < n; ++v) child_cursor[v] = static_cast<std::uint32_t>(v) + 1;
        arrival_[0] = 0;
        stack.push_back({0, t.degrees[0]});
        std::int32_t depth = 0;
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.remaining > 0) {
                --f.remaining;
                std::uint32_t c = child_cursor[f.node];
                child_cursor[f.node] = c + t.subtree_size[c];
                ++depth;
                arrival_[c] = static_cast<std::uint32_t>(heights_.size());
                heights_.push_back(depth);
                stack.push_back({c, t.degrees[c]});
            } else {
                stack.pop_back();
                if (!stack.empty()) {
                    --depth;
                    heights_.push_back(depth);
                }
            }
        }
        // The walk is back at the root at time 2|t|-2; append the flat.
        heights_.push_back(0);
        heights_.push_back(0);
        rmq_ = SparseTableRmq<std::int32_t>(heights_);
    }

    const Tree& tree() const { return *tree_; }
    const std::vector<std::int32_t>& heights() const { return heights_; }
    std::size_t duration() const { return heights_.size() - 1; }  // 2|t|

    /// First arrival time L_k of node v (preorder = lexicographic rank).
    std::uint32_t arrival(std::size_t v) const { return arrival_[v]; }

    struct Piece {
        double lo, hi;
    };

    /// Exploration interval I_v: two half-open unit pieces for every
    /// non-root node, the closed terminal flat [2|t|-2, 2|t|] for the root.
    std::vector<Piece> interval(std::size_t v) const {
        if (v == 0) {
            double end = static_cast<double>(duration());
            return {{end - 2.0, end}};
        }
        double a = arrival_[v];
        double back = a + 2.0 * (tree_->subtree_size[v] - 1);
        return {{a - 1.0, a}, {back, back + 1.0}};
    }

    double eval(double s) const {
        if (s < 0.0 || s > static_cast<double>(duration())) throw OutOfDomain("contour time");
        std::size_t i = static_cast<std::size_t>(s);
        if (i >= duration()) return heights_.back();
        double frac = s - static_cast<double>(i);
        return heights_[i] + (heights_[i + 1] - heights_[i]) * frac;
    }

    /// Exact minimum of the piecewise-linear contour over [a ^ b, a v b].
    double min_on(double a, double b) const {
        double lo = std::min(a, b), hi = std::max(a, b);
        if (lo < 0.0 || hi > static_cast<double>(duration())) throw OutOfDomain("contour time");
        std::size_t il = static_cast<std::size_t>(std::ceil(lo));
        std::size_t ih = static_cast<std::size_t>(std::floor(hi));
        if (il > ih) return std::min(eval(lo), eval(hi));  // single linear piece
        double m = static_cast<double>(rmq_.min(il, ih));
        if (lo < static_cast<double>(il)) m = std::min(m, eval(lo));
        if (hi > static_cast<double>(ih)) m = std::min(m, eval(hi));
        return m;
    }

    /// Exact numerator of the contour functional for k in {1,2}:
    /// value = num / 192.  Integer arithmetic, so the Lemma d=D sandwich can
    /// be tested with zero tolerance.
    long long dk_exact_num192(unsigned k) const {
        if (k == 1) {
            long long tsum = 0;
            for (std::size_t i = 0; i + 1 < heights_.size(); ++i)
                tsum += heights_[i] + heights_[i + 1];
            return 48 * tsum;  // D_1 = (1/2) integral = tsum / 4
        }
        if (k != 2) throw KTooLarge("exact path only for k in {1,2}");
        // D_2 = (1/4) sum over ordered cell pairs of the exact cell integral
        // of m(u,v).  Within a cell pair the interval min is the min of two
        // boundary linear pieces and the interior grid min; with integer
        // heights each cell integral is an integer plus 0, 1/2 or 1/3, so we
        // accumulate 48x the cell values.
        const std::size_t cells = duration();
        const auto& h = heights_;
        long long total = 0;
        for (std::size_t i = 0; i < cells; ++i) {
            if (h[i + 1] == h[i])
                total += 48LL * h[i];  // flat diagonal cell
            else
                total += 48LL * std::min(h[i], h[i + 1]) + 16;
            std::int32_t interior = INT32_MAX;
            const bool up_i = h[i + 1] == h[i] + 1;
            for (std::size_t j = i + 1; j < cells; ++j) {
                interior = std::min(interior, h[j]);
                const bool p_ramp = up_i && interior == h[i] + 1;
                const bool q_ramp = h[j + 1] == h[j] - 1 && interior == h[j];
                long long cell;
                if (p_ramp && q_ramp)
                    cell = 48LL * h[i] + 16;
                else if (p_ramp)
                    cell = 48LL * h[i] + 24;
                else if (q_ramp)
                    cell = 48LL * h[j] - 24;
                else
                    cell = 48LL * interior;
                total += 2 * cell;
            }
        }
        return total;
    }

    /// D_k(t), the contour counterpart of D_k.  k = 1 and k = 2 are exact;
    /// k >= 3 uses the order-statistics reduction
    /// D_k = (k(k-1)/2) 2^{-k} int |u-v|^{k-2} m(u,v) du dv over [0,2|t|]^2
    /// with midpoint quadrature, `refine` points per unit step.
    DkResult discrete_Dk(unsigned k, unsigned refine = 4) const {
        if (k == 0) throw KTooLarge("k must be >= 1");
        DkResult r;
        if (k <= 2) {
            r.value = static_cast<double>(dk_exact_num192(k)) / 192.0;
            return r;
        }
        r.exact = false;
        const double step = 1.0 / static_cast<double>(refine);
        r.quad_step = step;
        const std::size_t npts = duration() * refine;
        std::vector<double> pts(npts);
        for (std::size_t a = 0; a < npts; ++a) pts[a] = (static_cast<double>(a) + 0.5) * step;
        double acc = 0.0;
        for (std::size_t a = 0; a < npts; ++a)
            for (std::size_t b = a + 1; b < npts; ++b)
                acc += 2.0 * std::pow(pts[b] - pts[a], static_cast<double>(k - 2)) *
                       min_on(pts[a], pts[b]);
        acc *= step * step;
        const double kk = 0.5 * static_cast<double>(k) * (k - 1);
        r.value = kk * std::ldexp(acc, -static_cast<int>(k));
        return r;
    }

  private:
    const Tree* tree_;
    std::vector<std::int32_t> heights_;
    std::vector<std::uint32_t> arrival_;
    SparseTableRmq<std::int32_t> rmq_;
};

}  // namespace treelab
