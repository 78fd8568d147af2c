#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "treelab/common.hpp"
#include "treelab/functionals.hpp"
#include "treelab/rmq.hpp"
#include "treelab/rng.hpp"

namespace treelab {

/// Nonnegative grid function on {0, 1/M, ..., 1} with h(0) = h(1) = 0,
/// piecewise linear in between.  Sampled Brownian excursions carry the
/// scaling e = sqrt(2/alpha) B.
class Excursion {
  public:
    std::vector<double> values;  // M + 1 points
    std::size_t M = 0;
    double alpha = 2.0;

    Excursion() = default;
    Excursion(std::vector<double> v, double a)
        : values(std::move(v)), M(values.size() - 1), alpha(a) {}

    /// Deterministic tent excursion min(x, 1-x); closed forms are known for
    /// every functional, which makes it the grid-refinement oracle.
    static Excursion tent(std::size_t M, double alpha = 2.0) {
        std::vector<double> v(M + 1);
        for (std::size_t i = 0; i <= M; ++i) {
            double x = static_cast<double>(i) / static_cast<double>(M);
            v[i] = std::min(x, 1.0 - x);
        }
        return Excursion(std::move(v), alpha);
    }

    double value_at_index(std::size_t i) const {
        if (i >= values.size()) throw OutOfDomain("grid index");
        return values[i];
    }

    /// Min over grid indices [lo, hi] (lazy sparse table).
    double grid_min(std::size_t lo, std::size_t hi) const {
        if (rmq_.empty()) rmq_ = SparseTableRmq<double>(values);
        return rmq_.min(std::min(lo, hi), std::max(lo, hi));
    }

  private:
    mutable SparseTableRmq<double> rmq_;
};

/// Gaussian random-walk bridge pinned to 0 at both ends, rotated at its
/// leftmost argmin (Vervaat transform), scaled by sqrt(2/alpha).
/// Exposed separately so fixed-increment tests can drive it directly.
inline Excursion excursion_from_increments(const std::vector<double>& increments, double alpha) {
    const std::size_t M = increments.size();
    std::vector<double> walk(M + 1, 0.0);
    for (std::size_t i = 0; i < M; ++i) walk[i + 1] = walk[i] + increments[i];
    const double drift = walk[M] / static_cast<double>(M);
    for (std::size_t i = 1; i <= M; ++i) walk[i] -= drift * static_cast<double>(i);
    std::size_t rho = 0;
    for (std::size_t i = 1; i < M; ++i)
        if (walk[i] < walk[rho]) rho = i;
    const double base = walk[rho];
    const double scale = std::sqrt(2.0 / alpha);
    std::vector<double> v(M + 1);
    for (std::size_t i = 0; i <= M; ++i) v[i] = scale * (walk[(rho + i) % M] - base);
    v[M] = 0.0;
    return Excursion(std::move(v), alpha);
}

/// Discretized normalized Brownian excursion on M grid steps.
inline Excursion sample_brownian_excursion(std::size_t M, double alpha, CounterRng& rng) {
    if (M < 2) throw ParameterDomain("grid size must be >= 2");
    const double sd = 1.0 / std::sqrt(static_cast<double>(M));
    std::vector<double> inc(M);
    for (;;) {
        for (std::size_t i = 0; i < M; ++i) inc[i] = sd * rng.next_gaussian();
        Excursion e = excursion_from_increments(inc, alpha);
        bool interior_positive = true;
        for (std::size_t i = 1; i < M && interior_positive; ++i)
            interior_positive = e.values[i] > 0.0;
        if (interior_positive) return e;  // ties at the argmin have measure zero
    }
}

namespace detail {

/// Shared sweep behind sigma/Z_beta/Phi.  For grid point i, visits the M
/// cell minima g_j = min h over the grid range spanning cell j toward i, in
/// descending order (two monotone fronts merged), and accumulates
/// integral_0^{h_i} table[#cells with g >= r] dr exactly: the discretized
/// sigma is a step function of r with breakpoints at the g_j.
template <typename Table>
inline double sweep_r_integral(const std::vector<double>& h, std::size_t i, const Table& table) {
    const std::size_t M = h.size() - 1;
    const double hi = h[i];
    double integral = 0.0;
    double r_prev = hi;
    std::size_t m = 0;
    std::ptrdiff_t jl = static_cast<std::ptrdiff_t>(i) - 1;
    std::size_t jr = i;
    double run_l = jl >= 0 ? std::min(h[jl], h[i]) : -1.0;
    double run_r = jr < M ? std::min(h[i], h[jr + 1]) : -1.0;
    while (jl >= 0 || jr < M) {
        double g;
        if (jl >= 0 && (jr >= M || run_l >= run_r)) {
            g = run_l;
            --jl;
            if (jl >= 0) run_l = std::min(run_l, h[jl]);
        } else {
            g = run_r;
            ++jr;
            if (jr < M) run_r = std::min(run_r, h[jr + 1]);
        }
        integral += (r_prev - g) * table[m];
        ++m;
        r_prev = g;
    }
    integral += r_prev * table[m];
    return integral;
}

}  // namespace detail

/// Discretized sigma_{r,s} at s = i/M: the fraction of grid cells whose
/// path-minimum toward i stays at or above level r.  Nonincreasing in r,
/// equal to 1 at r = 0 on interior-positive excursions, 0 for r > h(i).
inline double sigma_rs(const Excursion& h, double r, std::size_t i) {
    if (i >= h.values.size()) throw OutOfDomain("grid index");
    if (r < 0.0) throw OutOfDomain("level must be >= 0");
    const std::size_t M = h.M;
    const auto& v = h.values;
    std::size_t count = 0;
    double run = v[i];
    for (std::size_t j = i; j < M; ++j) {  // cells to the right
        run = std::min(run, v[j + 1]);
        if (run >= r) ++count;
    }
    run = v[i];
    for (std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) - 1; j >= 0; --j) {
        run = std::min(run, v[j]);
        if (run >= r) ++count;
    }
    return static_cast<double>(count) / static_cast<double>(M);
}

/// Z_beta(h) = int ds int_0^{h(s)} sigma_{r,s}^{beta-1} dr on the grid.
/// The power follows the x^a 1_{(0,1]} convention, so the sigma = 0 slice
/// above the highest breakpoint contributes nothing.  Estimates for
/// beta <= 1/2 diverge with M on Brownian samples (callers may still ask).
inline double z_beta(const Excursion& h, double beta) {
    const std::size_t M = h.M;
    const double inv_m = 1.0 / static_cast<double>(M);
    std::vector<double> table(M + 1);
    table[0] = 0.0;
    for (std::size_t m = 1; m <= M; ++m)
        table[m] = std::pow(static_cast<double>(m) * inv_m, beta - 1.0);
    double acc = 0.0;
    for (std::size_t i = 0; i <= M; ++i) {
        if (h.values[i] <= 0.0) continue;
        acc += detail::sweep_r_integral(h.values, i, table);
    }
    return acc * inv_m;
}

/// Phi_h(f) = int ds int_0^{h(s)} f(sigma_{r,s}) dr; Phi_h(x^{beta-1})
/// coincides with z_beta.
inline double phi(const Excursion& h, const WeightFunction& f) {
    const std::size_t M = h.M;
    const double inv_m = 1.0 / static_cast<double>(M);
    if (f.is_constant()) {
        // f(sigma) == c for every r-slice, so the integral collapses to c int h.
        double sum = 0.0;
        for (double v : h.values) sum += v;
        return f.constant_value() * sum * inv_m;
    }
    std::vector<double> table(M + 1);
    for (std::size_t m = 0; m <= M; ++m) table[m] = f(static_cast<double>(m) * inv_m);
    double acc = 0.0;
    for (std::size_t i = 0; i <= M; ++i) {
        if (h.values[i] <= 0.0) continue;
        acc += detail::sweep_r_integral(h.values, i, table);
    }
    return acc * inv_m;
}

/// Z_beta through the pairwise representation
/// Z_beta = (beta(beta-1)/2) int |t-s|^{beta-2} m(s,t) ds dt, beta > 1.
/// The kernel is integrated exactly over every cell pair against the
/// cell-constant grid minimum, which removes the diagonal singularity for
/// beta in (1,2); for integer beta the cell kernel matches the point kernel.
inline double z_beta_pairwise(const Excursion& h, double beta) {
    if (!(beta > 1.0)) throw BetaOutOfRange("pairwise representation needs beta > 1");
    const std::size_t M = h.M;
    const auto& v = h.values;
    // kernel[d] = (beta(beta-1)/2) int over [0,1]x[d,d+1] of |t-s|^{beta-2},
    // in grid units: second difference of d^beta / 2 (d >= 1), 1 at d = 0.
    std::vector<double> powb(M + 1);
    for (std::size_t d = 0; d <= M; ++d)
        powb[d] = std::pow(static_cast<double>(d), beta);
    std::vector<double> kernel(M);
    kernel[0] = 1.0;
    for (std::size_t d = 1; d < M; ++d)
        kernel[d] = 0.5 * (powb[d + 1] - 2.0 * powb[d] + powb[d - 1]);
    double acc = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        double run = std::min(v[i], v[i + 1]);
        acc += run * kernel[0];
        for (std::size_t j = i + 1; j < M; ++j) {
            run = std::min(run, v[j + 1]);
            acc += 2.0 * run * kernel[j - i];
        }
    }
    return acc * std::pow(static_cast<double>(M), -beta);
}

/// Shortest round-trip decimal form of a double; deterministic output.
inline std::string fmt_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Excursion file format: "M alpha" on the first line, then M+1 values,
/// one per line, shortest round-trip decimals.
inline void write_excursion(std::ostream& os, const Excursion& e) {
    os << e.M << ' ' << fmt_double(e.alpha) << '\n';
    for (double v : e.values) os << fmt_double(v) << '\n';
}

inline Excursion read_excursion(std::istream& is) {
    std::size_t M = 0;
    double alpha = 0;
    if (!(is >> M >> alpha) || M < 1) throw ParseError("bad excursion header", 0);
    std::vector<double> v(M + 1);
    for (std::size_t i = 0; i <= M; ++i)
        if (!(is >> v[i])) throw ParseError("truncated excursion values", i);
    return Excursion(std::move(v), alpha);
}

}  // namespace treelab
