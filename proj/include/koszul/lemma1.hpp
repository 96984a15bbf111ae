#ifndef KOSZUL_LEMMA1_HPP
#define KOSZUL_LEMMA1_HPP

// The generalized Skoda inequality
//
//   |sum_{i,j,a} conj(a_j)(a_j b_{ia} - a_i b_{ja}) c_{i I a}|^2
//       <= q |a|^2 sum_{i, j<k} |sum_a (a_j b_{ka} - a_k b_{ja}) c_{i I a}|^2
//
// for a fixed increasing base tuple I of length l-1, evaluated two ways:
// by direct summation, and through the operators A in Hom(W,V),
// B = iota_X(theta ^ B1) in Hom(V,W) whose product AB has
// |Tr AB|^2 = lhs and rank(AB) <= q.

#include "koszul/exterior.hpp"
#include "koszul/random.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace koszul::lemma1 {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

/// min{p-1, n} for l = 1, min{p-l+1, n} for l >= 2. Zero only when p = l = 1.
inline std::size_t q_constant(std::size_t p, std::size_t n, std::size_t ell) {
    if (p < 1 || n < 1 || ell < 1 || ell > p)
        throw std::out_of_range("q_constant: require 1 <= l <= p and n >= 1");
    return ell == 1 ? std::min(p - 1, n) : std::min(p - ell + 1, n);
}

struct Instance {
    std::size_t p = 0;
    std::size_t n = 0;
    std::size_t ell = 0;
    std::vector<Complex> a;                         // length p
    MatrixXcd b;                                    // p x n, b(i, alpha)
    SkewVectorArray c;                              // degree l, p generators, vectors of length n

    Complex c_at(unsigned i, const MultiIndex& base, std::size_t alpha) const { return c.at(i, base, alpha); }

    void validate() const {
        if (ell < 1 || ell > p || n < 1) throw std::invalid_argument("Instance: require 1 <= l <= p, n >= 1");
        if (a.size() != p) throw DimensionError("Instance: a must have length p");
        if (static_cast<std::size_t>(b.rows()) != p || static_cast<std::size_t>(b.cols()) != n)
            throw DimensionError("Instance: b must be p x n");
        if (c.p != p || c.degree != ell || c.n != n) throw DimensionError("Instance: c shape mismatch");
        c.validate();
    }

    void check_base(const MultiIndex& base) const {
        if (base.degree() + 1 != ell) throw DimensionError("base length must be l-1");
        if (base.degree() > 0 && base[base.degree() - 1] >= p) throw DimensionError("base index exceeds p");
    }
};

struct Sides {
    double lhs = 0.0;
    double rhs = 0.0;
};

/// Both sides by direct summation.
inline Sides inequality_sides(const Instance& inst, const MultiIndex& base) {
    inst.check_base(base);
    const std::size_t p = inst.p, n = inst.n;
    const auto& a = inst.a;

    Complex lhs_sum = 0.0;
    for (unsigned i = 0; i < p; ++i)
        for (unsigned j = 0; j < p; ++j)
            for (std::size_t al = 0; al < n; ++al)
                lhs_sum += std::conj(a[j]) * (a[j] * inst.b(i, al) - a[i] * inst.b(j, al)) * inst.c_at(i, base, al);

    double a_norm = 0.0;
    for (const auto& ai : a) a_norm += std::norm(ai);

    double pair_sum = 0.0;
    for (unsigned i = 0; i < p; ++i)
        for (unsigned j = 0; j < p; ++j)
            for (unsigned k = j + 1; k < p; ++k) {
                Complex s = 0.0;
                for (std::size_t al = 0; al < n; ++al)
                    s += (a[j] * inst.b(k, al) - a[k] * inst.b(j, al)) * inst.c_at(i, base, al);
                pair_sum += std::norm(s);
            }
    const auto q = static_cast<double>(q_constant(p, n, inst.ell));
    return {std::norm(lhs_sum), q * a_norm * pair_sum};
}

/// Rank by full-pivot elimination; entries below tol * max|entry| count as zero.
inline std::size_t numerical_rank(MatrixXcd m, double rel_tol = 1e-9) {
    const double scale = m.size() ? m.cwiseAbs().maxCoeff() : 0.0;
    if (scale == 0.0) return 0;
    const double tol = rel_tol * scale;
    std::size_t rank = 0;
    const Eigen::Index rows = m.rows(), cols = m.cols();
    for (Eigen::Index k = 0; k < std::min(rows, cols); ++k) {
        Eigen::Index pr = k, pc = k;
        double best = -1.0;
        for (Eigen::Index r = k; r < rows; ++r)
            for (Eigen::Index c = k; c < cols; ++c)
                if (std::abs(m(r, c)) > best) best = std::abs(m(r, c)), pr = r, pc = c;
        if (best < tol) break;
        m.row(k).swap(m.row(pr));
        m.col(k).swap(m.col(pc));
        for (Eigen::Index r = k + 1; r < rows; ++r) {
            Complex f = m(r, k) / m(k, k);
            m.row(r) -= f * m.row(k);
        }
        ++rank;
    }
    return rank;
}

/// Operators of the rank argument, in the orthonormal bases v_i of V and w_alpha of W.
struct RankOperators {
    MatrixXcd A;            // p x n: A w_alpha = sum_i c_{i I alpha} v_i
    MatrixXcd B1;           // n x p: B1 v_i = sum_alpha b_{i alpha} w_alpha
    VectorXcd X;            // sum conj(a_i) v_i
    VectorXcd theta;        // coefficients of sum a_i v_i^*
    MatrixXcd B;            // n x p: iota_X(theta ^ B1)
    MatrixXcd AB;           // p x p
    double theta_wedge_AB1_sq = 0.0;  // |theta ^ A B1|^2, norm on Lambda^2 V^* (x) V
};

inline RankOperators build_operators(const Instance& inst, const MultiIndex& base) {
    inst.check_base(base);
    const auto p = static_cast<Eigen::Index>(inst.p);
    const auto n = static_cast<Eigen::Index>(inst.n);
    RankOperators op;
    op.A = MatrixXcd::Zero(p, n);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index al = 0; al < n; ++al)
            op.A(i, al) = inst.c_at(static_cast<unsigned>(i), base, static_cast<std::size_t>(al));
    op.B1 = inst.b.transpose();
    op.X.resize(p);
    op.theta.resize(p);
    for (Eigen::Index i = 0; i < p; ++i) {
        op.X(i) = std::conj(inst.a[static_cast<std::size_t>(i)]);
        op.theta(i) = inst.a[static_cast<std::size_t>(i)];
    }

    // theta ^ B1 has components T[j][k] = theta_j B1 v_k - theta_k B1 v_j in W;
    // contracting the first slot with X gives B v_k = sum_j X_j T[j][k].
    op.B = MatrixXcd::Zero(n, p);
    for (Eigen::Index k = 0; k < p; ++k)
        for (Eigen::Index j = 0; j < p; ++j)
            op.B.col(k) += op.X(j) * (op.theta(j) * op.B1.col(k) - op.theta(k) * op.B1.col(j));
    op.AB = op.A * op.B;

    const MatrixXcd AB1 = op.A * op.B1;
    double s = 0.0;
    for (Eigen::Index j = 0; j < p; ++j)
        for (Eigen::Index k = j + 1; k < p; ++k)
            s += (op.theta(j) * AB1.col(k) - op.theta(k) * AB1.col(j)).squaredNorm();
    op.theta_wedge_AB1_sq = s;
    return op;
}

struct RankReport {
    std::size_t rank = 0;
    std::size_t bound = 0;
    double trace_sq = 0.0;          // |Tr AB|^2
    double frobenius_sq = 0.0;      // |AB|^2
    double x_norm_sq = 0.0;         // |X|^2
    double theta_wedge_sq = 0.0;    // |theta ^ A B1|^2
    double kernel_residual = 0.0;   // |AB X| / (|AB| |X|), 0 when AB = 0
    double base_row_residual = 0.0; // largest base-row norm of AB relative to |AB|
};

inline RankReport rank_oracle(const Instance& inst, const MultiIndex& base, double rank_tol = 1e-9) {
    double a_norm = 0.0;
    for (const auto& ai : inst.a) a_norm += std::norm(ai);
    if (a_norm == 0.0) throw std::invalid_argument("rank_oracle: a = 0");
    const RankOperators op = build_operators(inst, base);
    RankReport r;
    r.rank = numerical_rank(op.AB, rank_tol);
    r.bound = q_constant(inst.p, inst.n, inst.ell);
    r.trace_sq = std::norm(op.AB.trace());
    r.frobenius_sq = op.AB.squaredNorm();
    r.x_norm_sq = op.X.squaredNorm();
    r.theta_wedge_sq = op.theta_wedge_AB1_sq;
    const double ab = std::sqrt(r.frobenius_sq);
    if (ab > 0.0) {
        r.kernel_residual = (op.AB * op.X).norm() / (ab * std::sqrt(r.x_norm_sq));
        for (unsigned i : base) r.base_row_residual = std::max(r.base_row_residual, op.AB.row(i).norm() / ab);
    }
    return r;
}

/// Random instance: coefficients uniform on [-1,1]^2 in C; c sampled per canonical key.
template <typename Engine>
Instance random_instance(std::size_t p, std::size_t n, std::size_t ell, Engine& eng) {
    Instance inst;
    inst.p = p;
    inst.n = n;
    inst.ell = ell;
    inst.a.resize(p);
    for (auto& x : inst.a) x = uniform_complex_square(eng);
    inst.b.resize(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < inst.b.rows(); ++i)
        for (Eigen::Index al = 0; al < inst.b.cols(); ++al) inst.b(i, al) = uniform_complex_square(eng);
    inst.c = {p, ell, n, {}};
    for (const auto& key : all_multi_indices(p, ell)) {
        std::vector<Complex> v(n);
        for (auto& x : v) x = uniform_complex_square(eng);
        inst.c.entries.emplace(key, std::move(v));
    }
    return inst;
}

struct BatchConfig {
    std::uint64_t seed = 0;
    std::size_t instances = 100000;
    std::size_t pmax = 5;
    std::size_t nmax = 4;
    double tolerance = 1e-9;         // lhs <= rhs (1 + tolerance)
    double identity_tolerance = 1e-9;
    double kernel_tolerance = 1e-10;
    unsigned workers = 0;            // 0: hardware concurrency
};

struct Violation {
    std::uint64_t instance_index = 0;
    std::string kind;
    MultiIndex base;
    double lhs = 0.0;
    double rhs = 0.0;
    Instance instance;
};

struct BatchResult {
    std::size_t instances = 0;
    std::size_t checks = 0;          // (instance, base) pairs
    std::size_t rank_at_bound = 0;   // checks where rank == q
    double max_ratio = 0.0;          // max lhs / rhs over checks with rhs > 0
    std::vector<Violation> violations;
};

/// Shape of instance k; cycles through the (p, n, l) grid so that every
/// combination is exercised regardless of batch size.
inline void instance_shape(std::uint64_t k, std::size_t pmax, std::size_t nmax, std::size_t& p, std::size_t& n,
                           std::size_t& ell) {
    std::vector<std::array<std::size_t, 3>> grid;
    for (std::size_t pp = 1; pp <= pmax; ++pp)
        for (std::size_t nn = 1; nn <= nmax; ++nn)
            for (std::size_t ll = 1; ll <= pp; ++ll) grid.push_back({pp, nn, ll});
    const auto& s = grid[k % grid.size()];
    p = s[0];
    n = s[1];
    ell = s[2];
}

namespace detail {

inline void check_instance(std::uint64_t k, const Instance& inst, const BatchConfig& cfg, BatchResult& out) {
    const double eps = 1e-300;
    for (const auto& base : all_multi_indices(inst.p, inst.ell - 1)) {
        ++out.checks;
        const Sides s = inequality_sides(inst, base);
        if (s.rhs > 0.0) out.max_ratio = std::max(out.max_ratio, s.lhs / s.rhs);
        if (s.lhs > s.rhs * (1.0 + cfg.tolerance))
            out.violations.push_back({k, "inequality", base, s.lhs, s.rhs, inst});

        const RankReport r = rank_oracle(inst, base);
        if (r.rank == r.bound) ++out.rank_at_bound;
        if (r.rank > r.bound)
            out.violations.push_back(
                {k, "rank", base, static_cast<double>(r.rank), static_cast<double>(r.bound), inst});
        if (r.trace_sq > r.rank * r.frobenius_sq * (1.0 + cfg.identity_tolerance) + eps)
            out.violations.push_back({k, "trace_rank_cauchy_schwarz", base, r.trace_sq, r.rank * r.frobenius_sq, inst});
        const double cs_rhs = r.x_norm_sq * r.theta_wedge_sq;
        if (r.frobenius_sq > cs_rhs * (1.0 + cfg.identity_tolerance) + eps)
            out.violations.push_back({k, "contraction_cauchy_schwarz", base, r.frobenius_sq, cs_rhs, inst});
        if (r.kernel_residual > cfg.kernel_tolerance)
            out.violations.push_back({k, "kernel", base, r.kernel_residual, cfg.kernel_tolerance, inst});
        if (r.base_row_residual > cfg.kernel_tolerance)
            out.violations.push_back({k, "image", base, r.base_row_residual, cfg.kernel_tolerance, inst});
        // The operator route must reproduce both summation sides.
        const double q = static_cast<double>(r.bound);
        const double op_rhs = q * r.x_norm_sq * r.theta_wedge_sq;
        const double lhs_scale = std::max({s.lhs, r.trace_sq, 1e-300});
        const double rhs_scale = std::max({s.rhs, op_rhs, 1e-300});
        if (std::abs(s.lhs - r.trace_sq) > cfg.identity_tolerance * std::max(lhs_scale, s.rhs))
            out.violations.push_back({k, "trace_identity", base, s.lhs, r.trace_sq, inst});
        if (std::abs(s.rhs - op_rhs) > cfg.identity_tolerance * rhs_scale)
            out.violations.push_back({k, "norm_identity", base, s.rhs, op_rhs, inst});
    }
}

}  // namespace detail

/// Seeded batch over the (p, n, l) grid. Instance k is drawn from its own
/// stream, so the result depends only on (seed, instances, pmax, nmax).
inline BatchResult verify_batch(const BatchConfig& cfg) {
    unsigned workers = cfg.workers ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(cfg.instances, 1)));
    std::vector<BatchResult> partial(workers);
    auto run = [&](unsigned w) {
        const std::size_t begin = cfg.instances * w / workers;
        const std::size_t end = cfg.instances * (w + 1) / workers;
        for (std::size_t k = begin; k < end; ++k) {
            std::size_t p, n, ell;
            instance_shape(k, cfg.pmax, cfg.nmax, p, n, ell);
            SplitMix64 eng(stream_seed(cfg.seed, k));
            Instance inst = random_instance(p, n, ell, eng);
            ++partial[w].instances;
            detail::check_instance(k, inst, cfg, partial[w]);
        }
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(run, w);
    }
    BatchResult total;
    for (auto& r : partial) {
        total.instances += r.instances;
        total.checks += r.checks;
        total.rank_at_bound += r.rank_at_bound;
        total.max_ratio = std::max(total.max_ratio, r.max_ratio);
        for (auto& v : r.violations) total.violations.push_back(std::move(v));
    }
    return total;
}

}  // namespace koszul::lemma1

#endif  // KOSZUL_LEMMA1_HPP
