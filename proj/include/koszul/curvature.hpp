#ifndef KOSZUL_CURVATURE_HPP
#define KOSZUL_CURVATURE_HPP

// Pointwise complex Hessians: i dd-bar log|g|^2, the Hessians of the twisted
// weights, and the Hermitian form
//
//   M = a dd-bar(phi_1) - dd-bar(a) - lambda^{-1} da (x) dbar-a - q l a b dd-bar log|g|^2
//
// whose positivity is the twist condition. Every composite Hessian is
// assembled by the scalar chain rule from exact Wirtinger derivatives.

#include "koszul/exterior.hpp"
#include "koszul/hermitian.hpp"
#include "koszul/lemma1.hpp"
#include "koszul/polynomial.hpp"
#include "koszul/triples.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

namespace koszul::curvature {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;

/// Points with |g(z)|^2 below this are rejected as evaluation sites.
inline constexpr double kMinNormSq = 1e-14;

class CommonZeroError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// g and its first derivatives at one point.
struct Jet {
    std::vector<Complex> g;  // g_k(z)
    MatrixXcd dg;            // p x n, d_alpha g_k(z)
    double norm_sq = 0.0;    // |g(z)|^2
};

/// Generators g_1..g_p with their Wirtinger derivatives precomputed.
class Generators {
public:
    Generators() = default;
    explicit Generators(std::vector<Polynomial> g) : exact_(std::move(g)) {
        if (exact_.empty()) throw std::invalid_argument("Generators: need at least one generator");
        n_ = exact_.front().num_vars();
        for (const auto& q : exact_) {
            if (q.num_vars() != n_) throw DimensionError("Generators: mixed variable counts");
            values_.emplace_back(q);
            std::vector<NumericPolynomial> row;
            for (std::size_t a = 0; a < n_; ++a) row.emplace_back(q.wirtinger(a));
            derivs_.push_back(std::move(row));
        }
    }

    std::size_t p() const { return exact_.size(); }
    std::size_t n() const { return n_; }
    const std::vector<Polynomial>& polynomials() const { return exact_; }

    std::vector<Complex> values(std::span<const Complex> z) const {
        std::vector<Complex> out;
        out.reserve(values_.size());
        for (const auto& q : values_) out.push_back(q(z));
        return out;
    }

    double norm_sq(std::span<const Complex> z) const {
        double s = 0.0;
        for (const auto& q : values_) s += std::norm(q(z));
        return s;
    }

    Jet jet(std::span<const Complex> z) const {
        detail::require_dim(z.size(), n_, "Generators::jet");
        Jet j;
        j.g = values(z);
        j.dg.resize(static_cast<Eigen::Index>(p()), static_cast<Eigen::Index>(n_));
        for (std::size_t k = 0; k < p(); ++k)
            for (std::size_t a = 0; a < n_; ++a)
                j.dg(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(a)) = derivs_[k][a](z);
        j.norm_sq = squared_norm(j.g);
        return j;
    }

private:
    std::vector<Polynomial> exact_;
    std::size_t n_ = 0;
    std::vector<NumericPolynomial> values_;
    std::vector<std::vector<NumericPolynomial>> derivs_;
};

/// d_alpha log|g|^2 = |g|^{-2} sum_k conj(g_k) d_alpha g_k.
inline VectorXcd grad_log_g(const Jet& j) {
    if (!(j.norm_sq >= kMinNormSq)) throw CommonZeroError("log|g|^2 evaluated at a (near) common zero of g");
    VectorXcd gbar(j.dg.rows());
    for (Eigen::Index k = 0; k < gbar.size(); ++k) gbar(k) = std::conj(j.g[static_cast<std::size_t>(k)]);
    return (j.dg.transpose() * gbar) / j.norm_sq;
}

/// H_{a b} = |g|^{-2} sum_k d_a g_k conj(d_b g_k) - |g|^{-4} (sum_k conj(g_k) d_a g_k) conj(sum_k conj(g_k) d_b g_k).
inline MatrixXcd hessian_log_g_matrix(const Jet& j) {
    const VectorXcd dl = grad_log_g(j);
    MatrixXcd h = (j.dg.transpose() * j.dg.conjugate()) / j.norm_sq;
    h -= dl * dl.adjoint();
    return h;
}

inline HermitianMatrix hessian_log_g(const Generators& g, std::span<const Complex> z) {
    return HermitianMatrix(hessian_log_g_matrix(g.jet(z)), 1e-10);
}

inline HermitianMatrix hessian_log_g(const std::vector<Polynomial>& g, std::span<const Complex> z) {
    return hessian_log_g(Generators(g), z);
}

/// psi together with its exact first and mixed second derivatives.
class PsiJet {
public:
    PsiJet() = default;
    explicit PsiJet(HermitianPolynomial psi) : psi_(std::move(psi)) {
        if (!psi_.is_hermitian()) throw std::invalid_argument("psi must be Hermitian symmetric (real valued)");
        const std::size_t n = psi_.num_vars();
        for (std::size_t a = 0; a < n; ++a) {
            HermitianPolynomial da = psi_.d_hol(a);
            std::vector<HermitianPolynomial> row;
            for (std::size_t b = 0; b < n; ++b) row.push_back(da.d_anti(b));
            mixed_.push_back(std::move(row));
        }
    }

    const HermitianPolynomial& polynomial() const { return psi_; }

    double value(std::span<const Complex> z) const { return psi_.is_zero() ? 0.0 : psi_.eval(z); }

    /// d_a dbar_b psi at z; zero matrix of size n when psi = 0.
    MatrixXcd hessian(std::span<const Complex> z) const {
        const auto n = static_cast<Eigen::Index>(z.size());
        MatrixXcd h = MatrixXcd::Zero(n, n);
        if (psi_.is_zero()) return h;
        detail::require_dim(z.size(), psi_.num_vars(), "PsiJet::hessian");
        for (Eigen::Index a = 0; a < n; ++a)
            for (Eigen::Index b = 0; b < n; ++b)
                h(a, b) = mixed_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)].eval_complex(z);
        return h;
    }

private:
    HermitianPolynomial psi_;
    std::vector<std::vector<HermitianPolynomial>> mixed_;
};

/// Constant twist: a = 1 - lambda, b = tau (1 - lambda),
/// phi_1 = q l tau log|g|^2 + psi.
struct ConstantTwist {
    double tau = 2.0;
    double lambda = 0.5;
};

/// Triple twist: xi = 1 - log|g|^2, a = xi + F(xi), b, lambda from the triple,
/// phi_1 = -phi(xi) + psi + q l log|g|^2.
struct TripleTwist {
    triples::SkodaTriple triple;
};

/// Values of the weight data at a point.
struct WeightPoint {
    double log_g = 0.0;  // log|g|^2
    double xi = 0.0;     // 1 - log|g|^2 (triple mode)
    double phi1 = 0.0;
    double phi2 = 0.0;
    double a = 0.0;
    double b = 0.0;
    double lambda = 0.0;
};

class WeightSystem {
public:
    WeightSystem() = default;

    static WeightSystem theorem1(double tau, double lambda, int q, int ell, HermitianPolynomial psi = {}) {
        if (!(tau > 1.0)) throw std::invalid_argument("theorem1 weight: tau must exceed 1");
        if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("theorem1 weight: lambda must lie in (0,1)");
        WeightSystem w;
        w.twist_ = ConstantTwist{tau, lambda};
        w.q_ = q;
        w.ell_ = ell;
        w.psi_ = make_psi(std::move(psi));
        return w;
    }

    /// Default lambda: the midpoint of the interval (0, 1 - 1/tau) that keeps b > 1.
    static WeightSystem theorem1(double tau, int q, int ell, HermitianPolynomial psi = {}) {
        if (!(tau > 1.0)) throw std::invalid_argument("theorem1 weight: tau must exceed 1");
        return theorem1(tau, 0.5 * (1.0 - 1.0 / tau), q, ell, std::move(psi));
    }

    static WeightSystem theorem2(triples::SkodaTriple triple, int ell, HermitianPolynomial psi = {}) {
        WeightSystem w;
        w.q_ = triple.q;
        w.ell_ = ell;
        w.twist_ = TripleTwist{std::move(triple)};
        w.psi_ = make_psi(std::move(psi));
        return w;
    }

    bool is_theorem1() const { return std::holds_alternative<ConstantTwist>(twist_); }
    const ConstantTwist& constant_twist() const { return std::get<ConstantTwist>(twist_); }
    const triples::SkodaTriple& triple() const { return std::get<TripleTwist>(twist_).triple; }
    int q() const { return q_; }
    int ell() const { return ell_; }
    const PsiJet& psi() const { return psi_; }

    /// b = tau (1 - lambda) in constant mode; the strict requirement b > 1.
    bool constants_admissible() const {
        if (!is_theorem1()) return true;
        const auto& c = constant_twist();
        return c.tau * (1.0 - c.lambda) > 1.0;
    }

    WeightPoint evaluate(double g_norm_sq, std::span<const Complex> z) const {
        if (!(g_norm_sq >= kMinNormSq)) throw CommonZeroError("weight evaluated at a (near) common zero of g");
        WeightPoint w;
        w.log_g = std::log(g_norm_sq);
        const double psi = psi_.value(z);
        const double ql = static_cast<double>(q_) * ell_;
        if (is_theorem1()) {
            const auto& c = constant_twist();
            w.a = 1.0 - c.lambda;
            w.b = c.tau * (1.0 - c.lambda);
            w.lambda = c.lambda;
            w.phi1 = ql * c.tau * w.log_g + psi;
        } else {
            const auto& t = triple();
            w.xi = 1.0 - w.log_g;
            if (!(w.xi > 1.0)) throw std::domain_error("triple weight requires |g| < 1");
            const auto d = triples::derived(t, ell_, w.xi);
            w.a = d.a;
            w.b = d.b;
            w.lambda = d.lambda;
            w.phi1 = -t.phi.value(w.xi) + psi + ql * w.log_g;
        }
        w.phi2 = w.phi1 + w.log_g;
        return w;
    }

private:
    static PsiJet make_psi(HermitianPolynomial psi) { return PsiJet(std::move(psi)); }

    std::variant<ConstantTwist, TripleTwist> twist_;
    int q_ = 1;
    int ell_ = 1;
    PsiJet psi_;
};

struct Condition15 {
    MatrixXcd form;                // M
    double margin = 0.0;           // min eigenvalue of M
    double scale = 0.0;            // sum of Frobenius norms of the four terms
    double min_eig_log_hessian = 0.0;
    WeightPoint weights;
};

/// Assembles M at z and returns its least eigenvalue; margin >= 0 certifies the condition at z.
inline Condition15 condition15_margin(const WeightSystem& w, const Generators& g, std::span<const Complex> z) {
    const Jet j = g.jet(z);
    const VectorXcd dl = grad_log_g(j);
    const MatrixXcd h = hessian_log_g_matrix(j);
    const MatrixXcd hpsi = w.psi().hessian(z);
    const double ql = static_cast<double>(w.q()) * w.ell();

    Condition15 out;
    out.weights = w.evaluate(j.norm_sq, z);
    const auto& wp = out.weights;
    const auto n = static_cast<Eigen::Index>(z.size());

    MatrixXcd ddphi1, dda = MatrixXcd::Zero(n, n);
    VectorXcd da = VectorXcd::Zero(n);
    if (w.is_theorem1()) {
        ddphi1 = ql * w.constant_twist().tau * h + hpsi;
    } else {
        const auto& t = w.triple();
        const double x = wp.xi;
        const MatrixXcd dldl = dl * dl.adjoint();
        // d xi = -d log|g|^2, dd-bar xi = -H.
        ddphi1 = -t.phi.d2(x) * dldl + t.phi.d1(x) * h + hpsi + ql * h;
        const double one_plus_dF = 1.0 + t.F.d1(x);
        da = -one_plus_dF * dl;
        dda = t.F.d2(x) * dldl - one_plus_dF * h;
    }
    const MatrixXcd t1 = wp.a * ddphi1;
    const MatrixXcd t3 = (da * da.adjoint()) / wp.lambda;
    const MatrixXcd t4 = ql * wp.a * wp.b * h;
    out.form = t1 - dda - t3 - t4;
    out.scale = t1.norm() + dda.norm() + t3.norm() + t4.norm();
    out.margin = HermitianMatrix(out.form, 1e-9).min_eigenvalue();
    out.min_eig_log_hessian = HermitianMatrix(h, 1e-9).min_eigenvalue();
    return out;
}

struct LagrangeSides {
    double lhs = 0.0;
    double rhs = 0.0;
    double hessian_form = 0.0;  // sum_j sum_{a,b} H_{ab} v_{j I a} conj(v_{j I b})
};

/// The three expressions equated by the Lagrange identity step, for fixed base I:
///   lhs = |g|^{-4} sum_{i, j<k} |sum_a (g_j dg_{ka} - g_k dg_{ja}) v_{i I a}|^2
///   rhs = |g|^{-2} sum_{j,k} |sum_a dg_{ka} v_{j I a}|^2 - |g|^{-4} sum_j |sum_{k,a} conj(g_k) dg_{ka} v_{j I a}|^2
inline LagrangeSides lagrange_identity_check(std::span<const Complex> g, const MatrixXcd& dg, const SkewVectorArray& v,
                                             const MultiIndex& base) {
    const std::size_t p = g.size();
    const auto n = static_cast<std::size_t>(dg.cols());
    if (static_cast<std::size_t>(dg.rows()) != p || v.p != p || v.n != n) throw DimensionError("lagrange: shape mismatch");
    if (base.degree() + 1 != v.degree) throw DimensionError("lagrange: base length must be l-1");
    const double ns = squared_norm(g);
    if (!(ns > 0.0)) throw CommonZeroError("lagrange: g = 0");

    auto vi = [&](unsigned i, std::size_t a) { return v.at(i, base, a); };
    LagrangeSides out;
    double s = 0.0;
    for (unsigned i = 0; i < p; ++i)
        for (unsigned j = 0; j < p; ++j)
            for (unsigned k = j + 1; k < p; ++k) {
                Complex t = 0.0;
                for (std::size_t a = 0; a < n; ++a)
                    t += (g[j] * dg(k, static_cast<Eigen::Index>(a)) - g[k] * dg(j, static_cast<Eigen::Index>(a))) * vi(i, a);
                s += std::norm(t);
            }
    out.lhs = s / (ns * ns);

    double first = 0.0, second = 0.0;
    for (unsigned j = 0; j < p; ++j) {
        Complex inner_sum = 0.0;
        for (unsigned k = 0; k < p; ++k) {
            Complex t = 0.0;
            for (std::size_t a = 0; a < n; ++a) t += dg(k, static_cast<Eigen::Index>(a)) * vi(j, a);
            first += std::norm(t);
            inner_sum += std::conj(g[k]) * t;
        }
        second += std::norm(inner_sum);
    }
    out.rhs = first / ns - second / (ns * ns);

    Jet jet{std::vector<Complex>(g.begin(), g.end()), dg, ns};
    const MatrixXcd h = hessian_log_g_matrix(jet);
    double hf = 0.0;
    for (unsigned j = 0; j < p; ++j) {
        VectorXcd vj(static_cast<Eigen::Index>(n));
        for (std::size_t a = 0; a < n; ++a) vj(static_cast<Eigen::Index>(a)) = vi(j, a);
        hf += (vj.transpose() * h * vj.conjugate())(0, 0).real();
    }
    out.hessian_form = hf;
    return out;
}

}  // namespace koszul::curvature

#endif  // KOSZUL_CURVATURE_HPP
