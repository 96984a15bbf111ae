#ifndef KOSZUL_DIVISION_HPP
#define KOSZUL_DIVISION_HPP

// Division problems iota_g u = f: the pointwise minimal solution
// conj(g) ^ f / |g|^2, an exact degree-bounded polynomial solver, weighted
// least-squares selection inside the affine solution space, and Monte Carlo
// checks of the weighted L^2 bounds.

#include "koszul/curvature.hpp"
#include "koszul/exact_solver.hpp"
#include "koszul/exterior.hpp"
#include "koszul/lemma1.hpp"
#include "koszul/polynomial.hpp"
#include "koszul/quadrature.hpp"
#include "koszul/triples.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace koszul::division {

using curvature::WeightSystem;
using quadrature::Domain;

inline constexpr std::size_t kMaxUnknowns = 1000000;
inline constexpr double kDefaultCutoff = 1e-12;

class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DivisionProblem {
    std::vector<Polynomial> g;
    PolynomialElement f;  // degree ell - 1
    std::size_t ell = 1;
    std::optional<WeightSystem> weight;
    std::optional<Domain> domain;

    std::size_t p() const { return g.size(); }
    std::size_t n() const { return g.empty() ? 0 : g.front().num_vars(); }
    std::size_t q() const { return lemma1::q_constant(p(), n(), ell); }

    /// Shapes, and the hypothesis contract(g, f) = 0 checked exactly.
    void validate() const {
        if (g.empty()) throw std::invalid_argument("problem: g is empty");
        for (const auto& gi : g)
            if (gi.num_vars() != n()) throw DimensionError("problem: generators use different variable counts");
        if (ell < 1 || ell > p()) throw std::invalid_argument("problem: require 1 <= l <= p");
        if (f.generators() != p() || f.degree() != ell - 1) throw DimensionError("problem: f must have degree l-1 over p generators");
        for (const auto& [k, c] : f.entries())
            if (c.num_vars() != n()) throw DimensionError("problem: f uses a different variable count");
        if (domain && domain->dim() != n()) throw DimensionError("problem: domain dimension differs from n");
        if (ell >= 2 && !contract(g, f).is_zero()) throw std::invalid_argument("problem: contract(g, f) != 0");
    }
};

struct DivisionWitness {
    PolynomialElement u;
    PolynomialElement residual;  // contract(g, u) - f
    int degree_cap = 0;
};

struct NoSolutionAtCap {
    int degree_cap = 0;
    std::size_t unknowns = 0;
    std::size_t equations = 0;
    std::size_t rank = 0;
};

using SolveResult = std::variant<DivisionWitness, NoSolutionAtCap>;

/// All exponent vectors with every entry <= cap, graded by total degree then lexicographic.
inline std::vector<Monomial> box_monomials(std::size_t n, int cap) {
    if (cap < 0) throw std::invalid_argument("degree cap must be nonnegative");
    std::vector<Monomial> out;
    Monomial m(n, 0);
    while (true) {
        out.push_back(m);
        std::size_t v = 0;
        while (v < n && m[v] == static_cast<unsigned>(cap)) m[v++] = 0;
        if (v == n) break;
        ++m[v];
    }
    std::stable_sort(out.begin(), out.end(), [](const Monomial& a, const Monomial& b) {
        const unsigned da = total_degree(a), db = total_degree(b);
        return da != db ? da < db : a < b;
    });
    return out;
}

/// Unknowns are the coefficients of u_K (K of degree l) on the box monomials,
/// ordered key-major; equations match coefficients of contract(g, u) and f.
struct DivisionSystem {
    ExactSystem system;
    std::vector<MultiIndex> keys;
    std::vector<Monomial> monomials;
    std::size_t n = 0;

    PolynomialElement element(const std::vector<GaussianRational>& x, std::size_t p, std::size_t ell) const {
        PolynomialElement u(p, ell);
        const std::size_t per_key = monomials.size();
        for (std::size_t k = 0; k < keys.size(); ++k) {
            Polynomial q(n);
            for (std::size_t m = 0; m < per_key; ++m) q.add_term(monomials[m], x[k * per_key + m]);
            u.set(keys[k], std::move(q));
        }
        return u;
    }
};

inline DivisionSystem build_system(const DivisionProblem& prob, int cap) {
    prob.validate();
    DivisionSystem ds;
    ds.n = prob.n();
    ds.keys = all_multi_indices(prob.p(), prob.ell);
    ds.monomials = box_monomials(ds.n, cap);
    const std::size_t unknowns = ds.keys.size() * ds.monomials.size();
    if (unknowns > kMaxUnknowns) throw std::length_error("division system exceeds the unknown-count guard");
    ds.system.cols = unknowns;

    std::map<std::pair<MultiIndex, Monomial>, std::size_t> row_of;
    auto row = [&](const MultiIndex& key, const Monomial& m) {
        auto [it, inserted] = row_of.try_emplace({key, m}, 0);
        if (inserted) it->second = ds.system.add_row();
        return it->second;
    };
    for (std::size_t k = 0; k < ds.keys.size(); ++k) {
        const MultiIndex& K = ds.keys[k];
        for (std::size_t mi = 0; mi < ds.monomials.size(); ++mi) {
            const std::size_t col = k * ds.monomials.size() + mi;
            for (std::size_t s = 0; s < K.degree(); ++s) {
                const MultiIndex I = K.without(s);
                for (const auto& [e, c] : prob.g[K[s]].terms()) {
                    auto& entry = ds.system.rows[row(I, add_exponents(e, ds.monomials[mi]))][col];
                    entry = (s % 2 == 0) ? entry + c : entry - c;
                }
            }
        }
    }
    for (const auto& [I, q] : prob.f.entries())
        for (const auto& [m, c] : q.terms()) ds.system.rhs[row(I, m)] += c;
    // Drop exact cancellations so the dense stage starts from true zeros.
    for (auto& r : ds.system.rows)
        for (auto it = r.begin(); it != r.end();) it = it->second.is_zero() ? r.erase(it) : std::next(it);
    return ds;
}

/// Exact pivot-basic witness with every exponent of u bounded by cap, or NoSolutionAtCap.
inline SolveResult solve(const DivisionProblem& prob, int cap) {
    const DivisionSystem ds = build_system(prob, cap);
    const ExactSolution sol = solve_exact(ds.system);
    if (!sol.consistent) return NoSolutionAtCap{cap, ds.system.cols, ds.system.rows.size(), sol.rank};
    DivisionWitness w;
    w.u = ds.element(sol.particular, prob.p(), prob.ell);
    w.residual = contract(prob.g, w.u) - prob.f;
    w.degree_cap = cap;
    if (!w.residual.is_zero()) throw std::logic_error("solve: nonzero residual from an exact solution");
    return w;
}

/// First cap in [0, max_cap] at which the problem is solvable.
inline SolveResult solve_up_to(const DivisionProblem& prob, int max_cap) {
    SolveResult last = NoSolutionAtCap{};
    for (int cap = 0; cap <= max_cap; ++cap) {
        last = solve(prob, cap);
        if (std::holds_alternative<DivisionWitness>(last)) return last;
    }
    return last;
}

inline int default_degree_cap(const DivisionProblem& prob) { return std::max(degree(prob.f), 0) + 6; }

/// particular + span(directions) is every solution with exponents bounded by cap.
struct AffineSolutionSpace {
    PolynomialElement particular;
    std::vector<PolynomialElement> directions;
    int degree_cap = 0;
};

inline std::optional<AffineSolutionSpace> solution_space(const DivisionProblem& prob, int cap) {
    const DivisionSystem ds = build_system(prob, cap);
    const ExactSolution sol = solve_exact(ds.system, true);
    if (!sol.consistent) return std::nullopt;
    AffineSolutionSpace s;
    s.degree_cap = cap;
    s.particular = ds.element(sol.particular, prob.p(), prob.ell);
    for (const auto& v : sol.nullspace) s.directions.push_back(ds.element(v, prob.p(), prob.ell));
    return s;
}

/// conj(g(z)) ^ f(z) / |g(z)|^2; contract(g(z), result) = f(z) when contract(g, f) = 0.
inline ComplexElement pointwise_solution(std::span<const Polynomial> g, const PolynomialElement& f,
                                         std::span<const Complex> z) {
    const auto gz = evaluate(g, z);
    const double ns = squared_norm(gz);
    if (!(ns >= curvature::kMinNormSq)) throw curvature::CommonZeroError("pointwise_solution: common zero of g");
    const ComplexElement fz = evaluate(f, z);
    return Complex(1.0 / ns) * wedge_conj(gz, fz);
}

inline ComplexElement pointwise_solution(const std::vector<Polynomial>& g, const PolynomialElement& f,
                                         std::span<const Complex> z) {
    return pointwise_solution(std::span<const Polynomial>(g), f, z);
}

/// Float image of a polynomial element for fast repeated evaluation.
class NumericElement {
public:
    NumericElement() = default;
    explicit NumericElement(const PolynomialElement& e) : p_(e.generators()), degree_(e.degree()) {
        for (const auto& [k, q] : e.entries()) parts_.emplace_back(k, NumericPolynomial(q));
    }
    ComplexElement operator()(std::span<const Complex> z) const {
        ComplexElement out(p_, degree_);
        for (const auto& [k, q] : parts_) out.set(k, q(z));
        return out;
    }
    double norm_sq(std::span<const Complex> z) const {
        double s = 0.0;
        for (const auto& [k, q] : parts_) s += std::norm(q(z));
        return s;
    }

private:
    std::size_t p_ = 0, degree_ = 0;
    std::vector<std::pair<MultiIndex, NumericPolynomial>> parts_;
};

/// Solution-side weight of the problem's weight system at z, or nullopt
/// below the cutoff: e^{-phi_1} (constant twist), e^{-phi_1}/(a+lambda)
/// (triple twist), 1 when the problem has no weight.
inline std::function<std::optional<double>(std::span<const Complex>)> solution_weight(
    const DivisionProblem& prob, const curvature::Generators& gens, double cutoff) {
    return [&prob, &gens, cutoff](std::span<const Complex> z) -> std::optional<double> {
        const double ns = gens.norm_sq(z);
        if (ns < cutoff) return std::nullopt;
        if (!prob.weight) return 1.0;
        const auto wp = prob.weight->evaluate(ns, z);
        const double base = std::exp(-wp.phi1);
        return prob.weight->is_theorem1() ? base : base / (wp.a + wp.lambda);
    };
}

struct SampleOptions {
    std::size_t samples = 20000;
    std::uint64_t seed = 0;
    double cutoff = kDefaultCutoff;
    unsigned workers = 1;
};

/// Monte Carlo estimate of the integral of w |u|^2 over the problem domain.
inline quadrature::IntegralEstimate sampled_weighted_norm(const DivisionProblem& prob, const PolynomialElement& u,
                                                          const SampleOptions& opt) {
    if (!prob.domain) throw std::invalid_argument("sampled_weighted_norm: problem has no domain");
    const curvature::Generators gens(prob.g);
    const auto w = solution_weight(prob, gens, opt.cutoff);
    const NumericElement un(u);
    quadrature::Integrand f = [&](std::span<const Complex> z) -> std::optional<double> {
        const auto wz = w(z);
        if (!wz) return std::nullopt;
        return *wz * un.norm_sq(z);
    };
    return quadrature::integrate(f, *prob.domain, {opt.samples, opt.seed, opt.workers});
}

namespace detail {

// Integral of |z^a|^2 over an origin-centered polydisc or ball, divided by the volume.
inline double monomial_moment(const Domain& d, const Monomial& a) {
    const auto n = static_cast<double>(a.size());
    if (d.kind() == Domain::Kind::Polydisc) {
        double m = 1.0;
        for (std::size_t j = 0; j < a.size(); ++j) m *= std::pow(d.radii()[j], 2.0 * a[j]) / (a[j] + 1.0);
        return m;
    }
    // pi^n r^{2|a|+2n} a! / (|a|+n)!  over  pi^n r^{2n} / n!
    const double abs_a = total_degree(a);
    double lg = std::lgamma(n + 1.0) - std::lgamma(abs_a + n + 1.0);
    for (unsigned e : a) lg += std::lgamma(e + 1.0);
    return std::exp(lg) * std::pow(d.radius(), 2.0 * abs_a);
}

inline bool origin_centered(const Domain& d) {
    for (const auto& c : d.center())
        if (c != Complex(0.0)) return false;
    return true;
}

inline Complex exact_unit_inner(const Domain& d, const PolynomialElement& u, const PolynomialElement& v) {
    Complex s = 0.0;
    for (const auto& [k, qu] : u.entries()) {
        auto it = v.entries().find(k);
        if (it == v.entries().end()) continue;
        for (const auto& [m, c] : qu.terms()) {
            const GaussianRational cv = it->second.coefficient(m);
            if (cv.is_zero()) continue;
            s += c.to_complex() * std::conj(cv.to_complex()) * monomial_moment(d, m);
        }
    }
    return s;
}

}  // namespace detail

/// Minimizer of the weighted norm over the affine solution space at cap.
/// Unit weight on an origin-centered domain uses exact monomial moments;
/// otherwise the norm is the sampled sum over the seeded points. The
/// coefficients are converted back exactly, so the residual stays zero.
inline DivisionWitness minimal_weighted_witness(const DivisionProblem& prob, int cap, const SampleOptions& opt) {
    auto space = solution_space(prob, cap);
    if (!space) throw std::invalid_argument("minimal_weighted_witness: no solution at this degree cap");
    DivisionWitness w;
    w.degree_cap = cap;
    if (space->directions.empty()) {
        w.u = space->particular;
        w.residual = contract(prob.g, w.u) - prob.f;
        return w;
    }
    if (!prob.domain) throw std::invalid_argument("minimal_weighted_witness: problem has no domain");
    const std::size_t k = space->directions.size();
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(k));

    if (!prob.weight && detail::origin_centered(*prob.domain)) {
        for (std::size_t a = 0; a < k; ++a) {
            rhs(static_cast<Eigen::Index>(a)) =
                detail::exact_unit_inner(*prob.domain, space->particular, space->directions[a]);
            for (std::size_t b = 0; b < k; ++b)
                gram(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                    detail::exact_unit_inner(*prob.domain, space->directions[b], space->directions[a]);
        }
    } else {
        const curvature::Generators gens(prob.g);
        const auto weight = solution_weight(prob, gens, opt.cutoff);
        const NumericElement u0(space->particular);
        std::vector<NumericElement> dirs;
        for (const auto& d : space->directions) dirs.emplace_back(d);
        const auto keys = all_multi_indices(prob.p(), prob.ell);
        Eigen::MatrixXcd vals(static_cast<Eigen::Index>(keys.size()), static_cast<Eigen::Index>(k));
        Eigen::VectorXcd base(static_cast<Eigen::Index>(keys.size()));
        for (std::size_t s = 0; s < opt.samples; ++s) {
            const auto z = quadrature::sample_point(*prob.domain, opt.seed, s);
            const auto wz = weight(z);
            if (!wz) continue;
            const ComplexElement b0 = u0(z);
            for (std::size_t r = 0; r < keys.size(); ++r) base(static_cast<Eigen::Index>(r)) = b0.get(keys[r]);
            for (std::size_t a = 0; a < k; ++a) {
                const ComplexElement da = dirs[a](z);
                for (std::size_t r = 0; r < keys.size(); ++r)
                    vals(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(a)) = da.get(keys[r]);
            }
            // Normal equations: sum_s w (N^* N) t = -sum_s w N^* u0.
            gram.noalias() += *wz * vals.adjoint() * vals;
            rhs.noalias() += *wz * vals.adjoint() * base;
        }
    }
    Eigen::VectorXcd t;
    Eigen::LDLT<Eigen::MatrixXcd> ldlt(gram);
    if (ldlt.info() == Eigen::Success && ldlt.isPositive()) t = ldlt.solve(-rhs);
    if (t.size() == 0 || !t.allFinite() || (gram * t + rhs).norm() > 1e-8 * std::max(rhs.norm(), 1e-300))
        t = gram.completeOrthogonalDecomposition().solve(-rhs);

    PolynomialElement u = space->particular;
    for (std::size_t a = 0; a < k; ++a) {
        const auto ta = GaussianRational::from_double(t(static_cast<Eigen::Index>(a)));
        if (ta.is_zero()) continue;
        u += space->directions[a].transform([&](const Polynomial& q) { return q * ta; });
    }
    w.u = std::move(u);
    w.residual = contract(prob.g, w.u) - prob.f;
    if (!w.residual.is_zero()) throw std::logic_error("minimal_weighted_witness: nonzero residual");
    return w;
}

enum class Theorem { T1, Cor2, Cor3 };

inline std::string to_string(Theorem t) {
    switch (t) {
        case Theorem::T1: return "t1";
        case Theorem::Cor2: return "cor2";
        case Theorem::Cor3: return "cor3";
    }
    return "?";
}

enum class Verdict { Satisfied, Violated, Inconclusive };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Satisfied: return "SATISFIED";
        case Verdict::Violated: return "VIOLATED";
        case Verdict::Inconclusive: return "INCONCLUSIVE";
    }
    return "?";
}

struct TheoremSpec {
    Theorem theorem = Theorem::T1;
    double parameter = 2.0;  // tau for t1, eps for cor2/cor3
};

struct EstimateReport {
    TheoremSpec spec;
    std::size_t q = 0;
    double constant = 0.0;                    // tau/(tau-1), (ql+eps+1)/eps or (2+ql) D_eps
    quadrature::IntegralEstimate lhs;         // solution side
    quadrature::IntegralEstimate hypothesis;  // data-side integral, without the constant
    double rhs = 0.0;                         // constant * hypothesis
    double rhs_stderr = 0.0;
    double difference_stderr = 0.0;           // of rhs - lhs on matched samples
    double ratio = 0.0;                       // lhs / rhs
    bool residual_zero = false;
    Verdict verdict = Verdict::Inconclusive;
    std::vector<std::string> notes;
};

/// Rejected-sample fraction above which the hypothesis integral is treated as divergence evidence.
inline constexpr double kMaxRejectedFraction = 0.01;

/// Estimates both sides of the chosen L^2 bound on matched samples.
/// `witness_is_minimal` marks witnesses from minimal_weighted_witness; only
/// those can carry the "bound not achieved within ansatz" note.
inline EstimateReport verify_estimate(const DivisionProblem& prob, const DivisionWitness& witness, TheoremSpec spec,
                                      const SampleOptions& opt, bool witness_is_minimal = false) {
    prob.validate();
    if (!prob.domain) throw std::invalid_argument("verify_estimate: problem has no domain");
    if (spec.theorem == Theorem::T1 && !(spec.parameter > 1.0)) throw std::invalid_argument("t1 requires tau > 1");
    if (spec.theorem != Theorem::T1 && !(spec.parameter > 0.0)) throw std::invalid_argument("cor2/cor3 require eps > 0");

    EstimateReport rep;
    rep.spec = spec;
    rep.q = prob.q();
    const double ql = static_cast<double>(rep.q) * static_cast<double>(prob.ell);
    const double par = spec.parameter;
    switch (spec.theorem) {
        case Theorem::T1: rep.constant = par / (par - 1.0); break;
        case Theorem::Cor2: rep.constant = (ql + par + 1.0) / par; break;
        case Theorem::Cor3: rep.constant = (2.0 + ql) * triples::cor3_constant(par); break;
    }

    const curvature::Generators gens(prob.g);
    const NumericElement un(witness.u), fn(prob.f);
    curvature::PsiJet psi;
    if (prob.weight) psi = prob.weight->psi();
    const double cutoff = opt.cutoff;

    // Solution-side and data-side weights as functions of |g|^2 and psi.
    auto weights = [&](double ns, double psi_v) -> std::pair<double, double> {
        const double e_psi = std::exp(-psi_v);
        switch (spec.theorem) {
            case Theorem::T1:
                return {std::pow(ns, -ql * par) * e_psi, std::pow(ns, -(ql * par + 1.0)) * e_psi};
            case Theorem::Cor2: {
                const double xi = 1.0 - std::log(ns);
                return {std::pow(xi, par - 1.0) * std::pow(ns, -ql) * e_psi,
                        std::pow(xi, par) * std::pow(ns, -(ql + 1.0)) * e_psi};
            }
            case Theorem::Cor3:
                return {std::pow(ns, par - ql) * e_psi, std::pow(ns, -(ql + 1.0)) * e_psi};
        }
        return {0.0, 0.0};
    };

    struct Cache {
        double ns, psi;
    };
    auto point = [&](std::span<const Complex> z) { return Cache{gens.norm_sq(z), psi.value(z)}; };

    std::vector<quadrature::Integrand> fs;
    fs.push_back([&](std::span<const Complex> z) -> std::optional<double> {
        const auto c = point(z);
        if (c.ns < cutoff) return std::nullopt;
        return weights(c.ns, c.psi).first * un.norm_sq(z);
    });
    fs.push_back([&](std::span<const Complex> z) -> std::optional<double> {
        const auto c = point(z);
        if (c.ns < cutoff) return std::nullopt;
        return weights(c.ns, c.psi).second * fn.norm_sq(z);
    });
    fs.push_back([&](std::span<const Complex> z) -> std::optional<double> {
        const auto c = point(z);
        if (c.ns < cutoff) return std::nullopt;
        const auto [wl, wr] = weights(c.ns, c.psi);
        return rep.constant * wr * fn.norm_sq(z) - wl * un.norm_sq(z);
    });
    // Indicator of |g| >= 1, for the cor2/cor3 hypothesis |g| < 1 on the domain.
    fs.push_back([&](std::span<const Complex> z) -> std::optional<double> { return gens.norm_sq(z) >= 1.0 ? 1.0 : 0.0; });

    const auto est = quadrature::integrate_many(fs, *prob.domain, {opt.samples, opt.seed, opt.workers});
    if (spec.theorem != Theorem::T1 && est[3].max_integrand > 0.0)
        throw PreconditionError(to_string(spec.theorem) + " requires |g| < 1 on the domain; a sample has |g| >= 1");

    rep.lhs = est[0];
    rep.hypothesis = est[1];
    rep.rhs = rep.constant * est[1].mean;
    rep.rhs_stderr = rep.constant * est[1].standard_error;
    rep.difference_stderr = est[2].standard_error;
    rep.ratio = rep.rhs > 0.0 ? rep.lhs.mean / rep.rhs : (rep.lhs.mean > 0.0 ? INFINITY : 0.0);
    rep.residual_zero = (contract(prob.g, witness.u) - prob.f).is_zero();

    if (!std::isfinite(rep.lhs.mean) || !std::isfinite(rep.rhs)) {
        rep.verdict = Verdict::Inconclusive;
        rep.notes.push_back("non-finite estimate");
    } else if (!rep.residual_zero) {
        rep.verdict = Verdict::Violated;
        rep.notes.push_back("witness does not satisfy contract(g, u) = f");
    } else if (rep.hypothesis.rejected_fraction() >= kMaxRejectedFraction) {
        rep.verdict = Verdict::Inconclusive;
        rep.notes.push_back("divergence evidence: rejected fraction of the hypothesis integral >= 1%");
    } else if (rep.lhs.mean <= rep.rhs) {
        rep.verdict = Verdict::Satisfied;
    } else {
        rep.verdict = Verdict::Inconclusive;
        if (witness_is_minimal && rep.lhs.mean - rep.rhs > 5.0 * rep.difference_stderr)
            rep.notes.push_back("bound not achieved within ansatz");
    }
    return rep;
}

}  // namespace koszul::division

#endif  // KOSZUL_DIVISION_HPP
