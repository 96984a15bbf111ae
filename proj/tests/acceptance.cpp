// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "koszul/curvature.hpp"
#include "koszul/division.hpp"
#include "koszul/exterior.hpp"
#include "koszul/lemma1.hpp"
#include "koszul/quadrature.hpp"
#include "koszul/random.hpp"
#include "koszul/triples.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

using namespace koszul;

namespace {

constexpr std::uint64_t kSeed = 20240607;
constexpr double kInequalityTol = 1e-9;
constexpr double kKernelTol = 1e-10;
constexpr double kIdentityTol = 1e-10;
constexpr double kConstantTol = 1e-12;
constexpr double kMarginTol = 1e-9;
constexpr double kSimplificationTol = 1e-8;
constexpr double kSigmas = 3.0;
constexpr double kMaxRejected = 0.01;

int failures = 0;

void report(int id, const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] %d %s: %s\n", ok ? "PASS" : "FAIL", id, name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double rel(double err, double scale) { return err / std::max(scale, 1e-300); }

Polynomial z(std::size_t n, std::size_t v) { return Polynomial::variable(n, v); }

void lemma1_criteria() {
    lemma1::BatchConfig cfg;
    cfg.seed = kSeed;
    cfg.instances = 100000;
    cfg.tolerance = kInequalityTol;
    cfg.kernel_tolerance = kKernelTol;
    cfg.workers = 0;
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = lemma1::verify_batch(cfg);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::size_t ineq = 0, rank = 0, other = 0;
    for (const auto& v : r.violations) {
        if (v.kind == "inequality") ++ineq;
        else if (v.kind == "rank" || v.kind == "kernel" || v.kind == "image") ++rank;
        else ++other;
    }
    report(1, "lemma1_inequality", ineq == 0 && r.instances == 100000 && secs < 60.0,
           fmt("%zu instances, %zu checks, max lhs/rhs %.9f, %zu violations, %.1f s", r.instances, r.checks, r.max_ratio,
               ineq, secs));
    report(2, "operator_rank_bound", rank == 0 && other == 0,
           fmt("%zu rank/kernel/image violations, %zu identity violations, rank attains q in %zu checks", rank, other,
               r.rank_at_bound));
}

void koszul_identities() {
    SplitMix64 eng(stream_seed(kSeed, 3));
    bool nil = true;
    for (int t = 0; t < 1000; ++t) {
        const std::size_t p = 2 + t % 4, n = 1 + t % 3, d = 2 + static_cast<std::size_t>(t) % (p - 1);
        std::vector<Polynomial> g;
        for (std::size_t k = 0; k < p; ++k) g.push_back(gen::polynomial(n, 2, 2, eng));
        nil = nil && contract(g, contract(g, gen::poly_element(p, d, n, eng))).is_zero();
    }
    double adj = 0.0, leib = 0.0, nrm = 0.0;
    for (int t = 0; t < 10000; ++t) {
        const std::size_t p = 1 + eng() % 5, l = 1 + eng() % p;
        const auto g = gen::complex_vector(p, eng);
        const double gn = squared_norm(g);
        const auto u = gen::complex_element(p, l, eng);
        const auto h = gen::complex_element(p, l - 1, eng);
        adj = std::max(adj, rel(std::abs(inner(contract(g, u), h) - inner(u, wedge_conj(g, h))),
                                std::sqrt(gn * norm_sq(u) * norm_sq(h))));
        auto diff = contract(g, wedge_conj(g, h));
        if (l >= 2) diff += wedge_conj(g, contract(g, h));
        diff -= Complex(gn) * h;
        leib = std::max(leib, rel(std::sqrt(norm_sq(diff)), gn * std::sqrt(norm_sq(h))));
        if (l < p) {
            const auto k = contract(g, gen::complex_element(p, l + 1, eng));
            nrm = std::max(nrm, rel(std::abs(norm_sq(wedge_conj(g, k)) - gn * norm_sq(k)), gn * norm_sq(k)));
        }
    }
    report(3, "koszul_identities", nil && adj <= kIdentityTol && leib <= kIdentityTol && nrm <= kIdentityTol,
           fmt("nilpotence exact on 1000: %s; max rel adjoint %.2e, Leibniz %.2e, norm %.2e (tol %.0e)",
               nil ? "yes" : "no", adj, leib, nrm, kIdentityTol));
}

void triple_constants() {
    const auto grid = triples::log_grid(1.0 + 1e-6, 50.0, 10000);
    double worst_sum = 0.0, worst_eff2 = -INFINITY, worst_eff3 = -INFINITY, worst_env = -INFINITY;
    bool valid = true;
    for (double eps : {0.1, 1.0, 10.0})
        for (int q : {1, 2, 3})
            for (int ell : {1, 2, 3}) {
                const auto tl = triples::SkodaTriple::log(eps, q);
                const auto te = triples::SkodaTriple::exp(eps, q);
                valid = valid && triples::validate(tl, grid.front(), grid.back(), grid.size()).valid &&
                        triples::validate(te, grid.front(), grid.back(), grid.size()).valid;
                for (double x : grid) {
                    const auto wl = triples::derived(tl, ell, x);
                    const double want = (1.0 + eps) * x / eps;
                    worst_sum = std::max(worst_sum, rel(std::abs(wl.a_plus_lambda - want), want));
                    worst_eff2 = std::max(worst_eff2, wl.efficiency / triples::cor2_efficiency_bound(eps, q, ell) - 1.0);
                    const auto we = triples::derived(te, ell, x);
                    worst_eff3 = std::max(worst_eff3, we.efficiency / (2.0 + q * ell) - 1.0);
                    worst_env = std::max(worst_env, we.a_plus_lambda / triples::cor3_envelope(eps, x) - 1.0);
                }
            }
    report(4, "log_triple_constants", valid && worst_sum <= kConstantTol && worst_eff2 <= kConstantTol,
           fmt("27 parameter sets x 10000 points; max rel |a+lambda - (1+eps)x/eps| %.2e, max efficiency/bound - 1 %.3e",
               worst_sum, worst_eff2));

    // D_eps recomputed from its defining expression
    bool constants = true;
    for (double eps : {0.1, 1.0, 10.0}) {
        const double d = std::exp(eps - 1.0) / eps + 2.0 * std::pow(1.0 / eps + 0.5, 2);
        constants = constants && std::abs(triples::cor3_constant(eps) - d) <= kConstantTol * d;
        for (int q : {1, 2, 3})
            for (int ell : {1, 2, 3})
                constants = constants &&
                            std::abs(triples::cor3_solution_constant(eps, q, ell) - (2.0 + q * ell) * d) <= kConstantTol * d;
    }
    constants = constants && triples::cor3_constant(1.0) == 5.5 && triples::cor3_solution_constant(1.0, 1, 1) == 16.5;
    report(5, "exp_triple_constants", valid && constants && worst_eff3 <= kConstantTol && worst_env <= kConstantTol,
           fmt("max efficiency/(2+ql) - 1 %.3e, max (a+lambda)/envelope - 1 %.3e, D_1 = %.4g, C_1 = %.4g", worst_eff3,
               worst_env, triples::cor3_constant(1.0), triples::cor3_solution_constant(1.0, 1, 1)));
}

void condition15() {
    const curvature::Generators g({z(2, 0) * GaussianRational(mpq_class(1, 2)), z(2, 1) * GaussianRational(mpq_class(1, 2))});
    const auto dom = quadrature::Domain::unit_polydisc(2);
    const std::vector<curvature::WeightSystem> ws = {
        curvature::WeightSystem::theorem2(triples::SkodaTriple::log(1.0, 1), 1),
        curvature::WeightSystem::theorem2(triples::SkodaTriple::exp(1.0, 1), 1),
        curvature::WeightSystem::theorem2(triples::SkodaTriple::combined(0.5, 0.5, 1.0, 1), 1)};
    const auto w1 = curvature::WeightSystem::theorem1(2.0, 1, 1);
    const auto& ct = w1.constant_twist();
    SplitMix64 eng(stream_seed(kSeed, 6));
    double worst = INFINITY, t1err = 0.0;
    int points = 0;
    while (points < 1000) {
        const auto pt = dom.sample(eng);
        const double ns = g.norm_sq(pt);
        if (ns < curvature::kMinNormSq || ns >= 1.0) continue;
        ++points;
        for (const auto& w : ws) {
            const auto c = curvature::condition15_margin(w, g, pt);
            worst = std::min(worst, c.margin / std::max(c.scale, 1e-300));
        }
        const auto c = curvature::condition15_margin(w1, g, pt);
        const Eigen::MatrixXcd want = ct.tau * ct.lambda * (1.0 - ct.lambda) * curvature::hessian_log_g_matrix(g.jet(pt));
        t1err = std::max(t1err, rel((c.form - want).norm(), std::max(want.norm(), c.scale)));
    }
    report(6, "curvature_margin", worst >= -kMarginTol && t1err <= kSimplificationTol,
           fmt("1000 points, min margin/scale over log/exp/combined %.3e; theorem-1 max rel deviation %.2e", worst, t1err));
}

void division_criterion() {
    using namespace division;
    bool examples = true;
    {
        DivisionProblem a;
        a.g = {z(3, 0), z(3, 1), z(3, 2)};
        a.ell = 2;
        a.f = PolynomialElement(3, 1);
        a.f.set(MultiIndex{0}, z(3, 1));
        a.f.set(MultiIndex{1}, -z(3, 0));
        const auto ra = solve(a, 0);
        PolynomialElement want(3, 2);
        want.set(MultiIndex{0, 1}, Polynomial::constant(3, -1));
        examples = examples && std::holds_alternative<DivisionWitness>(ra) && std::get<DivisionWitness>(ra).u == want &&
                   std::get<DivisionWitness>(ra).residual.is_zero();

        DivisionProblem b;
        b.g = {z(2, 0), z(2, 1)};
        b.f = PolynomialElement::scalar(2, z(2, 0) * z(2, 0) * z(2, 1) * z(2, 1));
        const auto rb = solve(b, 2);
        examples = examples && std::holds_alternative<DivisionWitness>(rb) &&
                   (contract(b.g, std::get<DivisionWitness>(rb).u) - b.f).is_zero();

        auto c = b;
        c.f = PolynomialElement::scalar(2, Polynomial::constant(2, 1));
        for (int cap = 0; cap <= 10; ++cap) examples = examples && std::holds_alternative<NoSolutionAtCap>(solve(c, cap));
    }

    DivisionProblem base;
    base.g = {z(2, 0), z(2, 1), Polynomial::constant(2, 1) - z(2, 0) * z(2, 1)};
    SplitMix64 eng(stream_seed(kSeed, 7));
    int solved = 0;
    for (int t = 0; t < 100; ++t) {
        DivisionProblem prob = base;
        prob.ell = 1 + static_cast<std::size_t>(t % 2);
        if (prob.ell == 1) prob.f = PolynomialElement::scalar(3, gen::polynomial(2, 2, 3, eng));
        else prob.f = contract(prob.g, gen::poly_element(3, 2, 2, eng, 1));
        const auto r = solve_up_to(prob, default_degree_cap(prob));
        if (const auto* w = std::get_if<DivisionWitness>(&r); w && (contract(prob.g, w->u) - prob.f).is_zero()) ++solved;
    }
    report(7, "division", examples && solved == 100,
           fmt("listed examples %s; zero-free generators solved %d/100; f = 1 unsolvable at caps 0..10",
               examples ? "exact" : "FAILED", solved));
}

void quadrature_criterion() {
    using namespace quadrature;
    const double pi = std::numbers::pi;
    const Integrand in_disc = [](std::span<const Complex> p) -> std::optional<double> { return std::norm(p[0]) < 1.0 ? 1.0 : 0.0; };
    const Integrand in_ball = [](std::span<const Complex> p) -> std::optional<double> {
        return std::norm(p[0]) + std::norm(p[1]) < 1.0 ? 1.0 : 0.0;
    };
    const Integrand one = [](std::span<const Complex>) -> std::optional<double> { return 1.0; };
    const Options o1{1000000, kSeed, 1}, o4{1000000, kSeed, 4};
    const auto disc = integrate(in_disc, Domain::polydisc({0.0}, {1.5}), o1);
    const auto ball = integrate(in_ball, Domain::unit_polydisc(2), o1);
    const auto disc4 = integrate(in_disc, Domain::polydisc({0.0}, {1.5}), o4);
    const auto ball4 = integrate(in_ball, Domain::unit_polydisc(2), o4);
    const auto disc_direct = integrate(one, Domain::unit_polydisc(1), o1);
    const auto ball_direct = integrate(one, Domain::ball({0.0, 0.0}, 1.0), o1);
    const bool within = std::abs(disc.mean - pi) <= kSigmas * disc.standard_error &&
                        std::abs(ball.mean - pi * pi / 2.0) <= kSigmas * ball.standard_error &&
                        std::abs(disc_direct.mean - pi) <= 1e-12 && std::abs(ball_direct.mean - pi * pi / 2.0) <= 1e-12;
    const bool exact = disc.mean == disc4.mean && disc.standard_error == disc4.standard_error && ball.mean == ball4.mean &&
                       ball.standard_error == ball4.standard_error;
    report(8, "quadrature_calibration", within && exact,
           fmt("disc %.6f +- %.6f (pi %.6f), 4-ball %.6f +- %.6f (pi^2/2 %.6f), 1 vs 4 workers bit-exact: %s", disc.mean,
               disc.standard_error, pi, ball.mean, ball.standard_error, pi * pi / 2.0, exact ? "yes" : "no"));
}

void estimate_criterion() {
    using namespace division;
    DivisionProblem prob;
    prob.g = {z(2, 0), z(2, 1)};
    prob.ell = 2;
    prob.f = PolynomialElement(2, 1);
    prob.f.set(MultiIndex{0}, z(2, 1));
    prob.f.set(MultiIndex{1}, -z(2, 0));
    prob.domain = quadrature::Domain::polydisc({1.0, 1.0}, {0.5, 0.5});
    const auto w = std::get<DivisionWitness>(solve(prob, 0));
    const SampleOptions a{20000, kSeed, kDefaultCutoff, 1}, b{20000, kSeed, kDefaultCutoff, 4};
    const auto r1 = verify_estimate(prob, w, {Theorem::T1, 2.0}, a);
    const auto r2 = verify_estimate(prob, w, {Theorem::T1, 2.0}, b);
    const auto r3 = verify_estimate(prob, w, {Theorem::T1, 2.0}, a);
    const bool finite = std::isfinite(r1.lhs.mean) && std::isfinite(r1.rhs);
    const bool rejected = r1.lhs.rejected_fraction() < kMaxRejected && r1.hypothesis.rejected_fraction() < kMaxRejected;
    const bool deterministic = r1.verdict == r2.verdict && r1.verdict == r3.verdict && r1.lhs.mean == r2.lhs.mean &&
                               r1.rhs == r2.rhs && r1.lhs.mean == r3.lhs.mean;
    bool hard_fail = true;
    for (Theorem t : {Theorem::Cor2, Theorem::Cor3}) {
        try {
            verify_estimate(prob, w, {t, 1.0}, a);
            hard_fail = false;
        } catch (const PreconditionError&) {
        }
    }
    report(9, "estimate_pipeline", finite && rejected && deterministic && hard_fail,
           fmt("t1 tau=2: lhs %.6g +- %.2g, rhs %.6g +- %.2g, rejected %.4f, verdict %s (deterministic: %s); cor2/cor3 "
               "precondition %s",
               r1.lhs.mean, r1.lhs.standard_error, r1.rhs, r1.rhs_stderr, r1.hypothesis.rejected_fraction(),
               to_string(r1.verdict).c_str(), deterministic ? "yes" : "no", hard_fail ? "enforced" : "NOT enforced"));
}

}  // namespace

int main() {
    lemma1_criteria();
    koszul_identities();
    triple_constants();
    condition15();
    division_criterion();
    quadrature_criterion();
    estimate_criterion();
    std::printf("%s: %d failing criteria\n", failures ? "FAIL" : "PASS", failures);
    return failures ? 1 : 0;
}
