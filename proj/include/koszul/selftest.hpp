#ifndef KOSZUL_SELFTEST_HPP
#define KOSZUL_SELFTEST_HPP

// Reduced-scale run of the module invariants, for the `selftest` command.

#include "koszul/curvature.hpp"
#include "koszul/division.hpp"
#include "koszul/exterior.hpp"
#include "koszul/io.hpp"
#include "koszul/lemma1.hpp"
#include "koszul/quadrature.hpp"
#include "koszul/random.hpp"
#include "koszul/triples.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

namespace koszul::selftest {

struct Options {
    std::uint64_t seed = 42;
    std::size_t lemma1_instances = 2000;
    std::size_t identity_trials = 200;
    std::size_t triple_points = 1000;
    std::size_t curvature_points = 100;
    std::size_t quadrature_samples = 100000;
    unsigned workers = 0;
};

template <typename Engine>
Polynomial random_polynomial(std::size_t n, unsigned max_exp, std::size_t terms, Engine& eng) {
    Polynomial q(n);
    for (std::size_t t = 0; t < terms; ++t) {
        Monomial m(n);
        for (auto& e : m) e = static_cast<unsigned>(eng() % (max_exp + 1));
        const long re = static_cast<long>(eng() % 7) - 3, im = static_cast<long>(eng() % 5) - 2;
        q.add_term(std::move(m), GaussianRational(mpq_class(re, 1 + eng() % 3), mpq_class(im)));
    }
    return q;
}

template <typename Engine>
PolynomialElement random_element(std::size_t p, std::size_t degree, std::size_t n, Engine& eng) {
    PolynomialElement e(p, degree);
    for (const auto& k : all_multi_indices(p, degree)) e.set(k, random_polynomial(n, 2, 3, eng));
    return e;
}

template <typename Engine>
ComplexElement random_complex_element(std::size_t p, std::size_t degree, Engine& eng) {
    ComplexElement e(p, degree);
    for (const auto& k : all_multi_indices(p, degree)) e.set(k, uniform_complex_square(eng));
    return e;
}

inline io::Check status(std::string name, bool ok, io::json details = io::json::object()) {
    io::Check c;
    c.name = std::move(name);
    c.status = ok ? "PASS" : "FAIL";
    c.details = std::move(details);
    return c;
}

inline double rel(double err, double scale) { return err / std::max(scale, 1e-300); }

inline std::vector<io::Check> run(const Options& opt) {
    std::vector<io::Check> out;

    {
        lemma1::BatchConfig cfg;
        cfg.seed = opt.seed;
        cfg.instances = opt.lemma1_instances;
        cfg.workers = opt.workers;
        const auto r = lemma1::verify_batch(cfg);
        out.push_back(status("lemma1_batch", r.violations.empty(),
                             {{"instances", r.instances}, {"checks", r.checks}, {"violations", r.violations.size()},
                              {"max_ratio", r.max_ratio}}));
    }

    {
        SplitMix64 eng(stream_seed(opt.seed, 1));
        bool nil = true;
        double leib = 0.0, adj = 0.0;
        for (std::size_t t = 0; t < opt.identity_trials; ++t) {
            const std::size_t p = 2 + t % 3, n = 1 + t % 2, d = 2 + t % (p - 1);
            std::vector<Polynomial> g;
            for (std::size_t k = 0; k < p; ++k) g.push_back(random_polynomial(n, 2, 2, eng));
            const auto v = random_element(p, d, n, eng);
            nil = nil && contract(g, contract(g, v)).is_zero();

            std::vector<Complex> gv(p);
            for (auto& x : gv) x = uniform_complex_square(eng);
            const auto h = random_complex_element(p, d - 1, eng);
            const auto w = random_complex_element(p, d, eng);
            auto diff = contract(gv, wedge_conj(gv, h));
            diff += wedge_conj(gv, contract(gv, h));
            diff -= Complex(squared_norm(gv)) * h;
            leib = std::max(leib, rel(std::sqrt(norm_sq(diff)), squared_norm(gv) * std::sqrt(norm_sq(h))));
            const Complex a = inner(contract(gv, w), h), b = inner(w, wedge_conj(gv, h));
            adj = std::max(adj, rel(std::abs(a - b), std::sqrt(norm_sq(w) * norm_sq(h) * squared_norm(gv))));
        }
        out.push_back(status("koszul_nilpotence", nil));
        out.push_back(status("koszul_leibniz", leib <= 1e-10, {{"max_rel_error", leib}}));
        out.push_back(status("koszul_adjoint", adj <= 1e-10, {{"max_rel_error", adj}}));
    }

    {
        bool ok = true;
        io::json d = io::json::array();
        for (double eps : {0.1, 1.0, 10.0})
            for (int q : {1, 2, 3})
                for (int ell : {1, 2, 3}) {
                    const auto tl = triples::SkodaTriple::log(eps, q);
                    const auto te = triples::SkodaTriple::exp(eps, q);
                    ok = ok && triples::validate(tl, 1.0 + 1e-6, 50.0, opt.triple_points).valid &&
                         triples::validate(te, 1.0 + 1e-6, 50.0, opt.triple_points).valid;
                    for (double x : triples::log_grid(1.0 + 1e-6, 50.0, opt.triple_points)) {
                        const auto wl = triples::derived(tl, ell, x);
                        const auto we = triples::derived(te, ell, x);
                        ok = ok && std::abs(wl.a_plus_lambda - (1.0 + eps) * x / eps) <= 1e-12 * wl.a_plus_lambda;
                        ok = ok && wl.efficiency <= triples::cor2_efficiency_bound(eps, q, ell) * (1.0 + 1e-12);
                        ok = ok && we.efficiency <= (2.0 + q * ell) * (1.0 + 1e-12);
                        ok = ok && we.a_plus_lambda <= triples::cor3_envelope(eps, x) * (1.0 + 1e-12);
                    }
                }
        out.push_back(status("triple_constants", ok));
    }

    {
        SplitMix64 eng(stream_seed(opt.seed, 2));
        const curvature::Generators g({Polynomial::variable(2, 0) * GaussianRational(mpq_class(1, 2)),
                                       Polynomial::variable(2, 1) * GaussianRational(mpq_class(1, 2))});
        const auto dom = quadrature::Domain::unit_polydisc(2);
        double worst = INFINITY, t1err = 0.0;
        const std::vector<curvature::WeightSystem> ws = {
            curvature::WeightSystem::theorem2(triples::SkodaTriple::log(1.0, 1), 1),
            curvature::WeightSystem::theorem2(triples::SkodaTriple::exp(1.0, 1), 1),
            curvature::WeightSystem::theorem2(triples::SkodaTriple::combined(0.5, 0.5, 1.0, 1), 1)};
        const auto w1 = curvature::WeightSystem::theorem1(2.0, 1, 1);
        for (std::size_t t = 0; t < opt.curvature_points; ++t) {
            const auto z = dom.sample(eng);
            if (g.norm_sq(z) < curvature::kMinNormSq) continue;
            for (const auto& w : ws) {
                const auto c = curvature::condition15_margin(w, g, z);
                worst = std::min(worst, c.margin / std::max(c.scale, 1e-300));
            }
            const auto c = curvature::condition15_margin(w1, g, z);
            const auto& ct = w1.constant_twist();
            const Eigen::MatrixXcd h = curvature::hessian_log_g_matrix(g.jet(z));
            const Eigen::MatrixXcd expect = ct.tau * ct.lambda * (1.0 - ct.lambda) * h;
            t1err = std::max(t1err, rel((c.form - expect).norm(), std::max(expect.norm(), c.scale)));
        }
        out.push_back(status("condition15_theorem2", worst >= -1e-9, {{"min_relative_margin", worst}}));
        out.push_back(status("condition15_theorem1", t1err <= 1e-8, {{"max_rel_error", t1err}}));
    }

    {
        const std::size_t n3 = 3;
        auto z = [](std::size_t n, std::size_t v) { return Polynomial::variable(n, v); };
        division::DivisionProblem a;
        a.g = {z(n3, 0), z(n3, 1), z(n3, 2)};
        a.ell = 2;
        a.f = PolynomialElement(3, 1);
        a.f.set(MultiIndex{0}, z(n3, 1));
        a.f.set(MultiIndex{1}, -z(n3, 0));
        division::DivisionProblem b;
        b.g = {z(2, 0), z(2, 1)};
        b.f = PolynomialElement::scalar(2, z(2, 0) * z(2, 0) * z(2, 1) * z(2, 1));
        division::DivisionProblem c = b;
        c.f = PolynomialElement::scalar(2, Polynomial::constant(2, 1));
        const bool ok = std::holds_alternative<division::DivisionWitness>(division::solve(a, 0)) &&
                        std::holds_alternative<division::DivisionWitness>(division::solve(b, 2)) &&
                        std::holds_alternative<division::NoSolutionAtCap>(division::solve(c, 4));
        out.push_back(status("division_examples", ok));
    }

    {
        quadrature::Options qo{opt.quadrature_samples, opt.seed, 1};
        quadrature::Integrand one = [](std::span<const Complex>) -> std::optional<double> { return 1.0; };
        quadrature::Integrand ind = [](std::span<const Complex> z) -> std::optional<double> {
            return std::norm(z[0]) < 1.0 ? 1.0 : 0.0;
        };
        const auto disc = quadrature::integrate(ind, quadrature::Domain::polydisc({Complex(0.0)}, {1.5}), qo);
        const auto ball = quadrature::integrate(one, quadrature::Domain::ball({0.0, 0.0}, 1.0), qo);
        qo.workers = 3;
        const auto disc3 = quadrature::integrate(ind, quadrature::Domain::polydisc({Complex(0.0)}, {1.5}), qo);
        const bool ok = std::abs(disc.mean - std::numbers::pi) <= 3.0 * disc.standard_error &&
                        std::abs(ball.mean - std::numbers::pi * std::numbers::pi / 2.0) <= 1e-12 &&
                        disc.mean == disc3.mean && disc.standard_error == disc3.standard_error;
        out.push_back(status("quadrature_calibration", ok,
                             {{"disc_area", disc.mean}, {"disc_stderr", disc.standard_error}, {"ball_volume", ball.mean}}));
    }
    return out;
}

}  // namespace koszul::selftest

#endif  // KOSZUL_SELFTEST_HPP
