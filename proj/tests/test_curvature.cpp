#include "koszul/curvature.hpp"
#include "koszul/quadrature.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

using namespace koszul;
using namespace koszul::curvature;

namespace {

Polynomial z(std::size_t n, std::size_t v) { return Polynomial::variable(n, v); }

Generators coordinate_generators(const GaussianRational& s = GaussianRational(1)) {
    return Generators({z(2, 0) * s, z(2, 1) * s});
}

double eigen_min(const Eigen::MatrixXcd& m) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

}  // namespace

TEST(HermitianMatrix, EigenvaluesMatchReference) {
    SplitMix64 eng(31);
    for (int t = 0; t < 50; ++t) {
        const Eigen::Index n = 1 + static_cast<Eigen::Index>(eng() % 5);
        Eigen::MatrixXcd a(n, n);
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c = 0; c < n; ++c) a(r, c) = uniform_complex_square(eng);
        const Eigen::MatrixXcd h = a + a.adjoint();
        const HermitianMatrix hm(h);
        auto got = hm.eigenvalues();
        std::sort(got.begin(), got.end());
        const Eigen::VectorXd want = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h).eigenvalues();
        ASSERT_EQ(got.size(), static_cast<std::size_t>(n));
        for (Eigen::Index k = 0; k < n; ++k) EXPECT_NEAR(got[static_cast<std::size_t>(k)], want(k), 1e-10);
        EXPECT_NEAR(hm.min_eigenvalue(), want.minCoeff(), 1e-10);
    }
}

TEST(HermitianMatrix, RejectsNonHermitian) {
    Eigen::MatrixXcd m(2, 2);
    m << 1.0, Complex(0.0, 1.0), Complex(0.0, 1.0), 1.0;
    EXPECT_THROW(HermitianMatrix{m}, std::invalid_argument);
    EXPECT_THROW(HermitianMatrix{Eigen::MatrixXcd::Zero(2, 3)}, std::invalid_argument);
}

TEST(LogHessian, CoordinateExample) {
    const std::vector<Complex> pt{1.0, 0.0};
    const auto h = hessian_log_g(coordinate_generators(), pt);
    EXPECT_NEAR(std::abs(h(0, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(h(0, 1)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(h(1, 1) - 1.0), 0.0, 1e-15);
}

TEST(LogHessian, ClosedFormAtComplexPoints) {
    SplitMix64 eng(32);
    const auto g = coordinate_generators();
    for (int t = 0; t < 100; ++t) {
        const std::vector<Complex> pt{uniform_complex_square(eng), uniform_complex_square(eng)};
        const double r = std::norm(pt[0]) + std::norm(pt[1]);
        const Eigen::MatrixXcd h = hessian_log_g_matrix(g.jet(pt));
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const Complex want = ((a == b ? r : 0.0) - std::conj(pt[a]) * pt[b]) / (r * r);
                EXPECT_NEAR(std::abs(h(a, b) - want), 0.0, 1e-12 / (r * r));
            }
    }
}

TEST(LogHessian, ConstantGeneratorGivesZero) {
    const Generators g({Polynomial::constant(2, 3)});
    const std::vector<Complex> pt{0.3, -0.2};
    EXPECT_LE(hessian_log_g_matrix(g.jet(pt)).norm(), 1e-15);
}

TEST(LogHessian, PositiveSemidefinite) {
    SplitMix64 eng(33);
    for (int t = 0; t < 200; ++t) {
        std::vector<Polynomial> gs;
        for (int k = 0; k < 3; ++k) gs.push_back(gen::polynomial(2, 2, 3, eng));
        const Generators g(gs);
        const std::vector<Complex> pt{uniform_complex_square(eng), uniform_complex_square(eng)};
        if (g.norm_sq(pt) < 1e-6) continue;
        const Eigen::MatrixXcd h = hessian_log_g_matrix(g.jet(pt));
        EXPECT_GE(eigen_min(h), -1e-10 * (1.0 + h.norm()));
    }
}

TEST(LogHessian, CommonZeroThrows) {
    const std::vector<Complex> pt{0.0, 0.0};
    EXPECT_THROW(hessian_log_g(coordinate_generators(), pt), CommonZeroError);
}

TEST(Condition15, TheoremOneExample) {
    const auto w = WeightSystem::theorem1(2.0, 0.5, 1, 1);
    EXPECT_FALSE(w.constants_admissible());
    const std::vector<Complex> pt{1.0, 0.0};
    const auto c = condition15_margin(w, coordinate_generators(), pt);
    EXPECT_NEAR(c.margin, 0.0, 1e-12);
    Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(2, 2);
    expect(1, 1) = 2.0 * 0.5 * 0.5;
    EXPECT_LE((c.form - expect).norm(), 1e-12);
}

TEST(Condition15, TheoremOneReducesToScaledHessian) {
    SplitMix64 eng(34);
    const auto g = coordinate_generators();
    for (double tau : {1.5, 2.0, 5.0})
        for (int ql : {1, 2, 3}) {
            const auto w = WeightSystem::theorem1(tau, ql, 1);
            EXPECT_TRUE(w.constants_admissible());
            const auto& ct = w.constant_twist();
            for (int t = 0; t < 20; ++t) {
                const std::vector<Complex> pt{uniform_complex_square(eng), uniform_complex_square(eng)};
                const auto c = condition15_margin(w, g, pt);
                const Eigen::MatrixXcd want = ql * tau * ct.lambda * (1.0 - ct.lambda) * hessian_log_g_matrix(g.jet(pt));
                EXPECT_LE((c.form - want).norm(), 1e-10 * c.scale);
                EXPECT_GE(c.margin, -1e-10 * c.scale);
            }
        }
}

TEST(Condition15, TheoremTwoTriplesHoldInsideUnitBall) {
    const auto g = coordinate_generators(GaussianRational(mpq_class(1, 2)));
    const auto dom = quadrature::Domain::unit_polydisc(2);
    SplitMix64 eng(35);
    const std::vector<WeightSystem> ws = {
        WeightSystem::theorem2(triples::SkodaTriple::log(0.1, 1), 1),
        WeightSystem::theorem2(triples::SkodaTriple::log(10.0, 2), 2),
        WeightSystem::theorem2(triples::SkodaTriple::exp(1.0, 1), 2),
        WeightSystem::theorem2(triples::SkodaTriple::combined(0.5, 0.5, 1.0, 1), 1)};
    int checked = 0;
    for (int t = 0; t < 1000; ++t) {
        const auto pt = dom.sample(eng);
        if (g.norm_sq(pt) < kMinNormSq) continue;
        ++checked;
        for (const auto& w : ws) {
            const auto c = condition15_margin(w, g, pt);
            EXPECT_GE(c.margin, -1e-9 * c.scale);
        }
    }
    EXPECT_GT(checked, 990);
}

TEST(Condition15, PsiRaisesMargin) {
    const auto g = coordinate_generators(GaussianRational(mpq_class(1, 2)));
    const auto psi = HermitianPolynomial::scaled_norm_sq(2, mpq_class(1));
    SplitMix64 eng(36);
    const WeightSystem plain[] = {WeightSystem::theorem1(3.0, 1, 1), WeightSystem::theorem2(triples::SkodaTriple::log(1.0, 1), 1)};
    const WeightSystem lifted[] = {WeightSystem::theorem1(3.0, 1, 1, psi),
                                   WeightSystem::theorem2(triples::SkodaTriple::log(1.0, 1), 1, psi)};
    for (int t = 0; t < 100; ++t) {
        const std::vector<Complex> pt{0.5 * uniform_complex_square(eng), 0.5 * uniform_complex_square(eng)};
        for (int k = 0; k < 2; ++k) {
            const auto a = condition15_margin(plain[k], g, pt), b = condition15_margin(lifted[k], g, pt);
            // psi = |z|^2 adds a * identity
            EXPECT_NEAR(b.margin - a.margin, b.weights.a, 1e-9 * b.scale);
            EXPECT_GE(b.margin, a.margin - 1e-12);
        }
    }
}

TEST(WeightSystem, ParameterChecks) {
    EXPECT_THROW(WeightSystem::theorem1(1.0, 0.5, 1, 1), std::invalid_argument);
    EXPECT_THROW(WeightSystem::theorem1(2.0, 1.0, 1, 1), std::invalid_argument);
    HermitianPolynomial bad(2);
    bad.add_term({1, 0}, {0, 0}, GaussianRational(1));
    EXPECT_THROW(WeightSystem::theorem1(2.0, 1, 1, bad), std::invalid_argument);
    const auto w = WeightSystem::theorem2(triples::SkodaTriple::log(1.0, 1), 1);
    const std::vector<Complex> pt{1.0, 1.0};
    EXPECT_THROW(w.evaluate(2.0, pt), std::domain_error);
    EXPECT_THROW(w.evaluate(0.0, pt), CommonZeroError);
}

TEST(WeightSystem, RelationBetweenWeights) {
    const auto w = WeightSystem::theorem2(triples::SkodaTriple::log(1.0, 2), 1);
    const std::vector<Complex> pt{0.2, 0.1};
    const auto v = w.evaluate(0.05, pt);
    EXPECT_DOUBLE_EQ(v.phi2, v.phi1 + std::log(0.05));
    EXPECT_DOUBLE_EQ(v.xi, 1.0 - std::log(0.05));
}

TEST(Lagrange, RandomInstancesAgree) {
    SplitMix64 eng(37);
    for (int t = 0; t < 300; ++t) {
        const std::size_t p = 1 + eng() % 4, n = 1 + eng() % 3, ell = 1 + eng() % p;
        const auto g = gen::complex_vector(p, eng);
        Eigen::MatrixXcd dg(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(n));
        for (Eigen::Index r = 0; r < dg.rows(); ++r)
            for (Eigen::Index c = 0; c < dg.cols(); ++c) dg(r, c) = uniform_complex_square(eng);
        const auto inst = lemma1::random_instance(p, n, ell, eng);
        for (const auto& base : all_multi_indices(p, ell - 1)) {
            const auto s = lagrange_identity_check(g, dg, inst.c, base);
            const double scale = std::max(1e-300, std::max(s.lhs, s.rhs));
            EXPECT_NEAR(s.lhs, s.rhs, 1e-10 * scale + 1e-11);
            EXPECT_NEAR(s.hessian_form, s.rhs, 1e-10 * scale + 1e-11);
            EXPECT_GE(s.lhs, 0.0);

            // lhs over ordered pairs j != k, halved
            const double ns = squared_norm(g);
            double brute = 0.0;
            for (unsigned i = 0; i < p; ++i)
                for (unsigned j = 0; j < p; ++j)
                    for (unsigned k = 0; k < p; ++k) {
                        if (j == k) continue;
                        Complex acc = 0.0;
                        for (std::size_t a = 0; a < n; ++a)
                            acc += (g[j] * dg(k, static_cast<Eigen::Index>(a)) - g[k] * dg(j, static_cast<Eigen::Index>(a))) *
                                   inst.c.at(i, base, a);
                        brute += std::norm(acc);
                    }
            EXPECT_NEAR(s.lhs, brute / (2.0 * ns * ns), 1e-10 * scale + 1e-14);
        }
    }
}

TEST(Lagrange, DegenerateCases) {
    const std::vector<Complex> g1{Complex(0.3, 0.4)};
    Eigen::MatrixXcd dg1(1, 2);
    dg1 << 1.0, 2.0;
    SkewVectorArray v1{1, 1, 2, {}};
    v1.entries[MultiIndex{0}] = {1.0, -1.0};
    const auto s1 = lagrange_identity_check(g1, dg1, v1, MultiIndex{});
    EXPECT_NEAR(s1.lhs, 0.0, 1e-15);
    EXPECT_NEAR(s1.rhs, 0.0, 1e-14);

    const std::vector<Complex> g2{1.0, 0.5};
    Eigen::MatrixXcd dg2 = Eigen::MatrixXcd::Ones(2, 2);
    const SkewVectorArray zero{2, 1, 2, {}};
    const auto s2 = lagrange_identity_check(g2, dg2, zero, MultiIndex{});
    EXPECT_EQ(s2.lhs, 0.0);
    EXPECT_EQ(s2.rhs, 0.0);
}
