#include "koszul/io.hpp"
#include "koszul/text.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

using namespace koszul;
using koszul::io::json;

namespace {

std::string sample(const std::string& name) { return std::string(KOSZUL_SAMPLES_DIR) + "/" + name; }

Polynomial z(std::size_t n, std::size_t v) { return Polynomial::variable(n, v); }

std::size_t parse_error_column(std::string_view s) {
    try {
        text::parse_polynomial(s);
    } catch (const text::ParseError& e) {
        return e.column();
    }
    return 0;
}

std::string input_error(const json& j) {
    try {
        io::problem_from_json(j);
    } catch (const io::InputError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST(Text, ParsesMixedExpression) {
    const auto q = text::parse_polynomial("z1^2*z2 - 3/2 i * z3");
    EXPECT_EQ(q.num_vars(), 3u);
    EXPECT_EQ(q, z(3, 0) * z(3, 0) * z(3, 1) - GaussianRational(mpq_class(0), mpq_class(3, 2)) * z(3, 2));
}

TEST(Text, GaussianAndDecimalCoefficients) {
    const auto q = text::parse_polynomial("(1/2+1/3 i)*z1 + 0.25", 1);
    EXPECT_EQ(q.coefficient({1}), GaussianRational(mpq_class(1, 2), mpq_class(1, 3)));
    EXPECT_EQ(q.coefficient({0}), GaussianRational(mpq_class(1, 4)));
    EXPECT_EQ(text::parse_polynomial("i*z1"), GaussianRational(mpq_class(0), mpq_class(1)) * z(1, 0));
    EXPECT_EQ(text::parse_polynomial("z2", 3), z(3, 1));
}

TEST(Text, RoundTrip) {
    SplitMix64 eng(61);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 1 + eng() % 3;
        const auto q = gen::polynomial(n, 3, 1 + eng() % 4, eng);
        EXPECT_EQ(text::parse_polynomial(text::to_text(q), n), q) << text::to_text(q);
    }
    EXPECT_EQ(text::to_text(Polynomial(2)), "0");
}

TEST(Text, ErrorColumns) {
    EXPECT_EQ(parse_error_column("z1 + + z2"), 6u);
    EXPECT_GT(parse_error_column("z1 * (1 + 2"), 0u);
    EXPECT_GT(parse_error_column("z0"), 0u);
    EXPECT_GT(parse_error_column("1/0"), 0u);
    EXPECT_GT(parse_error_column("q1"), 0u);
    EXPECT_THROW(text::parse_polynomial("z1*zb1"), std::invalid_argument);
    EXPECT_THROW(text::parse_polynomial("z3", 2), std::invalid_argument);
}

TEST(Text, HermitianPsi) {
    const auto h = text::parse_hermitian("1/4*z1*zb1 + 1/4*z2*zb2", 2);
    EXPECT_TRUE(h.is_hermitian());
    const std::vector<Complex> pt{Complex(2.0, 0.0), Complex(0.0, 2.0)};
    EXPECT_DOUBLE_EQ(h.eval(pt), 2.0);
}

TEST(Json, GaussianAndComplexForms) {
    EXPECT_EQ(io::gaussian_from_json(json::array({"1/2", "-3"})), GaussianRational(mpq_class(1, 2), mpq_class(-3)));
    EXPECT_EQ(io::gaussian_from_json(json(2)), GaussianRational(2));
    EXPECT_EQ(io::complex_from_json(json::array({0.5, -1.0})), Complex(0.5, -1.0));
    EXPECT_EQ(io::complex_from_json(json(3.0)), Complex(3.0));
    EXPECT_THROW(io::gaussian_from_json(json::array({"1/0", "0"})), io::InputError);
    EXPECT_THROW(io::complex_from_json(json("x")), io::InputError);
}

TEST(Json, PolynomialRoundTrip) {
    SplitMix64 eng(62);
    for (int t = 0; t < 50; ++t) {
        const auto q = gen::polynomial(2, 3, 3, eng);
        EXPECT_EQ(io::polynomial_from_json(io::to_json(q), 2), q);
    }
}

TEST(Json, ElementRoundTripUsesOneBasedIndices) {
    PolynomialElement e(3, 2);
    e.set(MultiIndex{0, 2}, z(2, 1));
    const json j = io::to_json(e);
    EXPECT_EQ(j["entries"][0]["index"], json::array({1, 3}));
    EXPECT_EQ(io::element_from_json(j, 2), e);
}

TEST(Json, ElementDiagnostics) {
    const json bad = json::parse(R"({"p": 2, "degree": 1, "entries": [{"index": [3], "coeff": "z1"}]})");
    try {
        io::element_from_json(bad, 1, "/f");
        FAIL() << "expected InputError";
    } catch (const io::InputError& e) {
        EXPECT_NE(std::string(e.what()).find("/f/entries/0/index/0"), std::string::npos) << e.what();
    }
    const json order = json::parse(R"({"p": 3, "degree": 2, "entries": [{"index": [2, 1], "coeff": 1}]})");
    EXPECT_THROW(io::element_from_json(order, 1), io::InputError);
}

TEST(Json, ProblemDiagnosticsNameTheField) {
    json j = json::parse(R"({"g": ["z1", "z2"], "f": {"p": 2, "degree": 0, "entries": []}})");
    EXPECT_NE(input_error(j).find("missing field 'ell'"), std::string::npos);
    j["ell"] = 2;
    EXPECT_NE(input_error(j).find("/f/degree"), std::string::npos);
    j["ell"] = 1;
    j["g"][1] = "z2 +* 1";
    EXPECT_NE(input_error(j).find("/g/1"), std::string::npos);
}

TEST(Json, ProblemRoundTrip) {
    const auto prob = io::problem_from_json(io::load_json_file(sample("polydisc_t1.json")));
    const auto again = io::problem_from_json(io::to_json(prob));
    EXPECT_EQ(again.g, prob.g);
    EXPECT_EQ(again.f, prob.f);
    EXPECT_EQ(again.ell, prob.ell);
    ASSERT_TRUE(again.domain);
    EXPECT_EQ(again.domain->center(), prob.domain->center());
    EXPECT_EQ(again.domain->radii(), prob.domain->radii());
}

TEST(Json, WeightForms) {
    const auto w = io::weight_from_json(json::parse(R"({"mode": "t1", "tau": 3})"), 1, 1, 2);
    EXPECT_TRUE(w.is_theorem1());
    EXPECT_DOUBLE_EQ(w.constant_twist().tau, 3.0);
    const auto t = io::weight_from_json(json::parse(R"({"mode": "triple", "kind": "log", "eps": 0.5, "psi": "z1*zb1"})"), 2, 1, 2);
    EXPECT_FALSE(t.is_theorem1());
    EXPECT_EQ(t.triple().kind, triples::Kind::Log);
    EXPECT_EQ(t.q(), 2);
    EXPECT_THROW(io::weight_from_json(json::parse(R"({"mode": "nope"})"), 1, 1, 2), io::InputError);
}

TEST(Json, WitnessRoundTrip) {
    division::DivisionWitness w;
    w.u = PolynomialElement(2, 1);
    w.u.set(MultiIndex{1}, z(2, 0) * z(2, 0));
    w.residual = PolynomialElement(2, 0);
    w.degree_cap = 4;
    const auto back = io::witness_from_json(io::to_json(w), 2);
    EXPECT_EQ(back.u, w.u);
    EXPECT_EQ(back.degree_cap, 4);
}

TEST(Json, InstanceFileEqualityCase) {
    const auto inst = io::instance_from_json(io::load_json_file(sample("lemma1_instance.json")));
    const auto s = lemma1::inequality_sides(inst, MultiIndex{});
    EXPECT_NEAR(s.lhs, 16.0, 1e-12);
    EXPECT_NEAR(s.rhs, 16.0, 1e-12);
    const auto back = io::instance_from_json(io::to_json(inst));
    EXPECT_EQ(back.b, inst.b);
}

TEST(Json, EverySampleProblemLoads) {
    for (const char* name : {"koszul_l2.json", "monomial_ideal.json", "polydisc_t1.json", "small_g_cor2.json",
                             "unit_not_in_ideal.json", "zero_free.json"}) {
        EXPECT_NO_THROW(io::problem_from_json(io::load_json_file(sample(name)))) << name;
    }
}

TEST(Json, FileSyntaxErrorsReportLineAndColumn) {
    const auto path = std::filesystem::temp_directory_path() / "koszul_bad.json";
    {
        std::ofstream out(path);
        out << "{\n  \"g\": [\"z1\",\n  ]\n}\n";
    }
    try {
        io::load_json_file(path.string());
        FAIL() << "expected InputError";
    } catch (const io::InputError& e) {
        EXPECT_NE(std::string(e.what()).find(path.string() + ":3:"), std::string::npos) << e.what();
    }
    std::filesystem::remove(path);
    EXPECT_THROW(io::load_json_file("/nonexistent/koszul.json"), io::InputError);
}

TEST(Json, ReportShape) {
    io::Report r;
    r.config["seed"] = 1;
    io::Check c;
    c.name = "x";
    c.status = "PASS";
    r.checks.push_back(c);
    const json j = r.to_json();
    EXPECT_EQ(j["config"]["seed"], 1);
    EXPECT_EQ(j["checks"][0]["name"], "x");
    EXPECT_TRUE(j["checks"][0].contains("stderr"));
}
