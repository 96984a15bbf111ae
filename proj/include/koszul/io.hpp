#ifndef KOSZUL_IO_HPP
#define KOSZUL_IO_HPP

// JSON schemas. Indices are 1-based in every serialized form; exact
// rationals are strings "p/q".
//
//   Polynomial     {"n": int, "terms": [{"coeff": ["re", "im"], "exp": [e1, ..., en]}]}
//                  or a text string (see text.hpp)
//   KoszulElement  {"p": int, "degree": int, "entries": [{"index": [i1 < ... < id], "coeff": Polynomial | ["re", "im"]}]}
//   Domain         {"kind": "polydisc", "center": [z...], "radii": [r...]}
//                  {"kind": "ball", "center": [z...], "radius": r}       z = x | [x, y]
//   Weight         {"mode": "t1", "tau": t, ["lambda": l], ["psi": Psi]}
//                  {"mode": "triple", "kind": "log"|"exp"|"combined"|"custom", parameters..., ["psi": Psi]}
//   Psi            text string with z/zb variables, or
//                  {"n": int, "terms": [{"coeff": [..], "exp": [..], "exp_bar": [..]}]}
//   Problem        {"n": int?, "g": [Polynomial...], "f": KoszulElement, "ell": int, "domain": Domain?, "weight": Weight?}
//   Witness        {"u": KoszulElement, "residual": KoszulElement, "degree_cap": int}
//   Report         {"config": {...}, "checks": [{"name", "status", "lhs", "rhs", "stderr", "details"}]}

#include "koszul/division.hpp"
#include "koszul/exterior.hpp"
#include "koszul/lemma1.hpp"
#include "koszul/polynomial.hpp"
#include "koszul/quadrature.hpp"
#include "koszul/text.hpp"
#include "koszul/triples.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace koszul::io {

using json = nlohmann::json;

class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) {
    throw InputError((path.empty() ? std::string("/") : path) + ": " + msg);
}

inline const json& field(const json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(path, "missing field '" + key + "'");
    return *it;
}

inline std::size_t as_size(const json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<long long>() < 0) fail(path, "expected a nonnegative integer");
    return j.get<std::size_t>();
}

inline double as_double(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

inline mpq_class as_rational(const json& j, const std::string& path) {
    if (j.is_string()) {
        try {
            return GaussianRational::parse_rational(j.get<std::string>());
        } catch (const std::exception& e) {
            fail(path, e.what());
        }
    }
    if (j.is_number_integer()) return mpq_class(j.get<long>());
    if (j.is_number()) return mpq_class(j.get<double>());
    fail(path, "expected a rational string \"p/q\" or a number");
}

}  // namespace detail

// ---- scalars ----

inline json to_json(const GaussianRational& c) { return json::array({c.re_string(), c.im_string()}); }

inline json to_json(const Complex& c) { return json::array({c.real(), c.imag()}); }

inline GaussianRational gaussian_from_json(const json& j, const std::string& path = "") {
    if (j.is_array() && j.size() == 2)
        return {detail::as_rational(j[0], path + "/0"), detail::as_rational(j[1], path + "/1")};
    if (j.is_string() || j.is_number()) return {detail::as_rational(j, path), 0};
    detail::fail(path, "expected a [re, im] pair");
}

inline Complex complex_from_json(const json& j, const std::string& path = "") {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2)
        return {detail::as_double(j[0], path + "/0"), detail::as_double(j[1], path + "/1")};
    detail::fail(path, "expected a number or a [re, im] pair of numbers");
}

// ---- polynomials ----

inline json to_json(const Polynomial& q) {
    json terms = json::array();
    for (const auto& [m, c] : q.terms()) terms.push_back({{"coeff", to_json(c)}, {"exp", m}});
    return {{"n", q.num_vars()}, {"terms", terms}};
}

/// n = 0 accepts any variable count from objects and infers it for text.
inline Polynomial polynomial_from_json(const json& j, std::size_t n, const std::string& path = "") {
    if (j.is_string()) {
        try {
            return text::parse_polynomial(j.get<std::string>(), n);
        } catch (const std::exception& e) {
            detail::fail(path, e.what());
        }
    }
    const std::size_t jn = detail::as_size(detail::field(j, "n", path), path + "/n");
    if (jn == 0) detail::fail(path + "/n", "n must be positive");
    if (n != 0 && jn != n) detail::fail(path + "/n", "expected n = " + std::to_string(n));
    const json& terms = detail::field(j, "terms", path);
    if (!terms.is_array()) detail::fail(path + "/terms", "expected an array");
    Polynomial q(jn);
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const std::string tp = path + "/terms/" + std::to_string(t);
        const json& e = detail::field(terms[t], "exp", tp);
        if (!e.is_array() || e.size() != jn) detail::fail(tp + "/exp", "expected " + std::to_string(jn) + " exponents");
        Monomial m(jn);
        for (std::size_t v = 0; v < jn; ++v) m[v] = static_cast<unsigned>(detail::as_size(e[v], tp + "/exp/" + std::to_string(v)));
        q.add_term(std::move(m), gaussian_from_json(detail::field(terms[t], "coeff", tp), tp + "/coeff"));
    }
    return q;
}

/// Highest variable count referenced by a polynomial JSON value (object n or text index).
inline std::size_t polynomial_vars(const json& j) {
    if (j.is_string()) {
        try {
            return text::parse(j.get<std::string>()).max_var;
        } catch (const std::exception&) {
            return 0;
        }
    }
    if (j.is_object() && j.contains("n") && j["n"].is_number_integer()) return j["n"].get<std::size_t>();
    return 0;
}

inline json to_json(const HermitianPolynomial& h) {
    json terms = json::array();
    for (const auto& [k, c] : h.terms()) terms.push_back({{"coeff", to_json(c)}, {"exp", k.first}, {"exp_bar", k.second}});
    return {{"n", h.num_vars()}, {"terms", terms}};
}

inline HermitianPolynomial hermitian_from_json(const json& j, std::size_t n, const std::string& path = "") {
    if (j.is_string()) {
        try {
            return text::parse_hermitian(j.get<std::string>(), n);
        } catch (const std::exception& e) {
            detail::fail(path, e.what());
        }
    }
    const std::size_t jn = detail::as_size(detail::field(j, "n", path), path + "/n");
    if (jn != n) detail::fail(path + "/n", "expected n = " + std::to_string(n));
    const json& terms = detail::field(j, "terms", path);
    if (!terms.is_array()) detail::fail(path + "/terms", "expected an array");
    HermitianPolynomial h(n);
    for (std::size_t t = 0; t < terms.size(); ++t) {
        const std::string tp = path + "/terms/" + std::to_string(t);
        auto mono = [&](const char* key) {
            const json& e = detail::field(terms[t], key, tp);
            if (!e.is_array() || e.size() != n) detail::fail(tp + "/" + key, "expected " + std::to_string(n) + " exponents");
            Monomial m(n);
            for (std::size_t v = 0; v < n; ++v) m[v] = static_cast<unsigned>(detail::as_size(e[v], tp + "/" + key));
            return m;
        };
        h.add_term(mono("exp"), mono("exp_bar"), gaussian_from_json(detail::field(terms[t], "coeff", tp), tp + "/coeff"));
    }
    return h;
}

// ---- Koszul elements ----

inline json index_to_json(const MultiIndex& k) {
    json a = json::array();
    for (unsigned i : k) a.push_back(i + 1);
    return a;
}

inline MultiIndex index_from_json(const json& j, std::size_t p, std::size_t degree, const std::string& path) {
    if (!j.is_array() || j.size() != degree) detail::fail(path, "expected " + std::to_string(degree) + " indices");
    std::vector<unsigned> idx;
    for (std::size_t s = 0; s < j.size(); ++s) {
        const std::size_t i = detail::as_size(j[s], path + "/" + std::to_string(s));
        if (i < 1 || i > p) detail::fail(path + "/" + std::to_string(s), "index out of range 1.." + std::to_string(p));
        if (!idx.empty() && i - 1 <= idx.back()) detail::fail(path, "indices must be strictly increasing");
        idx.push_back(static_cast<unsigned>(i - 1));
    }
    return MultiIndex(std::move(idx));
}

inline json to_json(const PolynomialElement& e) {
    json entries = json::array();
    for (const auto& [k, q] : e.entries()) entries.push_back({{"index", index_to_json(k)}, {"coeff", to_json(q)}});
    return {{"p", e.generators()}, {"degree", e.degree()}, {"entries", entries}};
}

inline json to_json(const ComplexElement& e) {
    json entries = json::array();
    for (const auto& [k, c] : e.entries()) entries.push_back({{"index", index_to_json(k)}, {"coeff", to_json(c)}});
    return {{"p", e.generators()}, {"degree", e.degree()}, {"entries", entries}};
}

inline PolynomialElement element_from_json(const json& j, std::size_t n, const std::string& path = "") {
    const std::size_t p = detail::as_size(detail::field(j, "p", path), path + "/p");
    const std::size_t d = detail::as_size(detail::field(j, "degree", path), path + "/degree");
    if (p == 0 || d > p) detail::fail(path, "require p >= 1 and degree <= p");
    const json& entries = detail::field(j, "entries", path);
    if (!entries.is_array()) detail::fail(path + "/entries", "expected an array");
    PolynomialElement e(p, d);
    for (std::size_t t = 0; t < entries.size(); ++t) {
        const std::string tp = path + "/entries/" + std::to_string(t);
        const MultiIndex k = index_from_json(detail::field(entries[t], "index", tp), p, d, tp + "/index");
        const json& c = detail::field(entries[t], "coeff", tp);
        Polynomial q = (c.is_object() || c.is_string()) ? polynomial_from_json(c, n, tp + "/coeff")
                                                        : Polynomial::constant(n, gaussian_from_json(c, tp + "/coeff"));
        if (q.num_vars() != n) detail::fail(tp + "/coeff", "expected a polynomial in n = " + std::to_string(n) + " variables");
        e.add(k, q);
    }
    return e;
}

// ---- domains and weights ----

inline json to_json(const quadrature::Domain& d) {
    json center = json::array();
    for (const auto& c : d.center()) center.push_back(to_json(c));
    if (d.kind() == quadrature::Domain::Kind::Polydisc) return {{"kind", "polydisc"}, {"center", center}, {"radii", d.radii()}};
    return {{"kind", "ball"}, {"center", center}, {"radius", d.radius()}};
}

inline quadrature::Domain domain_from_json(const json& j, const std::string& path = "") {
    const json& kind = detail::field(j, "kind", path);
    const json& cj = detail::field(j, "center", path);
    if (!cj.is_array() || cj.empty()) detail::fail(path + "/center", "expected a nonempty array");
    std::vector<Complex> center;
    for (std::size_t k = 0; k < cj.size(); ++k) center.push_back(complex_from_json(cj[k], path + "/center/" + std::to_string(k)));
    try {
        if (kind == "polydisc") {
            const json& rj = detail::field(j, "radii", path);
            if (!rj.is_array()) detail::fail(path + "/radii", "expected an array");
            std::vector<double> radii;
            for (std::size_t k = 0; k < rj.size(); ++k) radii.push_back(detail::as_double(rj[k], path + "/radii/" + std::to_string(k)));
            return quadrature::Domain::polydisc(std::move(center), std::move(radii));
        }
        if (kind == "ball") return quadrature::Domain::ball(std::move(center), detail::as_double(detail::field(j, "radius", path), path + "/radius"));
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        detail::fail(path, e.what());
    }
    detail::fail(path + "/kind", "expected \"polydisc\" or \"ball\"");
}

inline double number_or(const json& j, const char* key, double fallback, const std::string& path) {
    return j.contains(key) ? detail::as_double(j[key], path + "/" + key) : fallback;
}

inline triples::SkodaTriple triple_from_json(const json& j, int q, const std::string& path = "") {
    const json& kind = detail::field(j, "kind", path);
    if (kind == "log") return triples::SkodaTriple::log(detail::as_double(detail::field(j, "eps", path), path + "/eps"), q);
    if (kind == "exp")
        return triples::SkodaTriple::exp(detail::as_double(detail::field(j, "eps", path), path + "/eps"), q,
                                         number_or(j, "eta", 0.5, path));
    if (kind == "combined")
        return triples::SkodaTriple::combined(number_or(j, "eps1", 0.0, path), number_or(j, "eps2", 0.0, path),
                                              number_or(j, "eps3", 1.0, path), q);
    if (kind == "custom")
        return triples::SkodaTriple::custom(number_or(j, "log_coef", 0.0, path), number_or(j, "exp_coef", 0.0, path),
                                            number_or(j, "exp_rate", 0.0, path), q);
    detail::fail(path + "/kind", "expected log, exp, combined or custom");
}

inline json to_json(const triples::SkodaTriple& t) {
    const auto& p = t.params;
    switch (t.kind) {
        case triples::Kind::Log: return {{"kind", "log"}, {"eps", p.eps}};
        case triples::Kind::Exp: return {{"kind", "exp"}, {"eps", p.eps}, {"eta", p.eta}};
        case triples::Kind::Combined: return {{"kind", "combined"}, {"eps1", p.eps1}, {"eps2", p.eps2}, {"eps3", p.eps3}};
        case triples::Kind::Custom:
            return {{"kind", "custom"}, {"log_coef", p.log_coef}, {"exp_coef", p.exp_coef}, {"exp_rate", p.exp_rate}};
    }
    return {};
}

inline curvature::WeightSystem weight_from_json(const json& j, int q, int ell, std::size_t n, const std::string& path = "") {
    HermitianPolynomial psi(n);
    if (j.contains("psi")) psi = hermitian_from_json(j["psi"], n, path + "/psi");
    const json& mode = detail::field(j, "mode", path);
    try {
        if (mode == "t1") {
            const double tau = detail::as_double(detail::field(j, "tau", path), path + "/tau");
            if (j.contains("lambda"))
                return curvature::WeightSystem::theorem1(tau, detail::as_double(j["lambda"], path + "/lambda"), q, ell, psi);
            return curvature::WeightSystem::theorem1(tau, q, ell, psi);
        }
        if (mode == "triple") return curvature::WeightSystem::theorem2(triple_from_json(j, q, path), ell, psi);
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        detail::fail(path, e.what());
    }
    detail::fail(path + "/mode", "expected \"t1\" or \"triple\"");
}

inline json to_json(const curvature::WeightSystem& w) {
    json out;
    if (w.is_theorem1()) {
        out = {{"mode", "t1"}, {"tau", w.constant_twist().tau}, {"lambda", w.constant_twist().lambda}};
    } else {
        out = to_json(w.triple());
        out["mode"] = "triple";
    }
    if (!w.psi().polynomial().is_zero()) out["psi"] = to_json(w.psi().polynomial());
    return out;
}

// ---- problems and witnesses ----

inline std::vector<Polynomial> generators_from_json(const json& j, std::size_t n, const std::string& path = "") {
    if (!j.is_array() || j.empty()) detail::fail(path, "expected a nonempty array of polynomials");
    std::vector<Polynomial> g;
    for (std::size_t k = 0; k < j.size(); ++k) g.push_back(polynomial_from_json(j[k], n, path + "/" + std::to_string(k)));
    return g;
}

/// Variable count: "n" when present, else the largest count referenced by g and f.
inline std::size_t infer_vars(const json& g, const json* f) {
    std::size_t n = 0;
    if (g.is_array())
        for (const auto& q : g) n = std::max(n, polynomial_vars(q));
    if (f && f->is_object() && f->contains("entries") && (*f)["entries"].is_array())
        for (const auto& e : (*f)["entries"])
            if (e.contains("coeff") && (e["coeff"].is_object() || e["coeff"].is_string()))
                n = std::max(n, polynomial_vars(e["coeff"]));
    return std::max<std::size_t>(n, 1);
}

inline division::DivisionProblem problem_from_json(const json& j, const std::string& path = "") {
    division::DivisionProblem prob;
    const json& gj = detail::field(j, "g", path);
    const json& fj = detail::field(j, "f", path);
    const std::size_t n = j.contains("n") ? detail::as_size(j["n"], path + "/n") : infer_vars(gj, &fj);
    prob.g = generators_from_json(gj, n, path + "/g");
    prob.f = element_from_json(fj, n, path + "/f");
    prob.ell = detail::as_size(detail::field(j, "ell", path), path + "/ell");
    if (prob.ell < 1 || prob.ell > prob.g.size()) detail::fail(path + "/ell", "require 1 <= ell <= p");
    if (prob.f.generators() != prob.g.size()) detail::fail(path + "/f/p", "f must use p = " + std::to_string(prob.g.size()));
    if (prob.f.degree() != prob.ell - 1) detail::fail(path + "/f/degree", "f must have degree ell - 1");
    if (j.contains("domain")) prob.domain = domain_from_json(j["domain"], path + "/domain");
    if (j.contains("weight") && !j["weight"].is_null())
        prob.weight = weight_from_json(j["weight"], static_cast<int>(prob.q()), static_cast<int>(prob.ell), n, path + "/weight");
    try {
        prob.validate();
    } catch (const std::exception& e) {
        detail::fail(path, e.what());
    }
    return prob;
}

inline json to_json(const division::DivisionProblem& prob) {
    json g = json::array();
    for (const auto& q : prob.g) g.push_back(to_json(q));
    json out = {{"n", prob.n()}, {"g", g}, {"f", to_json(prob.f)}, {"ell", prob.ell}};
    if (prob.domain) out["domain"] = to_json(*prob.domain);
    if (prob.weight) out["weight"] = to_json(*prob.weight);
    return out;
}

inline json to_json(const division::DivisionWitness& w) {
    return {{"u", to_json(w.u)}, {"residual", to_json(w.residual)}, {"degree_cap", w.degree_cap}};
}

inline division::DivisionWitness witness_from_json(const json& j, std::size_t n, const std::string& path = "") {
    division::DivisionWitness w;
    w.u = element_from_json(detail::field(j, "u", path), n, path + "/u");
    if (j.contains("residual")) w.residual = element_from_json(j["residual"], n, path + "/residual");
    if (j.contains("degree_cap")) w.degree_cap = static_cast<int>(detail::as_size(j["degree_cap"], path + "/degree_cap"));
    return w;
}

// ---- inequality instances ----

inline json to_json(const lemma1::Instance& inst) {
    json a = json::array(), b = json::array(), c = json::array();
    for (const auto& v : inst.a) a.push_back(to_json(v));
    for (Eigen::Index i = 0; i < inst.b.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index k = 0; k < inst.b.cols(); ++k) row.push_back(to_json(Complex(inst.b(i, k))));
        b.push_back(row);
    }
    for (const auto& [k, vec] : inst.c.entries) {
        json v = json::array();
        for (const auto& x : vec) v.push_back(to_json(x));
        c.push_back({{"index", index_to_json(k)}, {"vector", v}});
    }
    return {{"p", inst.p}, {"n", inst.n}, {"ell", inst.ell}, {"a", a}, {"b", b}, {"c", c}};
}

inline lemma1::Instance instance_from_json(const json& j, const std::string& path = "") {
    lemma1::Instance inst;
    inst.p = detail::as_size(detail::field(j, "p", path), path + "/p");
    inst.n = detail::as_size(detail::field(j, "n", path), path + "/n");
    inst.ell = detail::as_size(detail::field(j, "ell", path), path + "/ell");
    if (inst.p == 0 || inst.n == 0 || inst.ell == 0 || inst.ell > inst.p)
        detail::fail(path, "require p, n >= 1 and 1 <= ell <= p");
    const json& a = detail::field(j, "a", path);
    if (!a.is_array() || a.size() != inst.p) detail::fail(path + "/a", "expected p entries");
    for (std::size_t k = 0; k < inst.p; ++k) inst.a.push_back(complex_from_json(a[k], path + "/a/" + std::to_string(k)));
    const json& b = detail::field(j, "b", path);
    if (!b.is_array() || b.size() != inst.p) detail::fail(path + "/b", "expected p rows");
    inst.b.resize(static_cast<Eigen::Index>(inst.p), static_cast<Eigen::Index>(inst.n));
    for (std::size_t i = 0; i < inst.p; ++i) {
        const std::string rp = path + "/b/" + std::to_string(i);
        if (!b[i].is_array() || b[i].size() != inst.n) detail::fail(rp, "expected n entries");
        for (std::size_t k = 0; k < inst.n; ++k)
            inst.b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = complex_from_json(b[i][k], rp + "/" + std::to_string(k));
    }
    inst.c = SkewVectorArray{inst.p, inst.ell, inst.n, {}};
    const json& c = detail::field(j, "c", path);
    if (!c.is_array()) detail::fail(path + "/c", "expected an array");
    for (std::size_t t = 0; t < c.size(); ++t) {
        const std::string tp = path + "/c/" + std::to_string(t);
        const MultiIndex k = index_from_json(detail::field(c[t], "index", tp), inst.p, inst.ell, tp + "/index");
        const json& v = detail::field(c[t], "vector", tp);
        if (!v.is_array() || v.size() != inst.n) detail::fail(tp + "/vector", "expected n entries");
        std::vector<Complex> vec;
        for (std::size_t a2 = 0; a2 < inst.n; ++a2) vec.push_back(complex_from_json(v[a2], tp + "/vector/" + std::to_string(a2)));
        inst.c.entries[k] = std::move(vec);
    }
    try {
        inst.validate();
    } catch (const std::exception& e) {
        detail::fail(path, e.what());
    }
    return inst;
}

// ---- files and reports ----

/// Parses a UTF-8 JSON file; syntax errors report file:line:column.
inline json load_json_file(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw InputError(file + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
            if (text[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string msg = e.what();
        if (auto pos = msg.find("; "); pos != std::string::npos) msg = msg.substr(pos + 2);
        throw InputError(file + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
    }
}

inline void write_json_file(const std::string& file, const json& j) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw std::runtime_error(file + ": cannot open for writing");
    out << j.dump(2) << '\n';
}

struct Check {
    std::string name;
    std::string status;  // PASS, FAIL, SATISFIED, VIOLATED, INCONCLUSIVE, ...
    json lhs = nullptr;
    json rhs = nullptr;
    json stderr_ = nullptr;
    json details = json::object();
};

inline json to_json(const Check& c) {
    return {{"name", c.name}, {"status", c.status}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"stderr", c.stderr_}, {"details", c.details}};
}

struct Report {
    json config = json::object();
    std::vector<Check> checks;

    json to_json() const {
        json cs = json::array();
        for (const auto& c : checks) cs.push_back(io::to_json(c));
        return {{"config", config}, {"checks", cs}};
    }
};

}  // namespace koszul::io

#endif  // KOSZUL_IO_HPP
