// koszul: command-line front end.
//
// Exit codes: 0 success / SATISFIED, 1 usage or input error,
// 2 property violation, 3 INCONCLUSIVE.

#include "koszul/curvature.hpp"
#include "koszul/division.hpp"
#include "koszul/io.hpp"
#include "koszul/lemma1.hpp"
#include "koszul/quadrature.hpp"
#include "koszul/selftest.hpp"
#include "koszul/text.hpp"
#include "koszul/triples.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace koszul;
using io::json;

constexpr int kOk = 0, kInput = 1, kViolation = 2, kInconclusive = 3;
constexpr const char* kVersion = "koszul 1.0.0";

json resolved_config(const CLI::App& sub) {
    json cfg = {{"command", sub.get_name()}, {"version", kVersion}};
    for (const CLI::Option* opt : sub.get_options()) {
        if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
        const std::string key = opt->get_lnames().front();
        if (opt->get_expected_max() == 0) {
            cfg[key] = opt->count() > 0;
        } else if (opt->count() > 0) {
            const auto& r = opt->results();
            cfg[key] = r.size() == 1 ? json(r.front()) : json(r);
        } else if (!opt->get_default_str().empty()) {
            cfg[key] = opt->get_default_str();
        }
    }
    return cfg;
}

void write_report(const std::string& path, const io::Report& rep) {
    if (!path.empty()) io::write_json_file(path, rep.to_json());
}

// "t1:tau=2,lambda=0.25", "log:eps=1", "exp:eps=1,eta=0.5", "combined:eps1=..,eps2=..,eps3=..",
// "custom:log=..,coef=..,rate=..", "none".
std::map<std::string, double> parse_kv(const std::string& s, const std::string& what) {
    std::map<std::string, double> kv;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw io::InputError(what + ": expected key=value, got '" + item + "'");
        try {
            std::size_t used = 0;
            const std::string v = item.substr(eq + 1);
            kv[item.substr(0, eq)] = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw io::InputError(what + ": malformed number in '" + item + "'");
        }
    }
    return kv;
}

double take(std::map<std::string, double>& kv, const std::string& key, std::optional<double> fallback,
            const std::string& what) {
    auto it = kv.find(key);
    if (it == kv.end()) {
        if (!fallback) throw io::InputError(what + ": missing '" + key + "'");
        return *fallback;
    }
    const double v = it->second;
    kv.erase(it);
    return v;
}

void no_leftovers(const std::map<std::string, double>& kv, const std::string& what) {
    if (!kv.empty()) throw io::InputError(what + ": unknown key '" + kv.begin()->first + "'");
}

std::optional<curvature::WeightSystem> parse_weight(const std::string& spec, int q, int ell, HermitianPolynomial psi) {
    if (spec.empty() || spec == "none") return std::nullopt;
    const auto colon = spec.find(':');
    const std::string mode = spec.substr(0, colon);
    auto kv = parse_kv(colon == std::string::npos ? "" : spec.substr(colon + 1), "--weight");
    std::optional<curvature::WeightSystem> w;
    if (mode == "t1") {
        const double tau = take(kv, "tau", std::nullopt, "--weight");
        if (kv.count("lambda"))
            w = curvature::WeightSystem::theorem1(tau, take(kv, "lambda", std::nullopt, "--weight"), q, ell, psi);
        else
            w = curvature::WeightSystem::theorem1(tau, q, ell, psi);
    } else if (mode == "log") {
        w = curvature::WeightSystem::theorem2(triples::SkodaTriple::log(take(kv, "eps", std::nullopt, "--weight"), q), ell, psi);
    } else if (mode == "exp") {
        const double eps = take(kv, "eps", std::nullopt, "--weight");
        w = curvature::WeightSystem::theorem2(triples::SkodaTriple::exp(eps, q, take(kv, "eta", 0.5, "--weight")), ell, psi);
    } else if (mode == "combined") {
        const double e1 = take(kv, "eps1", 0.0, "--weight"), e2 = take(kv, "eps2", 0.0, "--weight"),
                     e3 = take(kv, "eps3", 1.0, "--weight");
        w = curvature::WeightSystem::theorem2(triples::SkodaTriple::combined(e1, e2, e3, q), ell, psi);
    } else if (mode == "custom") {
        const double lc = take(kv, "log", 0.0, "--weight"), c = take(kv, "coef", 0.0, "--weight"),
                     r = take(kv, "rate", 0.0, "--weight");
        w = curvature::WeightSystem::theorem2(triples::SkodaTriple::custom(lc, c, r, q), ell, psi);
    } else {
        throw io::InputError("--weight: unknown mode '" + mode + "' (t1, log, exp, combined, custom, none)");
    }
    no_leftovers(kv, "--weight");
    return w;
}

json load_json_argument(const std::string& arg) {
    if (!arg.empty() && (arg.front() == '{' || arg.front() == '[')) {
        try {
            return json::parse(arg);
        } catch (const json::parse_error& e) {
            throw io::InputError(std::string("inline JSON: ") + e.what());
        }
    }
    return io::load_json_file(arg);
}

// ---------------------------------------------------------------- verify-lemma1

struct Lemma1Args {
    std::uint64_t seed = 0;
    std::size_t instances = 100000;
    std::size_t pmax = 5, nmax = 4;
    double tolerance = 1e-9;
    unsigned workers = 0;
    std::string report;
};

int run_verify_lemma1(const Lemma1Args& a, const CLI::App& sub) {
    lemma1::BatchConfig cfg;
    cfg.seed = a.seed;
    cfg.instances = a.instances;
    cfg.pmax = a.pmax;
    cfg.nmax = a.nmax;
    cfg.tolerance = a.tolerance;
    cfg.workers = a.workers;
    const auto r = lemma1::verify_batch(cfg);

    io::Report rep;
    rep.config = resolved_config(sub);
    io::Check c;
    c.name = "lemma1_inequality_and_rank";
    c.status = r.violations.empty() ? "PASS" : "FAIL";
    c.details = {{"instances", r.instances},
                 {"checks", r.checks},
                 {"rank_at_bound", r.rank_at_bound},
                 {"max_ratio", r.max_ratio},
                 {"violations", r.violations.size()}};
    rep.checks.push_back(c);
    for (const auto& v : r.violations) {
        io::Check vc;
        vc.name = "violation";
        vc.status = "FAIL";
        vc.lhs = v.lhs;
        vc.rhs = v.rhs;
        vc.details = {{"instance_index", v.instance_index}, {"kind", v.kind}, {"base", io::index_to_json(v.base)},
                      {"instance", io::to_json(v.instance)}};
        rep.checks.push_back(vc);
    }
    write_report(a.report, rep);

    std::printf("verify-lemma1: %zu instances, %zu (instance, base) checks, %zu at the rank bound, max lhs/rhs = %.12g\n",
                r.instances, r.checks, r.rank_at_bound, r.max_ratio);
    if (r.violations.empty()) {
        std::printf("verify-lemma1: no violations\n");
        return kOk;
    }
    std::printf("verify-lemma1: %zu violations; first offending instance:\n", r.violations.size());
    const auto& v = r.violations.front();
    std::printf("%s\n", json({{"kind", v.kind},
                               {"instance_index", v.instance_index},
                               {"base", io::index_to_json(v.base)},
                               {"lhs", v.lhs},
                               {"rhs", v.rhs},
                               {"instance", io::to_json(v.instance)}})
                            .dump(2)
                            .c_str());
    return kViolation;
}

// ---------------------------------------------------------------- triples

struct TripleArgs {
    std::string kind = "log";
    double eps = 1.0, eta = 0.5, eps1 = 0.0, eps2 = 0.0, eps3 = 1.0;
    int q = 1;
    std::vector<std::string> custom;
    std::string grid;  // "x_min:x_max:points"
    std::string report;
    // derive-weights
    int ell = 1;
    double x_min = 1.0 + 1e-6, x_max = 50.0;
    std::size_t points = 10000;
    std::string format = "csv";
    std::string out;
};

triples::SkodaTriple build_triple(const TripleArgs& a) {
    triples::SkodaTriple t;
    if (a.kind == "log") t = triples::SkodaTriple::log(a.eps, a.q);
    else if (a.kind == "exp") t = triples::SkodaTriple::exp(a.eps, a.q, a.eta);
    else if (a.kind == "combined") t = triples::SkodaTriple::combined(a.eps1, a.eps2, a.eps3, a.q);
    else if (a.kind == "custom") t = triples::SkodaTriple::custom(0.0, 0.0, 0.0, a.q);
    else throw io::InputError("--kind: expected log, exp, combined or custom");
    if (a.custom.empty()) return t;

    // Rewrite as phi = log_coef * log x, F = exp_coef * e^{exp_rate (x-1)} and apply overrides.
    double lc = 0.0, ec = 0.0, er = 0.0;
    switch (t.kind) {
        case triples::Kind::Log: lc = a.eps; break;
        case triples::Kind::Exp: ec = -a.eta; er = -a.eps; break;
        case triples::Kind::Combined: lc = a.eps1; ec = -a.eps2; er = -a.eps3; break;
        case triples::Kind::Custom: break;
    }
    std::string joined;
    for (const auto& s : a.custom) joined += s + ",";
    auto kv = parse_kv(joined, "--custom");
    lc = take(kv, "log", lc, "--custom");
    ec = take(kv, "coef", ec, "--custom");
    er = take(kv, "rate", er, "--custom");
    no_leftovers(kv, "--custom");
    return triples::SkodaTriple::custom(lc, ec, er, a.q);
}

void parse_grid(const std::string& g, double& lo, double& hi, std::size_t& n) {
    if (g.empty()) return;
    std::stringstream ss(g);
    std::string a, b, c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c))
        throw io::InputError("--grid: expected x_min:x_max:points");
    try {
        lo = std::stod(a);
        hi = std::stod(b);
        n = std::stoul(c);
    } catch (const std::exception&) {
        throw io::InputError("--grid: malformed number");
    }
}

int run_check_triple(const TripleArgs& a, const CLI::App& sub) {
    const auto t = build_triple(a);
    double lo = 1.0 + 1e-6, hi = 50.0;
    std::size_t n = 10000;
    parse_grid(a.grid, lo, hi, n);
    const auto r = triples::validate(t, lo, hi, n);

    io::Report rep;
    rep.config = resolved_config(sub);
    io::Check c;
    c.name = "skoda_triple_conditions";
    c.status = r.valid ? "PASS" : "FAIL";
    c.details = {{"triple", io::to_json(t)}, {"points", r.points}, {"max_derivative_error", r.max_derivative_error}};
    if (!r.valid) {
        c.details["violated_condition"] = r.violated_condition;
        c.details["value"] = r.violation_value;
        if (r.violation_x) c.details["x"] = *r.violation_x;
    }
    rep.checks.push_back(c);
    write_report(a.report, rep);

    if (r.valid) {
        std::printf("check-triple: valid on %zu grid points in [%.9g, %.9g]\n", r.points, lo, hi);
        return kOk;
    }
    if (r.violation_x)
        std::printf("check-triple: VIOLATION of %s at x = %.17g (value %.6g)\n", r.violated_condition.c_str(),
                    *r.violation_x, r.violation_value);
    else
        std::printf("check-triple: VIOLATION of %s\n", r.violated_condition.c_str());
    return kViolation;
}

int run_derive_weights(const TripleArgs& a) {
    const auto t = build_triple(a);
    if (a.format != "csv" && a.format != "json") throw io::InputError("--format: expected csv or json");
    std::ofstream file;
    if (!a.out.empty()) {
        file.open(a.out);
        if (!file) throw io::InputError(a.out + ": cannot open for writing");
    }
    std::ostream& os = a.out.empty() ? std::cout : file;
    const auto xs = triples::log_grid(a.x_min, a.x_max, a.points);
    if (a.format == "csv") {
        os << "x,a,b,lambda,a_plus_lambda,efficiency\n";
        char buf[256];
        for (double x : xs) {
            const auto w = triples::derived(t, a.ell, x);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", x, w.a, w.b, w.lambda,
                          w.a_plus_lambda, w.efficiency);
            os << buf;
        }
    } else {
        json rows = json::array();
        for (double x : xs) {
            const auto w = triples::derived(t, a.ell, x);
            rows.push_back({{"x", x}, {"a", w.a}, {"b", w.b}, {"lambda", w.lambda}, {"a_plus_lambda", w.a_plus_lambda},
                            {"efficiency", w.efficiency}});
        }
        os << json({{"triple", io::to_json(t)}, {"ell", a.ell}, {"rows", rows}}).dump(2) << '\n';
    }
    return kOk;
}

// ---------------------------------------------------------------- divide

struct DivideArgs {
    std::string problem, g, f, domain, weight, psi, out;
    std::size_t ell = 1;
    std::optional<int> cap;
    bool minimize = false;
    std::size_t samples = 20000;
    std::uint64_t seed = 0;
    unsigned workers = 0;
};

division::DivisionProblem load_problem_from_parts(const DivideArgs& a) {
    if (!a.problem.empty()) {
        if (!a.g.empty() || !a.f.empty()) throw io::InputError("use either --problem or --g/--f");
        return io::problem_from_json(io::load_json_file(a.problem));
    }
    if (a.g.empty() || a.f.empty()) throw io::InputError("divide: --g and --f (or --problem) are required");
    json gj = load_json_argument(a.g);
    if (gj.is_object() && gj.contains("g")) gj = gj["g"];
    json fj = load_json_argument(a.f);
    if (fj.is_string() || (fj.is_object() && fj.contains("terms")))
        fj = json{{"p", gj.is_array() ? gj.size() : 0}, {"degree", 0}, {"entries", json::array({{{"index", json::array()}, {"coeff", fj}}})}};
    json pj = {{"g", gj}, {"f", fj}, {"ell", a.ell}};
    if (!a.domain.empty()) pj["domain"] = load_json_argument(a.domain);
    return io::problem_from_json(pj);
}

int run_divide(const DivideArgs& a, const CLI::App& sub) {
    auto prob = load_problem_from_parts(a);
    if (!a.weight.empty() || !a.psi.empty()) {
        HermitianPolynomial psi(prob.n());
        if (!a.psi.empty()) psi = text::parse_hermitian(a.psi, prob.n());
        prob.weight = parse_weight(a.weight.empty() ? "none" : a.weight, static_cast<int>(prob.q()),
                                   static_cast<int>(prob.ell), psi);
    }
    if (a.minimize && !prob.domain) prob.domain = quadrature::Domain::unit_polydisc(prob.n());

    division::SolveResult res;
    if (a.cap) {
        if (*a.cap < 0) throw io::InputError("--cap must be nonnegative");
        res = division::solve(prob, *a.cap);
    } else {
        res = division::solve_up_to(prob, division::default_degree_cap(prob));
    }
    if (const auto* none = std::get_if<division::NoSolutionAtCap>(&res)) {
        std::printf("divide: no solution with exponents <= %d (%zu unknowns, %zu equations, rank %zu)\n",
                    none->degree_cap, none->unknowns, none->equations, none->rank);
        if (!a.out.empty())
            io::write_json_file(a.out, {{"config", resolved_config(sub)},
                                        {"status", "NO_SOLUTION_AT_CAP"},
                                        {"degree_cap", none->degree_cap}});
        return kInconclusive;
    }
    auto w = std::get<division::DivisionWitness>(res);
    json extra = json::object();
    if (a.minimize) {
        division::SampleOptions so{a.samples, a.seed, division::kDefaultCutoff, a.workers};
        w = division::minimal_weighted_witness(prob, w.degree_cap, so);
        extra["sampled_weighted_norm"] = division::sampled_weighted_norm(prob, w.u, so).mean;
        extra["minimized"] = true;
    }
    json out = io::to_json(w);
    out["config"] = resolved_config(sub);
    out["problem"] = io::to_json(prob);
    out.update(extra);
    if (!a.out.empty()) io::write_json_file(a.out, out);

    std::printf("divide: witness found at degree cap %d; residual is exactly zero\n", w.degree_cap);
    for (const auto& [k, q] : w.u.entries()) {
        std::string idx;
        for (unsigned i : k) idx += (idx.empty() ? "" : ",") + std::to_string(i + 1);
        std::printf("  u[%s] = %s\n", idx.c_str(), text::to_text(q).c_str());
    }
    if (w.u.entries().empty()) std::printf("  u = 0\n");
    return kOk;
}

// ---------------------------------------------------------------- estimate

struct EstimateArgs {
    std::string problem, witness, theorem = "t1", report;
    double tau = 2.0, eps = 1.0, cutoff = division::kDefaultCutoff;
    std::size_t samples = 100000, points = 1000;
    std::uint64_t seed = 0;
    unsigned workers = 0;
    bool check15 = false, minimize = false;
    std::optional<int> cap;
};

int run_check15(const EstimateArgs& a, const division::DivisionProblem& prob, io::Report& rep) {
    curvature::WeightSystem w;
    const int q = static_cast<int>(prob.q()), ell = static_cast<int>(prob.ell);
    const HermitianPolynomial psi = prob.weight ? prob.weight->psi().polynomial() : HermitianPolynomial(prob.n());
    if (prob.weight) w = *prob.weight;
    else if (a.theorem == "t1") w = curvature::WeightSystem::theorem1(a.tau, q, ell, psi);
    else if (a.theorem == "cor2") w = curvature::WeightSystem::theorem2(triples::SkodaTriple::log(a.eps, q), ell, psi);
    else w = curvature::WeightSystem::theorem2(triples::SkodaTriple::exp(a.eps, q), ell, psi);
    if (w.is_theorem1() && !w.constants_admissible()) throw io::InputError("theorem-1 weight requires tau (1 - lambda) > 1");

    const curvature::Generators gens(prob.g);
    const auto dom = prob.domain ? *prob.domain : quadrature::Domain::unit_polydisc(prob.n());
    double worst = INFINITY, worst_rel = INFINITY;
    std::size_t used = 0, skipped = 0;
    std::printf("# point  margin  scale  relative\n");
    for (std::size_t i = 0; i < a.points; ++i) {
        const auto z = quadrature::sample_point(dom, a.seed, i);
        const double ns = gens.norm_sq(z);
        if (ns < curvature::kMinNormSq || (!w.is_theorem1() && !(ns < 1.0))) {
            ++skipped;
            continue;
        }
        const auto c = curvature::condition15_margin(w, gens, z);
        const double r = c.margin / std::max(c.scale, 1e-300);
        std::printf("%zu %.12g %.12g %.6g\n", i, c.margin, c.scale, r);
        worst = std::min(worst, c.margin);
        worst_rel = std::min(worst_rel, r);
        ++used;
    }
    const bool ok = used > 0 && worst_rel >= -1e-9;
    std::printf("curvature margin: %zu points (%zu skipped), global minimum margin %.12g (relative %.6g)\n", used, skipped,
                worst, worst_rel);
    io::Check c;
    c.name = "condition15";
    c.status = used == 0 ? "INCONCLUSIVE" : (ok ? "PASS" : "FAIL");
    c.details = {{"points", used}, {"skipped", skipped}, {"min_margin", used ? json(worst) : json(nullptr)},
                 {"min_relative_margin", used ? json(worst_rel) : json(nullptr)}, {"weight", io::to_json(w)}};
    rep.checks.push_back(c);
    if (used == 0) return kInconclusive;
    return ok ? kOk : kViolation;
}

int run_estimate(const EstimateArgs& a, const CLI::App& sub) {
    if (a.problem.empty()) throw io::InputError("estimate: --problem is required");
    auto prob = io::problem_from_json(io::load_json_file(a.problem));
    if (!prob.domain) throw io::InputError(a.problem + ": /domain: estimate needs a domain");
    io::Report rep;
    rep.config = resolved_config(sub);
    rep.config["problem"] = io::to_json(prob);

    if (a.check15) {
        const int code = run_check15(a, prob, rep);
        write_report(a.report, rep);
        return code;
    }

    division::TheoremSpec spec;
    if (a.theorem == "t1") spec = {division::Theorem::T1, a.tau};
    else if (a.theorem == "cor2") spec = {division::Theorem::Cor2, a.eps};
    else if (a.theorem == "cor3") spec = {division::Theorem::Cor3, a.eps};
    else throw io::InputError("--theorem: expected t1, cor2 or cor3");

    division::SampleOptions so{a.samples, a.seed, a.cutoff, a.workers};
    division::DivisionWitness w;
    bool minimal = false;
    if (!a.witness.empty()) {
        w = io::witness_from_json(io::load_json_file(a.witness), prob.n(), "");
    } else {
        const auto res = a.cap ? division::solve(prob, *a.cap)
                               : division::solve_up_to(prob, division::default_degree_cap(prob));
        if (!std::holds_alternative<division::DivisionWitness>(res)) {
            std::printf("estimate: no polynomial witness within the degree cap\n");
            return kInconclusive;
        }
        w = std::get<division::DivisionWitness>(res);
        if (a.minimize) {
            w = division::minimal_weighted_witness(prob, w.degree_cap, so);
            minimal = true;
        }
    }
    if (w.u.generators() != prob.p() || w.u.degree() != prob.ell) throw io::InputError("witness shape does not match the problem");

    division::EstimateReport er;
    try {
        er = division::verify_estimate(prob, w, spec, so, minimal);
    } catch (const division::PreconditionError& e) {
        io::Check c;
        c.name = "precondition";
        c.status = "FAIL";
        c.details = {{"message", e.what()}};
        rep.checks.push_back(c);
        write_report(a.report, rep);
        std::fprintf(stderr, "estimate: precondition failed: %s\n", e.what());
        return kInput;
    }

    io::Check c;
    c.name = "l2_estimate_" + division::to_string(spec.theorem);
    c.status = division::to_string(er.verdict);
    c.lhs = er.lhs.mean;
    c.rhs = er.rhs;
    c.stderr_ = {{"lhs", er.lhs.standard_error}, {"rhs", er.rhs_stderr}, {"difference", er.difference_stderr}};
    c.details = {{"constant", er.constant},
                 {"parameter", spec.parameter},
                 {"q", er.q},
                 {"ratio", er.ratio},
                 {"samples", er.lhs.samples},
                 {"rejected", er.hypothesis.rejected},
                 {"rejected_fraction", er.hypothesis.rejected_fraction()},
                 {"max_integrand_lhs", er.lhs.max_integrand},
                 {"max_integrand_rhs", er.hypothesis.max_integrand},
                 {"residual_zero", er.residual_zero},
                 {"witness_minimal", minimal},
                 {"notes", er.notes}};
    rep.checks.push_back(c);
    write_report(a.report, rep);

    std::printf("estimate (%s, parameter %.6g): LHS = %.10g +- %.3g, RHS = %.10g +- %.3g, ratio %.6g\n",
                division::to_string(spec.theorem).c_str(), spec.parameter, er.lhs.mean, er.lhs.standard_error, er.rhs,
                er.rhs_stderr, er.ratio);
    std::printf("estimate: rejected fraction %.4g; verdict %s\n", er.hypothesis.rejected_fraction(),
                division::to_string(er.verdict).c_str());
    for (const auto& n : er.notes) std::printf("  note: %s\n", n.c_str());
    switch (er.verdict) {
        case division::Verdict::Satisfied: return kOk;
        case division::Verdict::Violated: return kViolation;
        case division::Verdict::Inconclusive: return kInconclusive;
    }
    return kInconclusive;
}

// ---------------------------------------------------------------- rank-oracle

struct RankArgs {
    std::string instance, base, report;
    std::uint64_t seed = 0;
    std::size_t p = 3, n = 2, ell = 1;
};

int run_rank_oracle(const RankArgs& a, const CLI::App& sub) {
    lemma1::Instance inst;
    if (!a.instance.empty()) {
        inst = io::instance_from_json(load_json_argument(a.instance));
    } else {
        if (a.ell < 1 || a.ell > a.p || a.n < 1) throw io::InputError("require 1 <= ell <= p and n >= 1");
        SplitMix64 eng(stream_seed(a.seed, 0));
        inst = lemma1::random_instance(a.p, a.n, a.ell, eng);
    }
    std::vector<MultiIndex> bases;
    if (!a.base.empty()) {
        std::vector<unsigned> idx;
        std::stringstream ss(a.base);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            unsigned long v = 0;
            try {
                v = std::stoul(tok);
            } catch (const std::exception&) {
                throw io::InputError("--base: malformed index '" + tok + "'");
            }
            if (v < 1 || v > inst.p) throw io::InputError("--base: index out of range");
            idx.push_back(static_cast<unsigned>(v - 1));
        }
        auto canon = MultiIndex::canonicalize(idx);
        if (!canon || canon->first.degree() + 1 != inst.ell) throw io::InputError("--base: need ell-1 distinct indices");
        bases.push_back(canon->first);
    } else {
        bases = all_multi_indices(inst.p, inst.ell - 1);
    }

    io::Report rep;
    rep.config = resolved_config(sub);
    rep.config["instance"] = io::to_json(inst);
    bool ok = true;
    for (const auto& b : bases) {
        const auto r = lemma1::rank_oracle(inst, b);
        const auto s = lemma1::inequality_sides(inst, b);
        const bool pass = r.rank <= r.bound && r.kernel_residual <= 1e-10 && r.base_row_residual <= 1e-10 &&
                          s.lhs <= s.rhs * (1.0 + 1e-9);
        ok = ok && pass;
        io::Check c;
        c.name = "rank_oracle";
        c.status = pass ? "PASS" : "FAIL";
        c.lhs = s.lhs;
        c.rhs = s.rhs;
        c.details = {{"base", io::index_to_json(b)},       {"rank", r.rank},
                     {"bound", r.bound},                   {"trace_sq", r.trace_sq},
                     {"frobenius_sq", r.frobenius_sq},     {"x_norm_sq", r.x_norm_sq},
                     {"theta_wedge_sq", r.theta_wedge_sq}, {"kernel_residual", r.kernel_residual},
                     {"base_row_residual", r.base_row_residual}};
        rep.checks.push_back(c);
        std::string bs;
        for (unsigned i : b) bs += (bs.empty() ? "" : ",") + std::to_string(i + 1);
        std::printf("base {%s}: rank %zu <= q = %zu; lhs %.12g, rhs %.12g; kernel %.3g, base rows %.3g: %s\n", bs.c_str(),
                    r.rank, r.bound, s.lhs, s.rhs, r.kernel_residual, r.base_row_residual, pass ? "ok" : "FAIL");
    }
    write_report(a.report, rep);
    return ok ? kOk : kViolation;
}

// ---------------------------------------------------------------- selftest

int run_selftest(std::uint64_t seed, unsigned workers, const std::string& report, const CLI::App& sub) {
    selftest::Options opt;
    opt.seed = seed;
    opt.workers = workers;
    io::Report rep;
    rep.config = resolved_config(sub);
    rep.checks = selftest::run(opt);
    write_report(report, rep);
    bool ok = true;
    for (const auto& c : rep.checks) {
        std::printf("%-26s %s\n", c.name.c_str(), c.status.c_str());
        ok = ok && c.status == "PASS";
    }
    return ok ? kOk : kViolation;
}

void add_triple_options(CLI::App* s, TripleArgs& t) {
    s->add_option("--kind", t.kind, "log | exp | combined | custom")->capture_default_str();
    s->add_option("--eps", t.eps, "eps for log/exp")->capture_default_str();
    s->add_option("--eta", t.eta, "exp triple amplitude")->capture_default_str();
    s->add_option("--eps1", t.eps1, "combined: log coefficient")->capture_default_str();
    s->add_option("--eps2", t.eps2, "combined: exp amplitude")->capture_default_str();
    s->add_option("--eps3", t.eps3, "combined: exp rate")->capture_default_str();
    s->add_option("--q", t.q, "integer q >= 1")->capture_default_str();
    s->add_option("--custom", t.custom, "overrides log=,coef=,rate= of phi = log*log x, F = coef*e^{rate(x-1)}");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Koszul complex and twisted division toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Lemma1Args l1;
    auto* s_l1 = app.add_subcommand("verify-lemma1", "randomized check of the generalized Cauchy-Schwarz inequality");
    s_l1->add_option("--seed", l1.seed)->capture_default_str();
    s_l1->add_option("--instances", l1.instances)->capture_default_str();
    s_l1->add_option("--pmax", l1.pmax)->capture_default_str();
    s_l1->add_option("--nmax", l1.nmax)->capture_default_str();
    s_l1->add_option("--tolerance", l1.tolerance)->capture_default_str();
    s_l1->add_option("--workers", l1.workers, "0: all cores")->capture_default_str();
    s_l1->add_option("--report", l1.report, "JSON report path");

    TripleArgs ct;
    auto* s_ct = app.add_subcommand("check-triple", "validate a Skoda triple on a grid");
    add_triple_options(s_ct, ct);
    s_ct->add_option("--grid", ct.grid, "x_min:x_max:points");
    s_ct->add_option("--report", ct.report, "JSON report path");

    TripleArgs dw;
    auto* s_dw = app.add_subcommand("derive-weights", "tabulate a, b, lambda, a+lambda and b/(a(b-1))");
    add_triple_options(s_dw, dw);
    s_dw->add_option("--ell", dw.ell)->capture_default_str();
    s_dw->add_option("--x-min", dw.x_min)->capture_default_str();
    s_dw->add_option("--x-max", dw.x_max)->capture_default_str();
    s_dw->add_option("--points", dw.points)->capture_default_str();
    s_dw->add_option("--format", dw.format, "csv | json")->capture_default_str();
    s_dw->add_option("--out", dw.out, "output path (default stdout)");

    DivideArgs dv;
    auto* s_dv = app.add_subcommand("divide", "exact polynomial solution of contract(g, u) = f");
    s_dv->add_option("--problem", dv.problem, "problem JSON file");
    s_dv->add_option("--g", dv.g, "generators: JSON file or inline JSON array");
    s_dv->add_option("--f", dv.f, "right-hand side: JSON file or inline JSON");
    s_dv->add_option("--ell", dv.ell)->capture_default_str();
    s_dv->add_option("--cap", dv.cap, "exponent bound per variable (default: search 0..deg f + 6)");
    s_dv->add_flag("--minimize", dv.minimize, "minimize the weighted norm over the solution space");
    s_dv->add_option("--weight", dv.weight, "t1:tau=2 | log:eps=1 | exp:eps=1 | combined:... | custom:... | none");
    s_dv->add_option("--psi", dv.psi, "psi in z/zb text form");
    s_dv->add_option("--domain", dv.domain, "domain JSON file or inline JSON (default unit polydisc)");
    s_dv->add_option("--samples", dv.samples)->capture_default_str();
    s_dv->add_option("--seed", dv.seed)->capture_default_str();
    s_dv->add_option("--workers", dv.workers)->capture_default_str();
    s_dv->add_option("--out", dv.out, "witness JSON path");

    EstimateArgs es;
    auto* s_es = app.add_subcommand("estimate", "Monte Carlo check of the weighted L2 bounds");
    s_es->add_option("--problem", es.problem, "problem JSON file")->required();
    s_es->add_option("--witness", es.witness, "witness JSON (default: solve)");
    s_es->add_option("--theorem", es.theorem, "t1 | cor2 | cor3")->capture_default_str();
    s_es->add_option("--tau", es.tau)->capture_default_str();
    s_es->add_option("--eps", es.eps)->capture_default_str();
    s_es->add_option("--samples", es.samples)->capture_default_str();
    s_es->add_option("--seed", es.seed)->capture_default_str();
    s_es->add_option("--workers", es.workers)->capture_default_str();
    s_es->add_option("--cutoff", es.cutoff, "reject samples with |g|^2 below this")->capture_default_str();
    s_es->add_option("--cap", es.cap, "degree cap when solving");
    s_es->add_flag("--minimize", es.minimize, "use the weighted least-squares witness");
    s_es->add_flag("--check-15", es.check15, "print curvature-condition margins at sampled points");
    s_es->add_option("--points", es.points, "points for --check-15")->capture_default_str();
    s_es->add_option("--report", es.report, "JSON report path");

    RankArgs ro;
    auto* s_ro = app.add_subcommand("rank-oracle", "operator rank and identities for one inequality instance");
    s_ro->add_option("--instance", ro.instance, "instance JSON file or inline JSON");
    s_ro->add_option("--seed", ro.seed)->capture_default_str();
    s_ro->add_option("--p", ro.p)->capture_default_str();
    s_ro->add_option("--n", ro.n)->capture_default_str();
    s_ro->add_option("--ell", ro.ell)->capture_default_str();
    s_ro->add_option("--base", ro.base, "comma-separated 1-based base indices (default: all)");
    s_ro->add_option("--report", ro.report, "JSON report path");

    std::uint64_t st_seed = 42;
    unsigned st_workers = 0;
    std::string st_report;
    auto* s_st = app.add_subcommand("selftest", "reduced-scale invariant suite");
    s_st->add_option("--seed", st_seed)->capture_default_str();
    s_st->add_option("--workers", st_workers)->capture_default_str();
    s_st->add_option("--report", st_report, "JSON report path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInput;
    }

    try {
        if (s_l1->parsed()) return run_verify_lemma1(l1, *s_l1);
        if (s_ct->parsed()) return run_check_triple(ct, *s_ct);
        if (s_dw->parsed()) return run_derive_weights(dw);
        if (s_dv->parsed()) return run_divide(dv, *s_dv);
        if (s_es->parsed()) return run_estimate(es, *s_es);
        if (s_ro->parsed()) return run_rank_oracle(ro, *s_ro);
        if (s_st->parsed()) return run_selftest(st_seed, st_workers, st_report, *s_st);
    } catch (const io::InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kInput;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kInput;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kInput;
    } catch (const std::out_of_range& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kInput;
    } catch (const std::length_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kInput;
    }
    return kInput;
}
