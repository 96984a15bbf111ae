#ifndef KOSZUL_TRIPLES_HPP
#define KOSZUL_TRIPLES_HPP

// Skoda triples (phi, F, q): phi, F in C^2(1, inf), q a positive integer with
//   x + F(x) > 0,
//   (x + F(x)) phi'(x) + F'(x) + 1 > 0,
//   (x + F(x)) phi''(x) + F''(x) < 0      for every x > 1,
// and the weight data a, b, lambda they generate.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace koszul::triples {

/// A function on (1, inf) with closed-form first and second derivatives.
struct ScalarFunction {
    std::function<double(double)> value;
    std::function<double(double)> d1;
    std::function<double(double)> d2;

    static ScalarFunction zero() {
        auto z = [](double) { return 0.0; };
        return {z, z, z};
    }
    /// c * log x
    static ScalarFunction scaled_log(double c) {
        return {[c](double x) { return c * std::log(x); }, [c](double x) { return c / x; },
                [c](double x) { return -c / (x * x); }};
    }
    /// c * exp(r (x - 1))
    static ScalarFunction scaled_exp(double c, double r) {
        return {[c, r](double x) { return c * std::exp(r * (x - 1.0)); },
                [c, r](double x) { return c * r * std::exp(r * (x - 1.0)); },
                [c, r](double x) { return c * r * r * std::exp(r * (x - 1.0)); }};
    }
};

enum class Kind { Log, Exp, Combined, Custom };

inline std::string to_string(Kind k) {
    switch (k) {
        case Kind::Log: return "log";
        case Kind::Exp: return "exp";
        case Kind::Combined: return "combined";
        case Kind::Custom: return "custom";
    }
    return "?";
}

struct Parameters {
    double eps = 0.0;   // log: eps; exp: eps
    double eta = 0.5;   // exp: -eta e^{-eps(x-1)}
    double eps1 = 0.0;  // combined: eps1 log x - eps2 e^{-eps3 (x-1)}
    double eps2 = 0.0;
    double eps3 = 0.0;
    // custom family phi = log_coef log x, F = exp_coef e^{exp_rate (x-1)}
    double log_coef = 0.0;
    double exp_coef = 0.0;
    double exp_rate = 0.0;
};

struct SkodaTriple {
    ScalarFunction phi;
    ScalarFunction F;
    int q = 1;
    Kind kind = Kind::Custom;
    Parameters params;

    /// (eps log x, 0, q)
    static SkodaTriple log(double eps, int q) {
        SkodaTriple t{ScalarFunction::scaled_log(eps), ScalarFunction::zero(), q, Kind::Log, {}};
        t.params.eps = eps;
        return t;
    }
    /// (0, -eta e^{-eps (x-1)}, q); eta = 1/2 is the standard choice.
    static SkodaTriple exp(double eps, int q, double eta = 0.5) {
        SkodaTriple t{ScalarFunction::zero(), ScalarFunction::scaled_exp(-eta, -eps), q, Kind::Exp, {}};
        t.params.eps = eps;
        t.params.eta = eta;
        return t;
    }
    /// (eps1 log x, -eps2 e^{-eps3 (x-1)}, q)
    static SkodaTriple combined(double eps1, double eps2, double eps3, int q) {
        SkodaTriple t{ScalarFunction::scaled_log(eps1), ScalarFunction::scaled_exp(-eps2, -eps3), q, Kind::Combined, {}};
        t.params.eps1 = eps1;
        t.params.eps2 = eps2;
        t.params.eps3 = eps3;
        return t;
    }
    /// (log_coef log x, exp_coef e^{exp_rate (x-1)}, q)
    static SkodaTriple custom(double log_coef, double exp_coef, double exp_rate, int q) {
        SkodaTriple t{ScalarFunction::scaled_log(log_coef), ScalarFunction::scaled_exp(exp_coef, exp_rate), q,
                      Kind::Custom, {}};
        t.params.log_coef = log_coef;
        t.params.exp_coef = exp_coef;
        t.params.exp_rate = exp_rate;
        return t;
    }

    double first_condition(double x) const { return x + F.value(x); }
    double second_condition(double x) const { return (x + F.value(x)) * phi.d1(x) + F.d1(x) + 1.0; }
    double third_condition(double x) const { return (x + F.value(x)) * phi.d2(x) + F.d2(x); }
};

/// n points with x - 1 log-spaced between x_min - 1 and x_max - 1.
inline std::vector<double> log_grid(double x_min, double x_max, std::size_t n) {
    if (!(x_min > 1.0) || !(x_max > x_min)) throw std::invalid_argument("log_grid: need 1 < x_min < x_max");
    if (n < 2) return {x_min};
    std::vector<double> xs(n);
    const double lo = std::log(x_min - 1.0), hi = std::log(x_max - 1.0);
    for (std::size_t k = 0; k < n; ++k)
        xs[k] = 1.0 + std::exp(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1));
    xs.front() = x_min;
    xs.back() = x_max;
    return xs;
}

struct ValidationReport {
    bool valid = true;
    std::size_t points = 0;
    std::optional<double> violation_x;
    std::string violated_condition;  // "x+F>0", "(x+F)phi'+F'+1>0", "(x+F)phi''+F''<0", or a derivative check
    double violation_value = 0.0;
    double max_derivative_error = 0.0;
};

namespace detail {

// Relative error of a finite-difference derivative; absolute near zero.
inline double fd_error(double fd, double exact) {
    return std::abs(fd - exact) / std::max(std::abs(exact), 1e-6);
}

// Step is 1e-5 unless that leaves the domain (1, inf).
inline double fd_step(double x) { return std::min(1e-5, 0.5 * (x - 1.0)); }

inline double check_derivatives(const ScalarFunction& f, double x) {
    const double h = fd_step(x);
    const double d1 = (f.value(x + h) - f.value(x - h)) / (2.0 * h);
    const double d2 = (f.d1(x + h) - f.d1(x - h)) / (2.0 * h);
    return std::max(fd_error(d1, f.d1(x)), fd_error(d2, f.d2(x)));
}

}  // namespace detail

inline constexpr double kDerivativeTolerance = 1e-6;

/// Checks the three defining inequalities on the grid, plus the supplied
/// derivatives against central differences (f' from f, f'' from f').
inline ValidationReport validate(const SkodaTriple& t, double x_min = 1.0 + 1e-6, double x_max = 50.0,
                                 std::size_t grid_points = 10000) {
    ValidationReport r;
    if (t.q < 1) {
        r.valid = false;
        r.violated_condition = "q>=1";
        return r;
    }
    for (double x : log_grid(x_min, x_max, grid_points)) {
        ++r.points;
        auto fail = [&](const char* what, double v) {
            r.valid = false;
            r.violation_x = x;
            r.violated_condition = what;
            r.violation_value = v;
        };
        const double c1 = t.first_condition(x), c2 = t.second_condition(x), c3 = t.third_condition(x);
        if (!(c1 > 0.0)) fail("x+F>0", c1);
        else if (!(c2 > 0.0)) fail("(x+F)phi'+F'+1>0", c2);
        else if (!(c3 < 0.0)) fail("(x+F)phi''+F''<0", c3);
        if (!r.valid) return r;

        const double err = std::max(detail::check_derivatives(t.phi, x), detail::check_derivatives(t.F, x));
        r.max_derivative_error = std::max(r.max_derivative_error, err);
        if (err > kDerivativeTolerance) {
            fail("derivative finite-difference check", err);
            return r;
        }
    }
    return r;
}

struct DerivedWeights {
    double xi = 0.0;
    double a = 0.0;
    double b = 0.0;
    double lambda = 0.0;
    double a_plus_lambda = 0.0;
    double efficiency = 0.0;  // b / (a (b - 1))
    int ell = 1;
};

/// a = x + F, b = (a phi' + F' + 1)/(q a l) + 1,
/// lambda = -(1 + F')^2 / (F'' + (x + F) phi'').
inline DerivedWeights derived(const SkodaTriple& t, int ell, double x) {
    if (!(x > 1.0)) throw std::domain_error("derived: x must exceed 1");
    if (ell < 1) throw std::invalid_argument("derived: l must be positive");
    DerivedWeights w;
    w.xi = x;
    w.ell = ell;
    w.a = x + t.F.value(x);
    const double numer = w.a * t.phi.d1(x) + t.F.d1(x) + 1.0;
    w.b = numer / (static_cast<double>(t.q) * w.a * ell) + 1.0;
    const double denom = t.F.d2(x) + w.a * t.phi.d2(x);
    if (denom == 0.0) throw std::domain_error("derived: (x+F)phi''+F'' vanishes; triple invalid at x");
    const double one_plus_dF = 1.0 + t.F.d1(x);
    w.lambda = -one_plus_dF * one_plus_dF / denom;
    w.a_plus_lambda = w.a + w.lambda;
    w.efficiency = w.b / (w.a * (w.b - 1.0));
    return w;
}

/// D_eps = e^{eps-1}/eps + 2 (1/eps + 1/2)^2.
inline double cor3_constant(double eps) {
    if (!(eps > 0.0)) throw std::domain_error("cor3_constant: eps must be positive");
    const double t = 1.0 / eps + 0.5;
    return std::exp(eps - 1.0) / eps + 2.0 * t * t;
}

/// D_eps e^{eps (x-1)}; bounds a + lambda for the exp triple.
inline double cor3_envelope(double eps, double x) {
    if (!(x > 1.0)) throw std::domain_error("cor3_envelope: x must exceed 1");
    return cor3_constant(eps) * std::exp(eps * (x - 1.0));
}

/// C_eps = (2 + q l) D_eps.
inline double cor3_solution_constant(double eps, int q, int ell) { return (2.0 + q * ell) * cor3_constant(eps); }

/// (q l + eps + 1) / eps, the solution-side constant for the log triple.
inline double cor2_solution_constant(double eps, int q, int ell) { return (q * ell + eps + 1.0) / eps; }

/// Upper bound on b / (a (b - 1)) for the log triple.
inline double cor2_efficiency_bound(double eps, int q, int ell) { return (q * ell + eps + 1.0) / (eps + 1.0); }

}  // namespace koszul::triples

#endif  // KOSZUL_TRIPLES_HPP
