#ifndef KOSZUL_POLYNOMIAL_HPP
#define KOSZUL_POLYNOMIAL_HPP

#include "koszul/gaussian_rational.hpp"

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace koszul {

using Complex = std::complex<double>;
using Monomial = std::vector<unsigned>;

inline unsigned total_degree(const Monomial& m) { return std::accumulate(m.begin(), m.end(), 0u); }

inline Monomial add_exponents(const Monomial& a, const Monomial& b) {
    Monomial r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline void require_dim(std::size_t got, std::size_t want, const char* what) {
    if (got != want)
        throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(want) + ", got " +
                             std::to_string(got));
}

template <typename T>
T int_pow(const T& base, unsigned e) {
    T result(1);
    T b = base;
    while (e) {
        if (e & 1u) result *= b;
        e >>= 1u;
        if (e) b *= b;
    }
    return result;
}

// Per-variable power tables up to the largest exponent used.
template <typename T>
std::vector<std::vector<T>> power_table(std::span<const T> z, const std::vector<unsigned>& max_exp) {
    std::vector<std::vector<T>> table(z.size());
    for (std::size_t v = 0; v < z.size(); ++v) {
        table[v].reserve(max_exp[v] + 1);
        table[v].push_back(T(1));
        for (unsigned e = 1; e <= max_exp[v]; ++e) table[v].push_back(table[v].back() * z[v]);
    }
    return table;
}

}  // namespace detail

/// Sparse polynomial in z_1..z_n with Gaussian-rational coefficients.
/// Zero coefficients are never stored.
class Polynomial {
public:
    using Terms = std::map<Monomial, GaussianRational>;

    Polynomial() = default;
    explicit Polynomial(std::size_t n) : n_(n) {}

    static Polynomial constant(std::size_t n, const GaussianRational& c) {
        Polynomial p(n);
        p.add_term(Monomial(n, 0), c);
        return p;
    }

    /// z_{var+1}; variables are 0-based in code.
    static Polynomial variable(std::size_t n, std::size_t var) {
        if (var >= n) throw DimensionError("Polynomial::variable: index out of range");
        Monomial m(n, 0);
        m[var] = 1;
        Polynomial p(n);
        p.add_term(std::move(m), GaussianRational(1));
        return p;
    }

    static Polynomial monomial(Monomial m, const GaussianRational& c) {
        Polynomial p(m.size());
        p.add_term(std::move(m), c);
        return p;
    }

    std::size_t num_vars() const { return n_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(Monomial m, const GaussianRational& c) {
        detail::require_dim(m.size(), n_, "Polynomial::add_term");
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(std::move(m), c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    /// Total degree; -1 for the zero polynomial.
    int degree() const {
        int d = -1;
        for (const auto& [m, c] : terms_) d = std::max(d, static_cast<int>(total_degree(m)));
        return d;
    }

    GaussianRational coefficient(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? GaussianRational() : it->second;
    }

    Polynomial& operator+=(const Polynomial& o) {
        adopt_dim(o);
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        adopt_dim(o);
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    Polynomial& operator*=(const GaussianRational& s) {
        if (s.is_zero()) {
            terms_.clear();
            return *this;
        }
        for (auto& [m, c] : terms_) c *= s;
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator-(Polynomial a) {
        for (auto& [m, c] : a.terms_) c = -c;
        return a;
    }
    friend Polynomial operator*(Polynomial a, const GaussianRational& s) { return a *= s; }
    friend Polynomial operator*(const GaussianRational& s, Polynomial a) { return a *= s; }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        Polynomial r(a.n_ ? a.n_ : b.n_);
        if (a.is_zero() || b.is_zero()) return r;
        detail::require_dim(b.n_, a.n_, "Polynomial product");
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) r.add_term(add_exponents(ma, mb), ca * cb);
        return r;
    }
    Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }
    friend bool operator!=(const Polynomial& a, const Polynomial& b) { return !(a == b); }

    /// Exact evaluation at a Gaussian-rational point.
    GaussianRational eval(std::span<const GaussianRational> z) const { return eval_impl<GaussianRational>(z); }
    GaussianRational eval(const std::vector<GaussianRational>& z) const {
        return eval(std::span<const GaussianRational>(z));
    }

    /// Floating evaluation.
    Complex eval(std::span<const Complex> z) const { return eval_impl<Complex>(z); }
    Complex eval(const std::vector<Complex>& z) const { return eval(std::span<const Complex>(z)); }

    /// Holomorphic Wirtinger derivative d/dz_var (0-based).
    Polynomial wirtinger(std::size_t var) const {
        if (var >= n_) throw DimensionError("wirtinger: variable index out of range");
        Polynomial r(n_);
        for (const auto& [m, c] : terms_) {
            if (m[var] == 0) continue;
            Monomial dm = m;
            --dm[var];
            r.add_term(std::move(dm), c * GaussianRational(static_cast<long>(m[var])));
        }
        return r;
    }

    /// Polynomial whose coefficients are conjugated; conj(q(conj z)) as a function.
    Polynomial conj_coefficients() const {
        Polynomial r(n_);
        for (const auto& [m, c] : terms_) r.terms_.emplace(m, c.conj());
        return r;
    }

private:
    void adopt_dim(const Polynomial& o) {
        if (n_ == 0 && terms_.empty()) n_ = o.n_;
        else if (!o.terms_.empty()) detail::require_dim(o.n_, n_, "Polynomial sum");
    }

    template <typename T>
    T eval_impl(std::span<const T> z) const {
        detail::require_dim(z.size(), n_, "Polynomial::eval");
        std::vector<unsigned> max_exp(n_, 0);
        for (const auto& [m, c] : terms_)
            for (std::size_t v = 0; v < n_; ++v) max_exp[v] = std::max(max_exp[v], m[v]);
        auto table = detail::power_table<T>(z, max_exp);
        T sum(0);
        for (const auto& [m, c] : terms_) {
            T term = coeff_as<T>(c);
            for (std::size_t v = 0; v < n_; ++v)
                if (m[v]) term *= table[v][m[v]];
            sum += term;
        }
        return sum;
    }

    template <typename T>
    static T coeff_as(const GaussianRational& c) {
        if constexpr (std::is_same_v<T, Complex>) return c.to_complex();
        else return c;
    }

    std::size_t n_ = 0;
    Terms terms_;
};

/// Float image of a Polynomial for repeated evaluation (quadrature inner loops).
class NumericPolynomial {
public:
    NumericPolynomial() = default;
    explicit NumericPolynomial(const Polynomial& q) : n_(q.num_vars()), max_exp_(q.num_vars(), 0) {
        for (const auto& [m, c] : q.terms()) {
            terms_.push_back({c.to_complex(), m});
            for (std::size_t v = 0; v < n_; ++v) max_exp_[v] = std::max(max_exp_[v], m[v]);
        }
    }

    std::size_t num_vars() const { return n_; }

    Complex operator()(std::span<const Complex> z) const {
        detail::require_dim(z.size(), n_, "NumericPolynomial");
        auto table = detail::power_table<Complex>(z, max_exp_);
        Complex sum = 0;
        for (const auto& t : terms_) {
            Complex term = t.coeff;
            for (std::size_t v = 0; v < n_; ++v)
                if (t.exp[v]) term *= table[v][t.exp[v]];
            sum += term;
        }
        return sum;
    }

private:
    struct Term {
        Complex coeff;
        Monomial exp;
    };
    std::size_t n_ = 0;
    std::vector<unsigned> max_exp_;
    std::vector<Term> terms_;
};

/// Real-valued polynomial in (z, conj z): sum of c_{AB} z^A conj(z)^B with c_{AB} = conj(c_{BA}).
class HermitianPolynomial {
public:
    using Key = std::pair<Monomial, Monomial>;
    using Terms = std::map<Key, GaussianRational>;

    HermitianPolynomial() = default;
    explicit HermitianPolynomial(std::size_t n) : n_(n) {}

    /// c * |z|^2 = c * sum_a z_a conj(z_a) with real c.
    static HermitianPolynomial scaled_norm_sq(std::size_t n, const mpq_class& c) {
        HermitianPolynomial h(n);
        for (std::size_t a = 0; a < n; ++a) {
            Monomial m(n, 0);
            m[a] = 1;
            h.add_term(m, m, GaussianRational(c));
        }
        return h;
    }

    std::size_t num_vars() const { return n_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    void add_term(Monomial hol, Monomial anti, const GaussianRational& c) {
        detail::require_dim(hol.size(), n_, "HermitianPolynomial::add_term");
        detail::require_dim(anti.size(), n_, "HermitianPolynomial::add_term");
        if (c.is_zero()) return;
        auto [it, inserted] = terms_.try_emplace(Key{std::move(hol), std::move(anti)}, c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    bool is_hermitian() const {
        for (const auto& [k, c] : terms_) {
            auto it = terms_.find(Key{k.second, k.first});
            if (it == terms_.end() || it->second != c.conj()) return false;
        }
        return true;
    }

    HermitianPolynomial d_hol(std::size_t var) const { return differentiate(var, true); }
    HermitianPolynomial d_anti(std::size_t var) const { return differentiate(var, false); }

    /// Complex value; real for Hermitian-symmetric input.
    Complex eval_complex(std::span<const Complex> z) const {
        detail::require_dim(z.size(), n_, "HermitianPolynomial::eval");
        Complex sum = 0;
        for (const auto& [k, c] : terms_) {
            Complex term = c.to_complex();
            for (std::size_t v = 0; v < n_; ++v) {
                if (k.first[v]) term *= detail::int_pow(z[v], k.first[v]);
                if (k.second[v]) term *= detail::int_pow(std::conj(z[v]), k.second[v]);
            }
            sum += term;
        }
        return sum;
    }

    double eval(std::span<const Complex> z) const { return eval_complex(z).real(); }

private:
    HermitianPolynomial differentiate(std::size_t var, bool holomorphic) const {
        if (var >= n_) throw DimensionError("HermitianPolynomial: variable index out of range");
        HermitianPolynomial r(n_);
        for (const auto& [k, c] : terms_) {
            const Monomial& slot = holomorphic ? k.first : k.second;
            if (slot[var] == 0) continue;
            Key dk = k;
            Monomial& dslot = holomorphic ? dk.first : dk.second;
            --dslot[var];
            r.add_term(std::move(dk.first), std::move(dk.second), c * GaussianRational(static_cast<long>(slot[var])));
        }
        return r;
    }

    std::size_t n_ = 0;
    Terms terms_;
};

}  // namespace koszul

#endif  // KOSZUL_POLYNOMIAL_HPP
