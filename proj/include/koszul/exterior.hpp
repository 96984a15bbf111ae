#ifndef KOSZUL_EXTERIOR_HPP
#define KOSZUL_EXTERIOR_HPP

// Skew-symmetric coefficient arrays over p generators: the terms of the
// Koszul complex, the contraction iota_g and the conjugate wedge.
//
// Elements are stored sparsely under strictly increasing multi-indices.
// Arbitrary index tuples are reached by sorting and applying the
// permutation parity, so the implicit full tensor is skew by construction.
// Indices are 0-based in code and 1-based in every serialized form.

#include "koszul/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <compare>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace koszul {

/// Strictly increasing tuple of generator indices.
class MultiIndex {
public:
    MultiIndex() = default;
    MultiIndex(std::initializer_list<unsigned> idx) : MultiIndex(std::vector<unsigned>(idx)) {}
    explicit MultiIndex(std::vector<unsigned> idx) : idx_(std::move(idx)) {
        for (std::size_t k = 1; k < idx_.size(); ++k)
            if (idx_[k - 1] >= idx_[k]) throw std::invalid_argument("MultiIndex must be strictly increasing");
    }

    /// Sorts an arbitrary tuple. Returns the sorted index and the parity sign
    /// (+1/-1), or nullopt when an index repeats (the skew component is zero).
    static std::optional<std::pair<MultiIndex, int>> canonicalize(std::vector<unsigned> tuple) {
        int sign = 1;
        for (std::size_t i = 1; i < tuple.size(); ++i)
            for (std::size_t j = i; j > 0 && tuple[j - 1] >= tuple[j]; --j) {
                if (tuple[j - 1] == tuple[j]) return std::nullopt;
                std::swap(tuple[j - 1], tuple[j]);
                sign = -sign;
            }
        MultiIndex m;
        m.idx_ = std::move(tuple);
        return std::make_pair(std::move(m), sign);
    }

    std::size_t degree() const { return idx_.size(); }
    unsigned operator[](std::size_t k) const { return idx_[k]; }
    const std::vector<unsigned>& indices() const { return idx_; }
    auto begin() const { return idx_.begin(); }
    auto end() const { return idx_.end(); }

    bool contains(unsigned i) const { return std::binary_search(idx_.begin(), idx_.end(), i); }

    MultiIndex without(std::size_t position) const {
        MultiIndex m;
        m.idx_.reserve(idx_.size() - 1);
        for (std::size_t k = 0; k < idx_.size(); ++k)
            if (k != position) m.idx_.push_back(idx_[k]);
        return m;
    }

    /// Inserts i (not present); returns the new index and i's position in it.
    std::pair<MultiIndex, std::size_t> with(unsigned i) const {
        MultiIndex m;
        auto pos = static_cast<std::size_t>(std::lower_bound(idx_.begin(), idx_.end(), i) - idx_.begin());
        m.idx_ = idx_;
        m.idx_.insert(m.idx_.begin() + static_cast<std::ptrdiff_t>(pos), i);
        return {std::move(m), pos};
    }

    friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

private:
    std::vector<unsigned> idx_;
};

/// All strictly increasing tuples of length d with entries in [0, p), lexicographic order.
inline std::vector<MultiIndex> all_multi_indices(std::size_t p, std::size_t d) {
    std::vector<MultiIndex> out;
    if (d > p) return out;
    std::vector<unsigned> cur(d);
    for (std::size_t k = 0; k < d; ++k) cur[k] = static_cast<unsigned>(k);
    while (true) {
        out.emplace_back(cur);
        std::size_t k = d;
        while (k > 0 && cur[k - 1] == p - d + k - 1) --k;
        if (k == 0) break;
        ++cur[k - 1];
        for (std::size_t j = k; j < d; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

namespace detail {
inline bool scalar_is_zero(const Complex& c) { return c == Complex(0.0); }
inline bool scalar_is_zero(const GaussianRational& c) { return c.is_zero(); }
inline bool scalar_is_zero(const Polynomial& c) { return c.is_zero(); }

template <typename S>
S negate(const S& s) {
    return -s;
}
}  // namespace detail

template <typename S>
concept KoszulScalar = requires(S a, const S& b) {
    { a + b } -> std::convertible_to<S>;
    { a - b } -> std::convertible_to<S>;
    { a * b } -> std::convertible_to<S>;
    { -a } -> std::convertible_to<S>;
    { detail::scalar_is_zero(b) } -> std::same_as<bool>;
};

/// Element of the degree-d term over p generators with coefficients in S.
template <KoszulScalar S>
class KoszulElement {
public:
    using Coefficients = std::map<MultiIndex, S>;

    KoszulElement() = default;
    KoszulElement(std::size_t p, std::size_t degree) : p_(p), degree_(degree) {}

    /// Degree-0 element holding one scalar.
    static KoszulElement scalar(std::size_t p, S value) {
        KoszulElement e(p, 0);
        e.set(MultiIndex{}, std::move(value));
        return e;
    }

    /// Degree-1 element from a vector of p components.
    static KoszulElement vector(std::span<const S> components) {
        KoszulElement e(components.size(), 1);
        for (std::size_t i = 0; i < components.size(); ++i) e.set(MultiIndex{static_cast<unsigned>(i)}, components[i]);
        return e;
    }

    std::size_t generators() const { return p_; }
    std::size_t degree() const { return degree_; }
    const Coefficients& entries() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }

    void set(const MultiIndex& key, S value) {
        validate(key);
        if (detail::scalar_is_zero(value)) coeffs_.erase(key);
        else coeffs_.insert_or_assign(key, std::move(value));
    }

    void add(const MultiIndex& key, const S& value) {
        validate(key);
        auto it = coeffs_.find(key);
        if (it == coeffs_.end()) {
            if (!detail::scalar_is_zero(value)) coeffs_.emplace(key, value);
            return;
        }
        it->second = it->second + value;
        if (detail::scalar_is_zero(it->second)) coeffs_.erase(it);
    }

    /// Coefficient under a canonical key; zero when absent.
    S get(const MultiIndex& key) const {
        auto it = coeffs_.find(key);
        return it == coeffs_.end() ? S{} : it->second;
    }

    /// Component of the full skew tensor at an arbitrary tuple.
    S at(std::vector<unsigned> tuple) const {
        if (tuple.size() != degree_) throw DimensionError("KoszulElement::at: tuple length != degree");
        auto canon = MultiIndex::canonicalize(std::move(tuple));
        if (!canon) return S{};
        S v = get(canon->first);
        return canon->second > 0 ? v : detail::negate(v);
    }

    template <typename F>
    auto transform(F&& f) const {
        using R = std::decay_t<decltype(f(std::declval<const S&>()))>;
        KoszulElement<R> out(p_, degree_);
        for (const auto& [k, v] : coeffs_) out.set(k, f(v));
        return out;
    }

    KoszulElement& operator+=(const KoszulElement& o) {
        require_same_shape(o);
        for (const auto& [k, v] : o.coeffs_) add(k, v);
        return *this;
    }
    KoszulElement& operator-=(const KoszulElement& o) {
        require_same_shape(o);
        for (const auto& [k, v] : o.coeffs_) add(k, -v);
        return *this;
    }
    friend KoszulElement operator+(KoszulElement a, const KoszulElement& b) { return a += b; }
    friend KoszulElement operator-(KoszulElement a, const KoszulElement& b) { return a -= b; }

    friend KoszulElement operator*(const S& s, const KoszulElement& e) {
        KoszulElement out(e.p_, e.degree_);
        for (const auto& [k, v] : e.coeffs_) out.set(k, s * v);
        return out;
    }

    friend bool operator==(const KoszulElement& a, const KoszulElement& b) {
        return a.p_ == b.p_ && a.degree_ == b.degree_ && a.coeffs_ == b.coeffs_;
    }

private:
    void validate(const MultiIndex& key) const {
        if (key.degree() != degree_) throw DimensionError("KoszulElement: key length != degree");
        if (degree_ > 0 && key[degree_ - 1] >= p_) throw DimensionError("KoszulElement: index exceeds generator count");
    }
    void require_same_shape(const KoszulElement& o) const {
        if (o.p_ != p_ || o.degree_ != degree_) throw DimensionError("KoszulElement: shape mismatch");
    }

    std::size_t p_ = 0;
    std::size_t degree_ = 0;
    Coefficients coeffs_;
};

/// Array c_{i_1..i_d alpha}: skew in the generator indices, free in alpha < n.
/// Stored per canonical key as a length-n vector.
struct SkewVectorArray {
    std::size_t p = 0;
    std::size_t degree = 0;
    std::size_t n = 0;
    std::map<MultiIndex, std::vector<Complex>> entries;

    /// c_{i I alpha} with i prepended to the tuple I; zero on repeated indices.
    Complex at(unsigned i, const MultiIndex& base, std::size_t alpha) const {
        std::vector<unsigned> tuple;
        tuple.reserve(base.degree() + 1);
        tuple.push_back(i);
        tuple.insert(tuple.end(), base.begin(), base.end());
        auto canon = MultiIndex::canonicalize(std::move(tuple));
        if (!canon) return 0.0;
        auto it = entries.find(canon->first);
        if (it == entries.end()) return 0.0;
        return static_cast<double>(canon->second) * it->second[alpha];
    }

    void validate() const {
        for (const auto& [k, v] : entries) {
            if (k.degree() != degree || (degree > 0 && k[degree - 1] >= p))
                throw DimensionError("SkewVectorArray: bad key");
            if (v.size() != n) throw DimensionError("SkewVectorArray: vectors must have length n");
        }
    }
};

using ComplexElement = KoszulElement<Complex>;
using PolynomialElement = KoszulElement<Polynomial>;

/// iota_g v: (iota_g v)_{I} = sum_i g_i v_{i I}.
template <KoszulScalar S>
KoszulElement<S> contract(std::span<const S> g, const KoszulElement<S>& v) {
    if (g.size() != v.generators()) throw DimensionError("contract: g length != generator count");
    if (v.degree() == 0) throw std::invalid_argument("contract: degree-0 element has no contraction");
    KoszulElement<S> out(v.generators(), v.degree() - 1);
    for (const auto& [key, coeff] : v.entries()) {
        for (std::size_t s = 0; s < key.degree(); ++s) {
            // Moving key[s] to the front costs s transpositions.
            S term = g[key[s]] * coeff;
            out.add(key.without(s), (s % 2 == 0) ? term : detail::negate(term));
        }
    }
    return out;
}

template <KoszulScalar S>
KoszulElement<S> contract(const std::vector<S>& g, const KoszulElement<S>& v) {
    return contract(std::span<const S>(g), v);
}

/// w ^ h for a degree-1 vector w given by components:
/// (w ^ h)_{J} = sum_s (-1)^s w_{J[s]} h_{J without s}, s 0-based.
template <KoszulScalar S>
KoszulElement<S> wedge(std::span<const S> w, const KoszulElement<S>& h) {
    if (w.size() != h.generators()) throw DimensionError("wedge: vector length != generator count");
    if (h.degree() + 1 > h.generators()) throw std::invalid_argument("wedge: degree overflow");
    KoszulElement<S> out(h.generators(), h.degree() + 1);
    for (const auto& [key, coeff] : h.entries()) {
        for (unsigned i = 0; i < h.generators(); ++i) {
            if (key.contains(i)) continue;
            auto [target, pos] = key.with(i);
            S term = w[i] * coeff;
            out.add(target, (pos % 2 == 0) ? term : detail::negate(term));
        }
    }
    return out;
}

/// conj(g) ^ h at a point; g_values are the plain values g_i(z).
inline ComplexElement wedge_conj(std::span<const Complex> g_values, const ComplexElement& h) {
    std::vector<Complex> gbar(g_values.begin(), g_values.end());
    for (auto& c : gbar) c = std::conj(c);
    return wedge(std::span<const Complex>(gbar), h);
}
inline ComplexElement wedge_conj(const std::vector<Complex>& g_values, const ComplexElement& h) {
    return wedge_conj(std::span<const Complex>(g_values), h);
}

/// (1/d!) sum over full tuples |w|^2, i.e. the sum over canonical keys.
inline double norm_sq(const ComplexElement& w) {
    double s = 0.0;
    for (const auto& [k, v] : w.entries()) s += std::norm(v);
    return s;
}

/// Hermitian pairing with the same 1/d! normalization.
inline Complex inner(const ComplexElement& u, const ComplexElement& v) {
    Complex s = 0.0;
    for (const auto& [k, a] : u.entries()) {
        auto it = v.entries().find(k);
        if (it != v.entries().end()) s += a * std::conj(it->second);
    }
    return s;
}

inline double squared_norm(std::span<const Complex> g) {
    double s = 0.0;
    for (const auto& c : g) s += std::norm(c);
    return s;
}

inline ComplexElement evaluate(const PolynomialElement& e, std::span<const Complex> z) {
    return e.transform([&](const Polynomial& q) { return q.eval(z); });
}

inline KoszulElement<GaussianRational> evaluate(const PolynomialElement& e, std::span<const GaussianRational> z) {
    return e.transform([&](const Polynomial& q) { return q.eval(z); });
}

inline std::vector<Complex> evaluate(std::span<const Polynomial> g, std::span<const Complex> z) {
    std::vector<Complex> out;
    out.reserve(g.size());
    for (const auto& q : g) out.push_back(q.eval(z));
    return out;
}

/// Largest total degree among the coefficients; -1 for the zero element.
inline int degree(const PolynomialElement& e) {
    int d = -1;
    for (const auto& [k, q] : e.entries()) d = std::max(d, q.degree());
    return d;
}

}  // namespace koszul

#endif  // KOSZUL_EXTERIOR_HPP
