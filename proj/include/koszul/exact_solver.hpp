#ifndef KOSZUL_EXACT_SOLVER_HPP
#define KOSZUL_EXACT_SOLVER_HPP

// Exact solution of sparse linear systems over Q(i) by fraction-free
// (Bareiss) row echelon reduction over the Gaussian integers Z[i].

#include "koszul/gaussian_rational.hpp"

#include <gmpxx.h>

#include <cstddef>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace koszul {

/// Element of Z[i].
struct GaussianInteger {
    mpz_class re{0};
    mpz_class im{0};

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }

    friend GaussianInteger operator*(const GaussianInteger& a, const GaussianInteger& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GaussianInteger operator-(const GaussianInteger& a, const GaussianInteger& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend bool operator==(const GaussianInteger& a, const GaussianInteger& b) { return a.re == b.re && a.im == b.im; }

    /// a / b when b divides a exactly; throws otherwise.
    static GaussianInteger exact_div(const GaussianInteger& a, const GaussianInteger& b) {
        const mpz_class n = b.re * b.re + b.im * b.im;
        if (sgn(n) == 0) throw std::domain_error("exact_div: division by zero");
        const mpz_class re = a.re * b.re + a.im * b.im;
        const mpz_class im = a.im * b.re - a.re * b.im;
        if (!mpz_divisible_p(re.get_mpz_t(), n.get_mpz_t()) || !mpz_divisible_p(im.get_mpz_t(), n.get_mpz_t()))
            throw std::logic_error("exact_div: fraction-free step produced a non-exact quotient");
        GaussianInteger q;
        mpz_divexact(q.re.get_mpz_t(), re.get_mpz_t(), n.get_mpz_t());
        mpz_divexact(q.im.get_mpz_t(), im.get_mpz_t(), n.get_mpz_t());
        return q;
    }

    GaussianRational to_rational() const { return {mpq_class(re), mpq_class(im)}; }
};

/// Sparse system sum_j A_{ij} x_j = b_i over Q(i).
struct ExactSystem {
    std::size_t cols = 0;
    std::vector<std::map<std::size_t, GaussianRational>> rows;
    std::vector<GaussianRational> rhs;

    std::size_t add_row() {
        rows.emplace_back();
        rhs.emplace_back();
        return rows.size() - 1;
    }
};

struct ExactSolution {
    bool consistent = false;
    std::size_t rank = 0;
    std::vector<std::size_t> pivot_columns;  // lexicographically smallest pivot set
    std::vector<std::size_t> free_columns;
    std::vector<GaussianRational> particular;             // free variables set to zero
    std::vector<std::vector<GaussianRational>> nullspace; // one vector per free column
};

/// Fraction-free echelon form, then exact back substitution over Q(i).
/// Pivots are taken greedily left to right, which yields the lexicographically
/// smallest pivot column set; the returned particular solution is the
/// pivot-basic one.
inline ExactSolution solve_exact(const ExactSystem& sys, bool with_nullspace = false) {
    const std::size_t m = sys.rows.size();
    const std::size_t n = sys.cols;
    ExactSolution sol;

    // Dense integer rows [A | b], each row scaled by the lcm of its denominators.
    std::vector<std::vector<GaussianInteger>> M(m, std::vector<GaussianInteger>(n + 1));
    for (std::size_t i = 0; i < m; ++i) {
        mpz_class l = 1;
        auto fold = [&](const GaussianRational& c) {
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.re().get_den_mpz_t());
            mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.im().get_den_mpz_t());
        };
        for (const auto& [j, c] : sys.rows[i]) {
            if (j >= n) throw std::out_of_range("solve_exact: column index out of range");
            fold(c);
        }
        fold(sys.rhs[i]);
        auto to_int = [&](const GaussianRational& c) {
            mpq_class re = c.re() * l, im = c.im() * l;
            return GaussianInteger{re.get_num(), im.get_num()};
        };
        for (const auto& [j, c] : sys.rows[i]) M[i][j] = to_int(c);
        M[i][n] = to_int(sys.rhs[i]);
    }

    GaussianInteger prev{1, 0};
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < m; ++c) {
        std::size_t piv = r;
        while (piv < m && M[piv][c].is_zero()) ++piv;
        if (piv == m) continue;
        std::swap(M[r], M[piv]);
        const GaussianInteger& pv = M[r][c];
        for (std::size_t i = r + 1; i < m; ++i) {
            const GaussianInteger lead = M[i][c];
            const bool lead_zero = lead.is_zero();
            for (std::size_t j = c + 1; j <= n; ++j) {
                const bool below_zero = M[i][j].is_zero();
                if (below_zero && (lead_zero || M[r][j].is_zero())) continue;
                GaussianInteger v = pv * M[i][j];
                if (!lead_zero && !M[r][j].is_zero()) v = v - lead * M[r][j];
                M[i][j] = GaussianInteger::exact_div(v, prev);
            }
            M[i][c] = GaussianInteger{};
        }
        prev = M[r][c];
        sol.pivot_columns.push_back(c);
        ++r;
    }
    sol.rank = r;

    for (std::size_t i = r; i < m; ++i)
        if (!M[i][n].is_zero()) return sol;  // 0 = nonzero: inconsistent
    sol.consistent = true;

    std::vector<bool> is_pivot(n, false);
    for (std::size_t c : sol.pivot_columns) is_pivot[c] = true;
    for (std::size_t c = 0; c < n; ++c)
        if (!is_pivot[c]) sol.free_columns.push_back(c);

    // Back substitution with the given right-hand column (as rationals) and free values.
    auto back_substitute = [&](const std::vector<GaussianRational>& rhs_col, std::vector<GaussianRational> x) {
        for (std::size_t k = r; k-- > 0;) {
            const std::size_t pc = sol.pivot_columns[k];
            GaussianRational acc = rhs_col[k];
            for (std::size_t j = pc + 1; j < n; ++j) {
                if (M[k][j].is_zero() || x[j].is_zero()) continue;
                acc -= M[k][j].to_rational() * x[j];
            }
            x[pc] = acc / M[k][pc].to_rational();
        }
        return x;
    };

    std::vector<GaussianRational> rhs_col(r);
    for (std::size_t k = 0; k < r; ++k) rhs_col[k] = M[k][n].to_rational();
    sol.particular = back_substitute(rhs_col, std::vector<GaussianRational>(n));

    if (with_nullspace) {
        const std::vector<GaussianRational> zero_rhs(r);
        for (std::size_t f : sol.free_columns) {
            std::vector<GaussianRational> x(n);
            x[f] = GaussianRational(1);
            sol.nullspace.push_back(back_substitute(zero_rhs, std::move(x)));
        }
    }
    return sol;
}

}  // namespace koszul

#endif  // KOSZUL_EXACT_SOLVER_HPP
