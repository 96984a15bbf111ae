#ifndef KOSZUL_HERMITIAN_HPP
#define KOSZUL_HERMITIAN_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace koszul {

/// Dense n x n complex matrix with H = H^*.
class HermitianMatrix {
public:
    HermitianMatrix() = default;
    explicit HermitianMatrix(Eigen::Index n) : m_(Eigen::MatrixXcd::Zero(n, n)) {}

    /// Accepts m when Hermitian to rel_tol relative to its Frobenius norm,
    /// then replaces it by (m + m^*)/2.
    explicit HermitianMatrix(const Eigen::MatrixXcd& m, double rel_tol = 1e-12) {
        if (m.rows() != m.cols()) throw std::invalid_argument("HermitianMatrix: not square");
        const double scale = m.norm();
        if ((m - m.adjoint()).norm() > rel_tol * std::max(scale, 1e-300))
            throw std::invalid_argument("HermitianMatrix: input is not Hermitian");
        m_ = 0.5 * (m + m.adjoint());
    }

    Eigen::Index size() const { return m_.rows(); }
    const Eigen::MatrixXcd& matrix() const { return m_; }
    std::complex<double> operator()(Eigen::Index r, Eigen::Index c) const { return m_(r, c); }

    /// Eigenvalues in ascending order, by cyclic complex Jacobi rotations.
    std::vector<double> eigenvalues(double tol = 1e-12, int max_sweeps = 100) const {
        Eigen::MatrixXcd a = m_;
        const Eigen::Index n = a.rows();
        const double frob = a.norm();
        for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            double off = 0.0;
            for (Eigen::Index p = 0; p < n; ++p)
                for (Eigen::Index q = p + 1; q < n; ++q) off += std::norm(a(p, q));
            if (std::sqrt(2.0 * off) <= tol * frob) break;
            for (Eigen::Index p = 0; p < n; ++p)
                for (Eigen::Index q = p + 1; q < n; ++q) rotate(a, p, q);
        }
        std::vector<double> ev(static_cast<std::size_t>(n));
        for (Eigen::Index k = 0; k < n; ++k) ev[static_cast<std::size_t>(k)] = a(k, k).real();
        std::sort(ev.begin(), ev.end());
        return ev;
    }

    double min_eigenvalue() const {
        if (size() == 0) return 0.0;
        return eigenvalues().front();
    }

    double spectral_radius() const {
        auto ev = eigenvalues();
        if (ev.empty()) return 0.0;
        return std::max(std::abs(ev.front()), std::abs(ev.back()));
    }

private:
    // Unitary J with J_pp = J_qq = c, J_pq = s e^{i phi}, J_qp = -s e^{-i phi}
    // where a_pq = |a_pq| e^{i phi}; a <- J^* a J zeroes a_pq.
    static void rotate(Eigen::MatrixXcd& a, Eigen::Index p, Eigen::Index q) {
        const std::complex<double> apq = a(p, q);
        const double r = std::abs(apq);
        if (r == 0.0) return;
        const std::complex<double> phase = apq / r;
        const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * r);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const std::complex<double> jpq = s * phase, jqp = -s * std::conj(phase);
        const Eigen::Index n = a.rows();
        for (Eigen::Index k = 0; k < n; ++k) {
            const std::complex<double> akp = a(k, p), akq = a(k, q);
            a(k, p) = akp * c + akq * jqp;
            a(k, q) = akp * jpq + akq * c;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
            const std::complex<double> apk = a(p, k), aqk = a(q, k);
            a(p, k) = c * apk + std::conj(jqp) * aqk;
            a(q, k) = std::conj(jpq) * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();
    }

    Eigen::MatrixXcd m_;
};

}  // namespace koszul

#endif  // KOSZUL_HERMITIAN_HPP
