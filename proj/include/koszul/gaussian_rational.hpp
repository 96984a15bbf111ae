#ifndef KOSZUL_GAUSSIAN_RATIONAL_HPP
#define KOSZUL_GAUSSIAN_RATIONAL_HPP

#include <gmpxx.h>

#include <complex>
#include <ostream>
#include <stdexcept>
#include <string>

namespace koszul {

/// Exact element of Q(i): re + im * i with arbitrary precision rationals.
class GaussianRational {
public:
    GaussianRational() = default;
    GaussianRational(long re) : re_(re) {}  // NOLINT(google-explicit-constructor)
    GaussianRational(mpq_class re, mpq_class im = 0) : re_(std::move(re)), im_(std::move(im)) {
        re_.canonicalize();
        im_.canonicalize();
    }

    /// Exact conversion of a binary floating point value (no rounding).
    static GaussianRational from_double(std::complex<double> z) {
        return {mpq_class(z.real()), mpq_class(z.imag())};
    }

    /// Parses "p/q" or "p" for each part.
    static GaussianRational from_strings(const std::string& re, const std::string& im) {
        return {parse_rational(re), parse_rational(im)};
    }

    static mpq_class parse_rational(const std::string& text) {
        mpq_class value;
        if (text.empty() || value.set_str(text, 10) != 0)
            throw std::invalid_argument("malformed rational '" + text + "'");
        if (text.find('/') != std::string::npos && value.get_den() == 0)
            throw std::invalid_argument("zero denominator in '" + text + "'");
        value.canonicalize();
        return value;
    }

    const mpq_class& re() const { return re_; }
    const mpq_class& im() const { return im_; }

    bool is_zero() const { return sgn(re_) == 0 && sgn(im_) == 0; }

    GaussianRational conj() const { return {re_, -im_}; }
    mpq_class norm() const { return re_ * re_ + im_ * im_; }

    std::complex<double> to_complex() const { return {re_.get_d(), im_.get_d()}; }

    GaussianRational& operator+=(const GaussianRational& o) {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    GaussianRational& operator-=(const GaussianRational& o) {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    GaussianRational& operator*=(const GaussianRational& o) {
        mpq_class r = re_ * o.re_ - im_ * o.im_;
        mpq_class i = re_ * o.im_ + im_ * o.re_;
        re_ = std::move(r);
        im_ = std::move(i);
        return *this;
    }
    GaussianRational& operator/=(const GaussianRational& o) {
        if (o.is_zero()) throw std::domain_error("division by zero in Q(i)");
        mpq_class d = o.norm();
        GaussianRational num = *this * o.conj();
        re_ = num.re_ / d;
        im_ = num.im_ / d;
        return *this;
    }

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
    friend GaussianRational operator-(const GaussianRational& a) { return {-a.re_, -a.im_}; }

    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

    std::string re_string() const { return re_.get_str(); }
    std::string im_string() const { return im_.get_str(); }

    friend std::ostream& operator<<(std::ostream& os, const GaussianRational& z) {
        os << z.re_;
        if (sgn(z.im_) != 0) os << (sgn(z.im_) > 0 ? "+" : "") << z.im_ << "i";
        return os;
    }

private:
    mpq_class re_{0};
    mpq_class im_{0};
};

inline GaussianRational conj(const GaussianRational& z) { return z.conj(); }

inline const GaussianRational kImaginaryUnit{mpq_class(0), mpq_class(1)};

}  // namespace koszul

#endif  // KOSZUL_GAUSSIAN_RATIONAL_HPP
