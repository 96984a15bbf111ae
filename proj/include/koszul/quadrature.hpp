#ifndef KOSZUL_QUADRATURE_HPP
#define KOSZUL_QUADRATURE_HPP

// Uniform sampling of polydiscs and balls in C^n and seeded Monte Carlo
// integration. Sample i draws from its own stream seeded by (seed, i) and
// partial sums are reduced in fixed-size blocks in block order, so the
// estimate is bit-identical for any worker count.

#include "koszul/polynomial.hpp"
#include "koszul/random.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace koszul::quadrature {

class Domain {
public:
    enum class Kind { Polydisc, Ball };

    static Domain polydisc(std::vector<Complex> center, std::vector<double> radii) {
        if (center.empty() || center.size() != radii.size())
            throw DimensionError("polydisc: center and radii must have the same positive length");
        for (double r : radii)
            if (!(r > 0.0)) throw std::invalid_argument("polydisc: radii must be positive");
        Domain d;
        d.kind_ = Kind::Polydisc;
        d.center_ = std::move(center);
        d.radii_ = std::move(radii);
        return d;
    }

    static Domain unit_polydisc(std::size_t n) { return polydisc(std::vector<Complex>(n), std::vector<double>(n, 1.0)); }

    static Domain ball(std::vector<Complex> center, double radius) {
        if (center.empty()) throw DimensionError("ball: empty center");
        if (!(radius > 0.0)) throw std::invalid_argument("ball: radius must be positive");
        Domain d;
        d.kind_ = Kind::Ball;
        d.center_ = std::move(center);
        d.radii_ = {radius};
        return d;
    }

    Kind kind() const { return kind_; }
    std::size_t dim() const { return center_.size(); }
    const std::vector<Complex>& center() const { return center_; }
    const std::vector<double>& radii() const { return radii_; }
    double radius() const { return radii_.front(); }

    /// pi^n prod r_j^2 for a polydisc, pi^n r^{2n} / n! for a ball.
    double volume() const {
        const double n = static_cast<double>(dim());
        if (kind_ == Kind::Polydisc) {
            double v = 1.0;
            for (double r : radii_) v *= std::numbers::pi * r * r;
            return v;
        }
        return std::pow(std::numbers::pi, n) * std::pow(radius(), 2.0 * n) / std::tgamma(n + 1.0);
    }

    bool contains(std::span<const Complex> z) const {
        koszul::detail::require_dim(z.size(), dim(), "Domain::contains");
        if (kind_ == Kind::Polydisc) {
            for (std::size_t j = 0; j < dim(); ++j)
                if (!(std::abs(z[j] - center_[j]) < radii_[j])) return false;
            return true;
        }
        double s = 0.0;
        for (std::size_t j = 0; j < dim(); ++j) s += std::norm(z[j] - center_[j]);
        return s < radius() * radius();
    }

    /// One uniform point (w.r.t. Lebesgue measure).
    template <typename Engine>
    std::vector<Complex> sample(Engine& eng) const {
        std::vector<Complex> z(dim());
        if (kind_ == Kind::Polydisc) {
            for (std::size_t j = 0; j < dim(); ++j) {
                const double r = radii_[j] * std::sqrt(uniform01(eng));
                const double t = 2.0 * std::numbers::pi * uniform01(eng);
                z[j] = center_[j] + std::polar(r, t);
            }
            return z;
        }
        // Gaussian direction in R^{2n}, radius r u^{1/(2n)}.
        std::vector<double> x(2 * dim());
        double norm = 0.0;
        do {
            norm = 0.0;
            for (std::size_t k = 0; k < x.size(); k += 2) {
                const auto [g0, g1] = gaussian_pair(eng);
                x[k] = g0;
                x[k + 1] = g1;
            }
            for (double v : x) norm += v * v;
        } while (norm == 0.0);
        norm = std::sqrt(norm);
        const double rad = radius() * std::pow(uniform01(eng), 1.0 / static_cast<double>(x.size()));
        // Guard the open boundary against rounding.
        const double scale = std::min(rad / norm, std::nextafter(radius(), 0.0) / norm);
        for (std::size_t j = 0; j < dim(); ++j) z[j] = center_[j] + Complex(x[2 * j] * scale, x[2 * j + 1] * scale);
        return z;
    }

private:
    template <typename Engine>
    static std::pair<double, double> gaussian_pair(Engine& eng) {
        double u1 = 0.0;
        while (u1 == 0.0) u1 = uniform01(eng);
        const double u2 = uniform01(eng);
        const double r = std::sqrt(-2.0 * std::log(u1));
        return {r * std::cos(2.0 * std::numbers::pi * u2), r * std::sin(2.0 * std::numbers::pi * u2)};
    }

    Kind kind_ = Kind::Polydisc;
    std::vector<Complex> center_;
    std::vector<double> radii_;
};

/// Point i of the seeded sample sequence.
inline std::vector<Complex> sample_point(const Domain& d, std::uint64_t seed, std::uint64_t index) {
    SplitMix64 eng(stream_seed(seed, index));
    return d.sample(eng);
}

/// Integrand value at a point, or nullopt when the point is excluded
/// (|g|^2 below the singularity cutoff).
using Integrand = std::function<std::optional<double>(std::span<const Complex>)>;

struct IntegralEstimate {
    double mean = 0.0;            // volume * average over accepted samples
    double standard_error = 0.0;  // volume * sample sd / sqrt(accepted)
    std::size_t samples = 0;
    std::size_t rejected = 0;
    double max_integrand = 0.0;

    std::size_t accepted() const { return samples - rejected; }
    double rejected_fraction() const { return samples ? static_cast<double>(rejected) / samples : 0.0; }
};

class AllSamplesRejected : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Options {
    std::size_t samples = 100000;
    std::uint64_t seed = 0;
    unsigned workers = 1;  // 0: hardware concurrency
};

inline constexpr std::size_t kBlockSize = 4096;

namespace detail {

// Welford accumulator; blocks are merged with Chan's update in block order.
struct Partial {
    std::size_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t rejected = 0;
    double max_value = 0.0;

    void push(double v) {
        ++count;
        const double delta = v - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (v - mean);
        max_value = std::max(max_value, std::abs(v));
    }

    void merge(const Partial& o) {
        rejected += o.rejected;
        max_value = std::max(max_value, o.max_value);
        if (o.count == 0) return;
        if (count == 0) {
            count = o.count;
            mean = o.mean;
            m2 = o.m2;
            return;
        }
        const double na = static_cast<double>(count), nb = static_cast<double>(o.count);
        const double delta = o.mean - mean;
        const double n = na + nb;
        mean += delta * nb / n;
        m2 += o.m2 + delta * delta * na * nb / n;
        count += o.count;
    }
};

}  // namespace detail

/// Estimates several integrands on the same sample points in one pass.
inline std::vector<IntegralEstimate> integrate_many(const std::vector<Integrand>& fs, const Domain& d,
                                                    const Options& opt) {
    if (opt.samples < 100) throw std::invalid_argument("integrate: need at least 100 samples");
    const std::size_t blocks = (opt.samples + kBlockSize - 1) / kBlockSize;
    const std::size_t m = fs.size();
    std::vector<std::vector<detail::Partial>> partial(blocks, std::vector<detail::Partial>(m));

    auto run_block = [&](std::size_t blk) {
        const std::size_t begin = blk * kBlockSize, end = std::min(opt.samples, begin + kBlockSize);
        for (std::size_t i = begin; i < end; ++i) {
            const auto z = sample_point(d, opt.seed, i);
            for (std::size_t f = 0; f < m; ++f) {
                auto& pb = partial[blk][f];
                const auto v = fs[f](z);
                if (!v) {
                    ++pb.rejected;
                    continue;
                }
                pb.push(*v);
            }
        }
    };

    unsigned workers = opt.workers ? opt.workers : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, blocks));
    if (workers <= 1) {
        for (std::size_t b = 0; b < blocks; ++b) run_block(b);
    } else {
        std::vector<std::exception_ptr> errors(workers);
        {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back([&, w] {
                    try {
                        for (std::size_t b = w; b < blocks; b += workers) run_block(b);
                    } catch (...) {
                        errors[w] = std::current_exception();
                    }
                });
        }
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    const double vol = d.volume();
    std::vector<IntegralEstimate> out(m);
    for (std::size_t f = 0; f < m; ++f) {
        detail::Partial tot;
        for (std::size_t b = 0; b < blocks; ++b) tot.merge(partial[b][f]);
        auto& e = out[f];
        e.samples = opt.samples;
        e.rejected = tot.rejected;
        e.max_integrand = tot.max_value;
        if (tot.count == 0) throw AllSamplesRejected("integrate: every sample was rejected");
        const double n = static_cast<double>(tot.count);
        const double var = tot.count > 1 ? tot.m2 / (n - 1.0) : 0.0;
        e.mean = vol * tot.mean;
        e.standard_error = vol * std::sqrt(var / n);
    }
    return out;
}

inline IntegralEstimate integrate(const Integrand& f, const Domain& d, const Options& opt) {
    return integrate_many({f}, d, opt).front();
}

}  // namespace koszul::quadrature

#endif  // KOSZUL_QUADRATURE_HPP
