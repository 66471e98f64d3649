#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "lamptf/error.hpp"

namespace lamptf {

/// Shape-preserving piecewise-cubic interpolant (Fritsch-Carlson derivatives),
/// the same construction scipy calls pchip. C1, never overshoots monotone data.
class MonotoneCubic {
  public:
    MonotoneCubic(std::span<const double> x, std::span<const double> y) {
        if (x.size() != y.size()) throw DomainError("MonotoneCubic: size mismatch");
        if (x.size() < 2) throw DomainError("MonotoneCubic: need at least 2 points");
        for (std::size_t i = 1; i < x.size(); ++i)
            if (!(x[i] > x[i - 1])) throw DomainError("MonotoneCubic: abscissae must be strictly increasing");
        x_.assign(x.begin(), x.end());
        y_.assign(y.begin(), y.end());
        build();
    }

    double operator()(double x) const { return eval(x); }

    double eval(double x) const {
        const std::size_t i = segment(x);
        const double h = x_[i + 1] - x_[i];
        const double t = (x - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1;
        const double h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2;
        const double h11 = t3 - t2;
        return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
    }

    double x_front() const { return x_.front(); }
    double x_back() const { return x_.back(); }

  private:
    std::size_t segment(double x) const {
        if (x < x_.front() || x > x_.back()) throw DomainError("MonotoneCubic: evaluation outside data span");
        auto it = std::upper_bound(x_.begin(), x_.end(), x);
        std::size_t i = static_cast<std::size_t>(it - x_.begin());
        if (i > 0) --i;
        if (i >= x_.size() - 1) i = x_.size() - 2;
        return i;
    }

    void build() {
        const std::size_t n = x_.size();
        std::vector<double> h(n - 1), slope(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            slope[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        d_.assign(n, 0.0);
        if (n == 2) {
            d_[0] = d_[1] = slope[0];
            return;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (slope[i - 1] == 0.0 || slope[i] == 0.0 || (slope[i - 1] > 0) != (slope[i] > 0)) {
                d_[i] = 0.0;
            } else {
                const double w1 = 2 * h[i] + h[i - 1];
                const double w2 = h[i] + 2 * h[i - 1];
                d_[i] = (w1 + w2) / (w1 / slope[i - 1] + w2 / slope[i]);
            }
        }
        d_[0] = edge(h[0], h[1], slope[0], slope[1]);
        d_[n - 1] = edge(h[n - 2], h[n - 3], slope[n - 2], slope[n - 3]);
    }

    // One-sided three-point estimate, limited as in Fritsch-Butland.
    static double edge(double h0, double h1, double s0, double s1) {
        double d = ((2 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
        if (d * s0 <= 0.0)
            d = 0.0;
        else if (s0 * s1 < 0.0 && std::abs(d) > 3.0 * std::abs(s0))
            d = 3.0 * s0;
        return d;
    }

    std::vector<double> x_, y_, d_;
};

} // namespace lamptf
