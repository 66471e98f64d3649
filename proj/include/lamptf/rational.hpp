#pragma once

#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "lamptf/error.hpp"

namespace lamptf {

/// Exact fraction over int64, always kept normalized (gcd 1, positive denominator).
/// Big enough for every exact identity this library certifies; multiplication
/// checks for overflow and throws rather than wrapping.
class Rational {
  public:
    constexpr Rational() : num_(0), den_(1) {}
    Rational(std::int64_t n) : num_(n), den_(1) {}
    Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) {
        if (den_ == 0) throw DomainError("Rational: zero denominator");
        normalize();
    }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    bool is_integer() const { return den_ == 1; }
    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    Rational operator-() const { return Rational(-num_, den_); }

    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(checked_add(checked_mul(a.num_, b.den_), checked_mul(b.num_, a.den_)),
                        checked_mul(a.den_, b.den_));
    }
    friend Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return Rational(checked_mul(a.num_, b.num_), checked_mul(a.den_, b.den_));
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw DomainError("Rational: division by zero");
        return Rational(checked_mul(a.num_, b.den_), checked_mul(a.den_, b.num_));
    }

    Rational& operator+=(const Rational& b) { return *this = *this + b; }
    Rational& operator-=(const Rational& b) { return *this = *this - b; }
    Rational& operator*=(const Rational& b) { return *this = *this * b; }
    Rational& operator/=(const Rational& b) { return *this = *this / b; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return checked_mul(a.num_, b.den_) < checked_mul(b.num_, a.den_);
    }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

  private:
    static std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
        std::int64_t r;
        if (__builtin_mul_overflow(a, b, &r)) throw DomainError("Rational: multiplication overflow");
        return r;
    }
    static std::int64_t checked_add(std::int64_t a, std::int64_t b) {
        std::int64_t r;
        if (__builtin_add_overflow(a, b, &r)) throw DomainError("Rational: addition overflow");
        return r;
    }

    void normalize() {
        if (den_ < 0) {
            num_ = -num_;
            den_ = -den_;
        }
        std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) {
            num_ /= g;
            den_ /= g;
        }
        if (num_ == 0) den_ = 1;
    }

    std::int64_t num_;
    std::int64_t den_;
};

inline Rational rat_pow(Rational base, unsigned k) {
    Rational r(1);
    while (k--) r *= base;
    return r;
}

/// Polynomial with Rational coefficients, coefficient i multiplying u^i.
/// Used for the exact symbolic manipulations behind the integrability condition.
class RatPoly {
  public:
    RatPoly() = default;
    RatPoly(std::initializer_list<Rational> cs) : c_(cs) { trim(); }
    explicit RatPoly(std::vector<Rational> cs) : c_(std::move(cs)) { trim(); }

    std::size_t degree() const { return c_.empty() ? 0 : c_.size() - 1; }
    Rational coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }
    bool is_zero() const { return c_.empty(); }

    friend RatPoly operator+(const RatPoly& a, const RatPoly& b) {
        std::vector<Rational> r(std::max(a.c_.size(), b.c_.size()));
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(i) + b.coeff(i);
        return RatPoly(std::move(r));
    }
    friend RatPoly operator*(const RatPoly& a, const RatPoly& b) {
        if (a.c_.empty() || b.c_.empty()) return RatPoly();
        std::vector<Rational> r(a.c_.size() + b.c_.size() - 1, Rational(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return RatPoly(std::move(r));
    }
    friend RatPoly operator*(const Rational& s, const RatPoly& a) {
        std::vector<Rational> r(a.c_);
        for (auto& x : r) x *= s;
        return RatPoly(std::move(r));
    }

    /// Divide by u; requires a vanishing constant term.
    RatPoly shifted_down() const {
        if (!c_.empty() && coeff(0) != Rational(0))
            throw DomainError("RatPoly: not divisible by u");
        if (c_.size() <= 1) return RatPoly();
        return RatPoly(std::vector<Rational>(c_.begin() + 1, c_.end()));
    }

    /// d/du.
    RatPoly derivative_u() const {
        if (c_.size() <= 1) return RatPoly();
        std::vector<Rational> r(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = Rational(static_cast<std::int64_t>(i)) * c_[i];
        return RatPoly(std::move(r));
    }

    double eval(double u) const {
        double acc = 0.0;
        for (std::size_t i = c_.size(); i-- > 0;) acc = acc * u + c_[i].to_double();
        return acc;
    }

  private:
    void trim() {
        while (!c_.empty() && c_.back() == Rational(0)) c_.pop_back();
    }
    std::vector<Rational> c_;
};

} // namespace lamptf
