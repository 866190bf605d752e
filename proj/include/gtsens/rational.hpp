#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace gtsens {

/// Exact rational number on 64-bit integers.
///
/// Intermediate products are computed in 128 bits and narrowing back to
/// 64 bits is checked, so arithmetic either returns the exact value or
/// throws. The linear programs this backs are tiny (a handful of small
/// integer coefficients), so 64 bits of headroom is plenty.
class Rational {
public:
    Rational() = default;
    Rational(std::int64_t value) : num_(value), den_(1) {}
    Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) { normalize(); }

    std::int64_t num() const { return num_; }
    std::int64_t den() const { return den_; }

    int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }
    bool is_zero() const { return num_ == 0; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    std::string str() const {
        if (den_ == 1) return std::to_string(num_);
        return std::to_string(num_) + "/" + std::to_string(den_);
    }

    friend Rational operator+(const Rational& a, const Rational& b) {
        __int128 n = w(a.num_) * b.den_ + w(b.num_) * a.den_;
        __int128 d = w(a.den_) * b.den_;
        return make(n, d);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        __int128 n = w(a.num_) * b.den_ - w(b.num_) * a.den_;
        __int128 d = w(a.den_) * b.den_;
        return make(n, d);
    }
    friend Rational operator*(const Rational& a, const Rational& b) {
        return make(w(a.num_) * b.num_, w(a.den_) * b.den_);
    }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.num_ == 0) throw std::domain_error("rational division by zero");
        return make(w(a.num_) * b.den_, w(a.den_) * b.num_);
    }
    Rational operator-() const {
        Rational r;
        r.num_ = -num_;
        r.den_ = den_;
        return r;
    }

    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
    friend bool operator<(const Rational& a, const Rational& b) {
        return w(a.num_) * b.den_ < w(b.num_) * a.den_;
    }
    friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
    friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
    friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

private:
    static __int128 w(std::int64_t v) { return static_cast<__int128>(v); }

    static Rational make(__int128 n, __int128 d) {
        if (d == 0) throw std::domain_error("rational with zero denominator");
        if (d < 0) {
            n = -n;
            d = -d;
        }
        __int128 g = gcd128(n < 0 ? -n : n, d);
        if (g > 1) {
            n /= g;
            d /= g;
        }
        Rational r;
        r.num_ = narrow(n);
        r.den_ = narrow(d);
        return r;
    }

    static __int128 gcd128(__int128 a, __int128 b) {
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a == 0 ? 1 : a;
    }

    static std::int64_t narrow(__int128 v) {
        if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("rational overflow");
        return static_cast<std::int64_t>(v);
    }

    void normalize() {
        *this = make(num_, den_);
    }

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace gtsens
