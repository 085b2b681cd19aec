#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ymflow {

// Exact rational arithmetic for degree bookkeeping. Numerators and
// denominators stay tiny here (degrees are sums of a handful of small
// fractions), so int64 never overflows in practice.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n) : num(n), den(1) {}
    Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { reduce(); }

    void reduce() {
        if (den == 0) throw std::invalid_argument("Rational: zero denominator");
        if (den < 0) { num = -num; den = -den; }
        const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
    }

    friend Rational operator+(Rational a, Rational b) {
        return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
    }
    friend Rational operator-(Rational a, Rational b) {
        return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
    }
    friend Rational operator*(Rational a, Rational b) {
        return Rational(a.num * b.num, a.den * b.den);
    }
    Rational operator-() const { return Rational(-num, den); }
    friend bool operator==(const Rational& a, const Rational& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator<(const Rational& a, const Rational& b) {
        return a.num * b.den < b.num * a.den;
    }
    friend bool operator<=(const Rational& a, const Rational& b) {
        return a.num * b.den <= b.num * a.den;
    }
    double value() const { return double(num) / double(den); }

    std::string str() const {
        if (den == 1) return std::to_string(num);
        return std::to_string(num) + "/" + std::to_string(den);
    }
};

// An element a + b*k of Q + Q*k, where k is a formal small parameter
// confined to an open interval (typically (0, 1/4)).
struct DegreeQK {
    Rational a;  // constant part
    Rational b;  // coefficient of k

    DegreeQK() = default;
    DegreeQK(Rational a_, Rational b_) : a(a_), b(b_) {}

    friend DegreeQK operator+(const DegreeQK& x, const DegreeQK& y) {
        return {x.a + y.a, x.b + y.b};
    }
    friend DegreeQK operator-(const DegreeQK& x, const DegreeQK& y) {
        return {x.a - y.a, x.b - y.b};
    }
    friend bool operator==(const DegreeQK& x, const DegreeQK& y) {
        return x.a == y.a && x.b == y.b;
    }

    double eval(double k) const { return a.value() + b.value() * k; }

    // Sign on the open interval (lo, hi): -1 if negative throughout,
    // +1 if positive throughout, 0 if it vanishes identically or changes sign.
    int sign_on(Rational lo, Rational hi) const {
        const Rational at_lo = a + b * lo;
        const Rational at_hi = a + b * hi;
        const Rational zero(0);
        auto neg_at_open = [&](const Rational& v, bool left) {
            if (v < zero) return true;
            if (v == zero) return left ? (b < zero) : (zero < b);
            return false;
        };
        auto pos_at_open = [&](const Rational& v, bool left) {
            if (zero < v) return true;
            if (v == zero) return left ? (zero < b) : (b < zero);
            return false;
        };
        if (a == zero && b == zero) return 0;
        if (neg_at_open(at_lo, true) && neg_at_open(at_hi, false)) return -1;
        if (pos_at_open(at_lo, true) && pos_at_open(at_hi, false)) return +1;
        return 0;
    }

    std::string str() const {
        if (b == Rational(0)) return a.str();
        std::string s = a.str();
        if (Rational(0) < b) s += "+" + b.str() + "*k";
        else s += "-" + (-b).str() + "*k";
        return s;
    }
};

}  // namespace ymflow
