#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace densitylab {

// Exact reduced fraction over 128-bit integers.  Wide enough for the closed
// forms this project needs (products over the first ~12 primes squared) while
// staying a value type; construction and every operation keep the invariant
// den > 0, gcd(|num|, den) == 1.
class Rational {
public:
    using Int = __int128;

    constexpr Rational() : num_(0), den_(1) {}
    Rational(Int num, Int den) : num_(num), den_(den) { normalize(); }
    Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit by design

    Int num() const { return num_; }
    Int den() const { return den_; }

    double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

    Rational operator+(const Rational& o) const { return {num_ * o.den_ + o.num_ * den_, den_ * o.den_}; }
    Rational operator-(const Rational& o) const { return {num_ * o.den_ - o.num_ * den_, den_ * o.den_}; }
    Rational operator*(const Rational& o) const { return {num_ * o.num_, den_ * o.den_}; }
    Rational operator/(const Rational& o) const {
        if (o.num_ == 0) throw std::domain_error("Rational: division by zero");
        return {num_ * o.den_, den_ * o.num_};
    }
    Rational& operator+=(const Rational& o) { return *this = *this + o; }
    Rational& operator-=(const Rational& o) { return *this = *this - o; }
    Rational& operator*=(const Rational& o) { return *this = *this * o; }
    Rational& operator/=(const Rational& o) { return *this = *this / o; }

    bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
    bool operator!=(const Rational& o) const { return !(*this == o); }
    bool operator<(const Rational& o) const { return num_ * o.den_ < o.num_ * den_; }
    bool operator>(const Rational& o) const { return o < *this; }
    bool operator<=(const Rational& o) const { return !(o < *this); }
    bool operator>=(const Rational& o) const { return !(*this < o); }

    // Parses "3", "0.25", "-1.5", or "p/q".  Decimal strings become exact
    // fractions over a power of ten, so "0.1" is 1/10 rather than the nearest
    // double.  Throws std::invalid_argument on malformed input.
    static Rational parse(std::string_view text);

    // Decimal-or-slash rendering: integers as "n", otherwise "p/q".
    std::string str() const;

    // floor(num/den) for nonnegative values; throws std::domain_error if negative.
    std::uint64_t floor_u64() const;

private:
    void normalize();

    Int num_;
    Int den_;
};

inline void Rational::normalize() {
    if (den_ == 0) throw std::domain_error("Rational: zero denominator");
    if (den_ < 0) {
        num_ = -num_;
        den_ = -den_;
    }
    Int a = num_ < 0 ? -num_ : num_;
    Int b = den_;
    while (b != 0) {
        Int t = a % b;
        a = b;
        b = t;
    }
    if (a > 1) {
        num_ /= a;
        den_ /= a;
    }
    if (num_ == 0) den_ = 1;
}

inline Rational Rational::parse(std::string_view text) {
    auto fail = [&] { throw std::invalid_argument("Rational::parse: bad input '" + std::string(text) + "'"); };
    if (text.empty()) fail();
    bool neg = false;
    std::size_t i = 0;
    if (text[0] == '+' || text[0] == '-') {
        neg = text[0] == '-';
        i = 1;
    }
    Int num = 0, den = 1;
    bool saw_digit = false, saw_dot = false, saw_slash = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c >= '0' && c <= '9') {
            num = num * 10 + (c - '0');
            if (saw_dot) den *= 10;
            saw_digit = true;
        } else if (c == '.' && !saw_dot && !saw_slash) {
            saw_dot = true;
        } else if (c == '/' && !saw_slash && !saw_dot && saw_digit) {
            // p/q form: parse the rest as the denominator.
            Int q = 0;
            bool q_digit = false;
            for (++i; i < text.size(); ++i) {
                if (text[i] < '0' || text[i] > '9') fail();
                q = q * 10 + (text[i] - '0');
                q_digit = true;
            }
            if (!q_digit || q == 0) fail();
            den = q;
            saw_slash = true;
            break;
        } else {
            fail();
        }
    }
    if (!saw_digit) fail();
    return {neg ? -num : num, den};
}

inline std::string Rational::str() const {
    auto digits = [](Int v) {
        if (v == 0) return std::string("0");
        std::string out;
        while (v > 0) {
            out.insert(out.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
            v /= 10;
        }
        return out;
    };
    std::string s = num_ < 0 ? "-" : "";
    s += digits(num_ < 0 ? -num_ : num_);
    if (den_ != 1) s += "/" + digits(den_);
    return s;
}

inline std::uint64_t Rational::floor_u64() const {
    if (num_ < 0) throw std::domain_error("Rational::floor_u64: negative value");
    return static_cast<std::uint64_t>(num_ / den_);
}

}  // namespace densitylab
