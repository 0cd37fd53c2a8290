#include "formsight/fraction.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>

namespace formsight {

namespace {

__int128 gcd128(__int128 a, __int128 b) {
    if (a < 0) a = -a;
    if (b < 0) b = -b;
    while (b != 0) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

}  // namespace

Fraction Fraction::make(__int128 num, __int128 den) {
    if (den == 0) {
        throw std::invalid_argument("fraction denominator is zero");
    }
    if (den < 0) {
        num = -num;
        den = -den;
    }
    __int128 g = gcd128(num, den);
    if (g > 1) {
        num /= g;
        den /= g;
    }
    constexpr __int128 lo = std::numeric_limits<std::int64_t>::min();
    constexpr __int128 hi = std::numeric_limits<std::int64_t>::max();
    if (num < lo || num > hi || den > hi) {
        throw std::overflow_error("fraction out of 64-bit range");
    }
    Fraction f;
    f.num_ = static_cast<std::int64_t>(num);
    f.den_ = static_cast<std::int64_t>(den);
    return f;
}

Fraction::Fraction(std::int64_t num, std::int64_t den) { *this = make(num, den); }

Fraction Fraction::operator+(const Fraction& other) const {
    return make(static_cast<__int128>(num_) * other.den_ + static_cast<__int128>(other.num_) * den_,
                static_cast<__int128>(den_) * other.den_);
}

Fraction Fraction::operator-(const Fraction& other) const {
    return make(static_cast<__int128>(num_) * other.den_ - static_cast<__int128>(other.num_) * den_,
                static_cast<__int128>(den_) * other.den_);
}

Fraction Fraction::operator*(const Fraction& other) const {
    return make(static_cast<__int128>(num_) * other.num_, static_cast<__int128>(den_) * other.den_);
}

Fraction Fraction::operator/(const Fraction& other) const {
    if (other.num_ == 0) {
        throw std::invalid_argument("division by zero fraction");
    }
    return make(static_cast<__int128>(num_) * other.den_, static_cast<__int128>(den_) * other.num_);
}

Fraction Fraction::mean(const std::vector<Fraction>& values) {
    if (values.empty()) {
        throw std::invalid_argument("mean of empty fraction sequence");
    }
    Fraction sum;
    for (const Fraction& v : values) {
        sum = sum + v;
    }
    return sum / Fraction(static_cast<std::int64_t>(values.size()), 1);
}

}  // namespace formsight
