#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace formsight {

// Exact rational value. Accuracy means stay exact all the way through
// aggregation; conversion to double or a rounded string happens only when a
// report is rendered.
class Fraction {
public:
    constexpr Fraction() = default;
    Fraction(std::int64_t num, std::int64_t den);

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }
    double to_double() const noexcept { return static_cast<double>(num_) / static_cast<double>(den_); }

    Fraction operator+(const Fraction& other) const;
    Fraction operator-(const Fraction& other) const;
    Fraction operator*(const Fraction& other) const;
    Fraction operator/(const Fraction& other) const;
    bool operator==(const Fraction& other) const = default;

    // Arithmetic mean; throws std::invalid_argument on an empty input.
    static Fraction mean(const std::vector<Fraction>& values);

private:
    static Fraction make(__int128 num, __int128 den);

    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

}  // namespace formsight
