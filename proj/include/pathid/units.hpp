#pragma once

// SI quantities written as "<number> [unit]", e.g. "180 nm/s", "1.5 ns",
// "160 MHz", "15.40 mW", "27 urad", "200 cps", "0.056".
//
// Unit expression: term (('/' | '*') term)*, term = [prefix] base ['^' int].
// Bases: m, s, Hz, cps (counts per second), W, rad, deg, % (0.01). A bare
// "1" is allowed as a numerator ("1/s"). Prefixes: p n u µ μ m c k M G.

#include <string>
#include <string_view>

namespace pathid::units {

struct Dimension {
    int length = 0;
    int time = 0;
    int power = 0;
    int angle = 0;

    friend bool operator==(const Dimension&, const Dimension&) = default;
    Dimension operator*(const Dimension& o) const { return {length + o.length, time + o.time, power + o.power, angle + o.angle}; }
    Dimension inverse() const { return {-length, -time, -power, -angle}; }
    std::string str() const;
};

inline constexpr Dimension kDimensionless{};
inline constexpr Dimension kLength{1, 0, 0, 0};
inline constexpr Dimension kTime{0, 1, 0, 0};
inline constexpr Dimension kFrequency{0, -1, 0, 0};
inline constexpr Dimension kVelocity{1, -1, 0, 0};
inline constexpr Dimension kPower{0, 0, 1, 0};
inline constexpr Dimension kAngle{0, 0, 0, 1};

struct Quantity {
    double value = 0.0;  // SI
    Dimension dimension;
};

// Throws ParseError on malformed text.
Quantity parse_quantity(std::string_view text);

// Parses and checks the dimension. Plain numbers are accepted for angles
// (radians). Throws ParseError mentioning `field` on failure.
double parse_as(std::string_view text, Dimension expected, std::string_view field);

}  // namespace pathid::units
