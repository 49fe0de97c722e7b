#include "pathid/units.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <utility>

#include "pathid/error.hpp"

namespace pathid::units {

namespace {

struct Base {
    std::string_view symbol;
    double scale;
    Dimension dim;
};

constexpr std::array<Base, 9> kBases{{
    {"m", 1.0, kLength},
    {"s", 1.0, kTime},
    {"Hz", 1.0, kFrequency},
    {"cps", 1.0, kFrequency},
    {"W", 1.0, kPower},
    {"rad", 1.0, kAngle},
    {"deg", std::numbers::pi / 180.0, kAngle},
    {"1", 1.0, kDimensionless},
    {"%", 0.01, kDimensionless},
}};

constexpr std::array<std::pair<std::string_view, double>, 10> kPrefixes{{
    {"p", 1e-12}, {"n", 1e-9}, {"u", 1e-6}, {"\xC2\xB5", 1e-6}, {"\xCE\xBC", 1e-6},
    {"m", 1e-3}, {"c", 1e-2}, {"k", 1e3}, {"M", 1e6}, {"G", 1e9},
}};

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

const Base* find_base(std::string_view sym) {
    for (const auto& b : kBases) {
        if (b.symbol == sym) return &b;
    }
    return nullptr;
}

Quantity parse_term(std::string_view term, std::string_view whole) {
    term = trim(term);
    int exponent = 1;
    if (auto caret = term.find('^'); caret != std::string_view::npos) {
        const auto exp_text = trim(term.substr(caret + 1));
        auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
        if (ec != std::errc{} || ptr != exp_text.data() + exp_text.size()) {
            throw ParseError("bad exponent in unit '" + std::string(whole) + "'");
        }
        term = trim(term.substr(0, caret));
    }
    double scale = 0.0;
    Dimension dim;
    if (const Base* b = find_base(term)) {
        scale = b->scale;
        dim = b->dim;
    } else {
        bool found = false;
        for (const auto& [prefix, factor] : kPrefixes) {
            if (term.size() > prefix.size() && term.substr(0, prefix.size()) == prefix) {
                if (const Base* b = find_base(term.substr(prefix.size())); b && b->symbol != "1" && b->symbol != "%") {
                    scale = factor * b->scale;
                    dim = b->dim;
                    found = true;
                    break;
                }
            }
        }
        if (!found) throw ParseError("unknown unit '" + std::string(term) + "' in '" + std::string(whole) + "'");
    }
    Quantity q{std::pow(scale, exponent), {}};
    for (int k = 0; k < std::abs(exponent); ++k) q.dimension = q.dimension * (exponent > 0 ? dim : dim.inverse());
    return q;
}

}  // namespace

std::string Dimension::str() const {
    std::string out;
    const auto add = [&](const char* sym, int e) {
        if (e == 0) return;
        if (!out.empty()) out += ' ';
        out += sym;
        if (e != 1) out += '^' + std::to_string(e);
    };
    add("m", length);
    add("s", time);
    add("W", power);
    add("rad", angle);
    return out.empty() ? "dimensionless" : out;
}

Quantity parse_quantity(std::string_view text) {
    const std::string_view whole = trim(text);
    if (whole.empty()) throw ParseError("empty quantity");
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), value);
    if (ec != std::errc{}) throw ParseError("quantity '" + std::string(whole) + "' does not start with a number");
    std::string_view unit = trim(std::string_view(ptr, static_cast<std::size_t>(whole.data() + whole.size() - ptr)));
    Quantity q{value, {}};
    if (unit.empty()) return q;

    char op = '*';
    // "1/s": the number doubles as the numerator
    if (unit.front() == '/') {
        op = '/';
        unit = trim(unit.substr(1));
    }
    while (true) {
        const auto next = unit.find_first_of("/*");
        const Quantity t = parse_term(unit.substr(0, next), whole);
        if (op == '*') {
            q.value *= t.value;
            q.dimension = q.dimension * t.dimension;
        } else {
            q.value /= t.value;
            q.dimension = q.dimension * t.dimension.inverse();
        }
        if (next == std::string_view::npos) break;
        op = unit[next];
        unit = unit.substr(next + 1);
    }
    return q;
}

double parse_as(std::string_view text, Dimension expected, std::string_view field) {
    Quantity q;
    try {
        q = parse_quantity(text);
    } catch (const ParseError& e) {
        throw ParseError(std::string(field) + ": " + e.what());
    }
    if (q.dimension == kDimensionless && expected == kAngle) return q.value;
    if (!(q.dimension == expected)) {
        throw ParseError(std::string(field) + ": expected " + expected.str() + ", got '" + std::string(trim(text)) +
                         "' (" + q.dimension.str() + ")");
    }
    return q.value;
}

}  // namespace pathid::units
