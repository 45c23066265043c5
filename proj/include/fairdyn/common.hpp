#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace fairdyn {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Input violates a documented precondition or model invariant.
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to produce a trustworthy answer.
class NumericFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Group { a = 0, b = 1 };

inline Group other(Group g) { return g == Group::a ? Group::b : Group::a; }
inline const char* to_string(Group g) { return g == Group::a ? "a" : "b"; }

/// Shortest round-trip decimal form (at most 17 significant digits); "inf", "-inf", "nan".
std::string format_real(double v);

}  // namespace fairdyn
