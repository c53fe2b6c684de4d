#pragma once

#include <optional>
#include <string_view>

namespace evans {

/// The three one-step schemes.
enum class Method {
  midpoint,         // exponential midpoint rule (second-order Magnus)
  magnus4,          // fourth-order Magnus with two Gauss-Legendre samples
  gauss_legendre4,  // two-stage Gauss-Legendre Runge-Kutta
};

inline constexpr Method kAllMethods[] = {Method::midpoint, Method::magnus4, Method::gauss_legendre4};

inline const char* to_string(Method m) {
  switch (m) {
    case Method::midpoint:
      return "midpoint";
    case Method::magnus4:
      return "magnus4";
    case Method::gauss_legendre4:
      return "gl4";
  }
  return "?";
}

inline std::optional<Method> parse_method(std::string_view s) {
  if (s == "midpoint") return Method::midpoint;
  if (s == "magnus4") return Method::magnus4;
  if (s == "gl4" || s == "gauss_legendre4") return Method::gauss_legendre4;
  return std::nullopt;
}

}  // namespace evans
