#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace ldcm {

using Vec3 = std::array<double, 3>;
using Int3 = std::array<int, 3>;

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr double four_pi = 4.0 * pi;

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm2(const Vec3& a) { return std::sqrt(dot(a, a)); }

// Configuration / precondition problems surface as exceptions with the
// offending operation named.
struct config_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct contract_error : std::logic_error {
  using std::logic_error::logic_error;
};

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw config_error(msg);
}
inline void expect(bool ok, const std::string& msg) {
  if (!ok) throw contract_error(msg);
}

inline int ceil_div(int a, int b) { return a >= 0 ? (a + b - 1) / b : -((-a) / b); }
inline int floor_div(int a, int b) { return a >= 0 ? a / b : -(((-a) + b - 1) / b); }

}  // namespace ldcm
