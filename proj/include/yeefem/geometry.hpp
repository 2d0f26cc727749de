#pragma once

#include <cmath>

namespace yeefem {

struct Vec2
{
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(const Vec2& o)
  {
    x += o.x;
    y += o.y;
    return *this;
  }
  constexpr Vec2& operator-=(const Vec2& o)
  {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  constexpr Vec2& operator*=(double s)
  {
    x *= s;
    y *= s;
    return *this;
  }
  friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }

/// z-component of the 3D cross product of two in-plane vectors.
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }

/// Rotation by +90 degrees.
constexpr Vec2 perp(const Vec2& a) { return {-a.y, a.x}; }

inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }

constexpr Vec2 midpoint(const Vec2& a, const Vec2& b) { return 0.5 * (a + b); }

/// Twice the signed area of the triangle (a, b, c); positive when counterclockwise.
constexpr double signed_area2(const Vec2& a, const Vec2& b, const Vec2& c)
{
  return cross(b - a, c - a);
}

} // namespace yeefem
