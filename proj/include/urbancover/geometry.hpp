#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace urbancover {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  double norm_sq() const { return x * x + y * y; }
  double dist(const Vec2& o) const { return std::hypot(x - o.x, y - o.y); }
};

inline Vec2 operator*(double s, const Vec2& v) { return v * s; }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3() = default;
  Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  Vec2 ground() const { return {x, y}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double dist(const Vec3& o) const { return (*this - o).norm(); }
};

/// Axis-aligned rectangle, closed on all sides.
struct Rect {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  Vec2 center() const { return {0.5 * (x_min + x_max), 0.5 * (y_min + y_max)}; }

  bool contains(const Vec2& p) const {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  }

  /// Interiors intersect (touching edges do not count as overlap).
  bool overlaps(const Rect& o) const {
    return x_min < o.x_max && o.x_min < x_max && y_min < o.y_max && o.y_min < y_max;
  }

  /// Nearest point of the closed rectangle to p.
  Vec2 nearest_point(const Vec2& p) const {
    return {std::fmin(std::fmax(p.x, x_min), x_max), std::fmin(std::fmax(p.y, y_min), y_max)};
  }

  double distance(const Vec2& p) const { return nearest_point(p).dist(p); }
};

/// Uniform discretization of the ground rectangle [0,L1]x[0,L2].
///
/// `cell_size` is an upper bound on the cell edge; the grid always tiles the
/// extent exactly, so dx = L1/nx <= cell_size and dy = L2/ny <= cell_size.
class GroundGrid {
 public:
  GroundGrid(double L1, double L2, double cell_size) : L1_(L1), L2_(L2) {
    if (L1 <= 0.0 || L2 <= 0.0) throw std::invalid_argument("GroundGrid: extent must be positive");
    if (cell_size <= 0.0) throw std::invalid_argument("GroundGrid: cell_size must be positive");
    if (cell_size > std::fmin(L1, L2))
      throw std::invalid_argument("GroundGrid: cell_size larger than the smallest extent");
    nx_ = static_cast<std::size_t>(std::ceil(L1 / cell_size - 1e-9));
    ny_ = static_cast<std::size_t>(std::ceil(L2 / cell_size - 1e-9));
    dx_ = L1 / static_cast<double>(nx_);
    dy_ = L2 / static_cast<double>(ny_);
  }

  double L1() const { return L1_; }
  double L2() const { return L2_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t cell_count() const { return nx_ * ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double cell_area() const { return dx_ * dy_; }

  std::size_t index(std::size_t ix, std::size_t iy) const { return iy * nx_ + ix; }

  Vec2 center(std::size_t ix, std::size_t iy) const {
    return {(static_cast<double>(ix) + 0.5) * dx_, (static_cast<double>(iy) + 0.5) * dy_};
  }

  Vec2 center(std::size_t flat) const { return center(flat % nx_, flat / nx_); }

  /// Cell containing p; boundary points clamp into the grid.
  std::pair<std::size_t, std::size_t> cell_of(const Vec2& p) const {
    auto clampi = [](double v, std::size_t n) {
      if (v < 0.0) return std::size_t{0};
      auto i = static_cast<std::size_t>(v);
      return i >= n ? n - 1 : i;
    };
    return {clampi(p.x / dx_, nx_), clampi(p.y / dy_, ny_)};
  }

 private:
  double L1_, L2_;
  std::size_t nx_ = 0, ny_ = 0;
  double dx_ = 0.0, dy_ = 0.0;
};

inline double clamp(double v, double lo, double hi) { return std::fmin(std::fmax(v, lo), hi); }

}  // namespace urbancover
