#include "rwl/env/render.hpp"

#include <cmath>
#include <stdexcept>

namespace rwl::env {

namespace {

constexpr double kWindowBehind = 2.0;
constexpr double kWindowWidth = 8.0;
constexpr double kWindowTop = 3.5;
constexpr double kWindowHeight = 4.0;

struct Rgb {
  std::uint8_t r, g, b;
};

constexpr Rgb kSky{236, 240, 245};
constexpr Rgb kGround{205, 195, 175};
constexpr Rgb kGroundLine{70, 60, 50};
constexpr Rgb kMarker{150, 140, 120};
constexpr Rgb kBody{200, 50, 40};
constexpr Rgb kHeading{20, 20, 20};

void put(Frame& f, int col, int row, Rgb c) {
  if (col < 0 || row < 0 || col >= f.width || row >= f.height) return;
  const std::size_t i = 3 * (static_cast<std::size_t>(row) * f.width + col);
  f.rgb[i] = c.r;
  f.rgb[i + 1] = c.g;
  f.rgb[i + 2] = c.b;
}

int to_index(double v) { return static_cast<int>(std::floor(v)); }

}  // namespace

PixelPos world_to_pixel(const EnvState& camera, double wx, double wz, int width, int height) {
  const double left = camera.x - kWindowBehind;
  return {(wx - left) / kWindowWidth * width, (kWindowTop - wz) / kWindowHeight * height};
}

Frame render_frame(const EnvState& state, int width, int height) {
  if (width < kMinFrameSize || height < kMinFrameSize) {
    throw std::invalid_argument("frame size must be at least 16x16");
  }
  Frame f;
  f.width = width;
  f.height = height;
  f.rgb.resize(3 * static_cast<std::size_t>(width) * height);

  const int ground_row = to_index(world_to_pixel(state, state.x, 0.0, width, height).row);
  for (int row = 0; row < height; ++row) {
    const Rgb c = row > ground_row ? kGround : kSky;
    for (int col = 0; col < width; ++col) put(f, col, row, c);
  }
  for (int col = 0; col < width; ++col) put(f, col, ground_row, kGroundLine);

  // Distance markers every metre make forward motion visible with a
  // body-following camera.
  const double left = state.x - kWindowBehind;
  for (double mx = std::ceil(left); mx <= left + kWindowWidth; mx += 1.0) {
    const int col = to_index(world_to_pixel(state, mx, 0.0, width, height).col);
    for (int dr = 1; dr <= 3; ++dr) put(f, col, ground_row + dr, kMarker);
  }

  const PixelPos center = world_to_pixel(state, state.x, state.z, width, height);
  const int cx = to_index(center.col);
  const int cy = to_index(center.row);
  for (int dy = -kBodyRadiusPx; dy <= kBodyRadiusPx; ++dy) {
    for (int dx = -kBodyRadiusPx; dx <= kBodyRadiusPx; ++dx) {
      if (dx * dx + dy * dy <= kBodyRadiusPx * kBodyRadiusPx) put(f, cx + dx, cy + dy, kBody);
    }
  }

  // Heading tick along body-up: world (-sin, cos) is screen (-sin, -cos).
  const double ux = -std::sin(state.pitch);
  const double uy = -std::cos(state.pitch);
  for (int k = 0; k <= kHeadingTickPx; ++k) {
    put(f, cx + static_cast<int>(std::lround(ux * k)), cy + static_cast<int>(std::lround(uy * k)), kHeading);
  }
  return f;
}

}  // namespace rwl::env
