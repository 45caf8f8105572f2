#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rwl/env/hopper.hpp"

namespace rwl::env {

/// Row-major RGB image.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // 3 * width * height

  friend bool operator==(const Frame&, const Frame&) = default;
};

inline constexpr int kMinFrameSize = 16;
inline constexpr int kBodyRadiusPx = 5;
inline constexpr int kHeadingTickPx = 10;

/// Camera window spans x in [x - 2, x + 6] and z in [-0.5, 3.5] around the
/// body. Throws std::invalid_argument below kMinFrameSize.
Frame render_frame(const EnvState& state, int width, int height);

/// Pixel column/row of a world point for a camera centred on `state`.
struct PixelPos {
  double col;
  double row;
};
PixelPos world_to_pixel(const EnvState& camera, double wx, double wz, int width, int height);

std::string encode_ppm(const Frame& frame);
Frame decode_ppm(std::string_view bytes);
std::string encode_png(const Frame& frame);

struct FrameManifest {
  int count = 0;
  double dt = 0.0;  // seconds between consecutive frames
  int width = 0;
  int height = 0;

  friend bool operator==(const FrameManifest&, const FrameManifest&) = default;
};

std::string frame_file_name(int index);

/// Writes frame_%04d.ppm files plus frames.json into `dir`.
void write_frame_sequence(const std::filesystem::path& dir, std::span<const Frame> frames, double dt);
FrameManifest read_frame_manifest(const std::filesystem::path& dir);
std::vector<Frame> read_frame_sequence(const std::filesystem::path& dir);
Frame read_frame(const std::filesystem::path& dir, int index);

}  // namespace rwl::env
