#include <png.h>

#include <cstring>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "rwl/common/files.hpp"
#include "rwl/env/render.hpp"

namespace rwl::env {

std::string encode_ppm(const Frame& frame) {
  std::string out = fmt::format("P6\n{} {}\n255\n", frame.width, frame.height);
  out.append(reinterpret_cast<const char*>(frame.rgb.data()), frame.rgb.size());
  return out;
}

Frame decode_ppm(std::string_view bytes) {
  // Header: "P6" <ws> width <ws> height <ws> maxval <single ws> data
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&] {
    skip_ws();
    int v = 0;
    bool any = false;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
      v = v * 10 + (bytes[pos] - '0');
      ++pos;
      any = true;
      if (v > 1 << 20) throw IoError("ppm: header value too large");
    }
    if (!any) throw IoError("ppm: malformed header");
    return v;
  };
  if (bytes.substr(0, 2) != "P6") throw IoError("ppm: not a binary PPM (P6)");
  pos = 2;
  Frame f;
  f.width = read_int();
  f.height = read_int();
  const int maxval = read_int();
  if (maxval != 255) throw IoError("ppm: only maxval 255 is supported");
  ++pos;  // single whitespace before raster
  const std::size_t n = 3 * static_cast<std::size_t>(f.width) * f.height;
  if (bytes.size() < pos + n) throw IoError("ppm: truncated raster");
  f.rgb.assign(reinterpret_cast<const std::uint8_t*>(bytes.data() + pos),
               reinterpret_cast<const std::uint8_t*>(bytes.data() + pos + n));
  return f;
}

std::string encode_png(const Frame& frame) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (png == nullptr) throw std::runtime_error("png: cannot create write struct");
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("png: cannot create info struct");
  }
  std::string out;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("png: encoding failed");
  }
  png_set_write_fn(
      png, &out,
      [](png_structp p, png_bytep data, png_size_t len) {
        static_cast<std::string*>(png_get_io_ptr(p))->append(reinterpret_cast<const char*>(data), len);
      },
      nullptr);
  png_set_IHDR(png, info, static_cast<png_uint_32>(frame.width), static_cast<png_uint_32>(frame.height), 8,
               PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int row = 0; row < frame.height; ++row) {
    auto* ptr = const_cast<png_bytep>(frame.rgb.data() + 3 * static_cast<std::size_t>(row) * frame.width);
    png_write_row(png, ptr);
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

std::string frame_file_name(int index) { return fmt::format("frame_{:04d}.ppm", index); }

void write_frame_sequence(const std::filesystem::path& dir, std::span<const Frame> frames, double dt) {
  std::filesystem::create_directories(dir);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    write_text_file(dir / frame_file_name(static_cast<int>(i)), encode_ppm(frames[i]));
  }
  nlohmann::json manifest = {
      {"count", frames.size()},
      {"dt", dt},
      {"width", frames.empty() ? 0 : frames.front().width},
      {"height", frames.empty() ? 0 : frames.front().height},
  };
  write_text_file(dir / "frames.json", manifest.dump(2) + "\n");
}

FrameManifest read_frame_manifest(const std::filesystem::path& dir) {
  const auto path = dir / "frames.json";
  try {
    const auto j = nlohmann::json::parse(read_text_file(path));
    return FrameManifest{j.at("count").get<int>(), j.at("dt").get<double>(), j.at("width").get<int>(),
                         j.at("height").get<int>()};
  } catch (const nlohmann::json::exception& e) {
    throw IoError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

Frame read_frame(const std::filesystem::path& dir, int index) {
  const auto path = dir / frame_file_name(index);
  try {
    return decode_ppm(read_text_file(path));
  } catch (const IoError& e) {
    throw IoError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::vector<Frame> read_frame_sequence(const std::filesystem::path& dir) {
  const FrameManifest m = read_frame_manifest(dir);
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(m.count));
  for (int i = 0; i < m.count; ++i) frames.push_back(read_frame(dir, i));
  return frames;
}

}  // namespace rwl::env
