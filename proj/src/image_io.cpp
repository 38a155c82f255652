#include "comet/image_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

#include "json.hpp"

#include "comet/error.hpp"

namespace comet {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path sidecar_path(const fs::path& image_path) { return fs::path(image_path.string() + ".json"); }

double write_pgm16(const fs::path& path, const ImageGrid& image) {
  const double peak = image.max_value();
  const double scale = peak > 0.0 ? peak / 65535.0 : 1.0;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << "P5\n" << image.width() << ' ' << image.height() << "\n65535\n";
  std::vector<unsigned char> buf(static_cast<std::size_t>(image.width()) * 2);
  for (int r = 0; r < image.height(); ++r) {
    const auto row = image.row(r);
    for (int c = 0; c < image.width(); ++c) {
      const double v = std::clamp(std::round(row[static_cast<std::size_t>(c)] / scale), 0.0, 65535.0);
      const auto count = static_cast<std::uint16_t>(v);
      buf[2 * static_cast<std::size_t>(c)] = static_cast<unsigned char>(count >> 8);
      buf[2 * static_cast<std::size_t>(c) + 1] = static_cast<unsigned char>(count & 0xff);
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
  return scale;
}

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

int header_int(std::istream& in, const fs::path& path) {
  const std::string tok = header_token(in);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used == tok.size()) return v;
  } catch (const std::exception&) {
  }
  throw IoError("malformed PGM header in '" + path.string() + "'");
}

}  // namespace

PgmRaster read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open image '" + path.string() + "'");
  if (header_token(in) != "P5") throw IoError("'" + path.string() + "' is not a binary PGM (P5)");
  PgmRaster r;
  r.width = header_int(in, path);
  r.height = header_int(in, path);
  r.maxval = header_int(in, path);
  if (r.width < 1 || r.height < 1 || r.maxval < 1 || r.maxval > 65535) {
    throw IoError("unsupported PGM dimensions or maxval in '" + path.string() + "'");
  }
  const std::size_t n = static_cast<std::size_t>(r.width) * r.height;
  const std::size_t bytes_per = r.maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(n * bytes_per);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) throw IoError("truncated PGM data in '" + path.string() + "'");
  r.counts.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    r.counts[i] = bytes_per == 2 ? static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]) : raw[i];
  }
  return r;
}

void write_sidecar(const fs::path& image_path, const ImageSidecar& meta) {
  json j;
  j["format"] = "pgm-p5-16bit-be";
  j["width"] = meta.grid.width;
  j["height"] = meta.grid.height;
  j["pixel_pitch_um"] = meta.grid.pixel_pitch_um;
  j["origin_x_um"] = meta.grid.origin_x_um;
  j["origin_y_um"] = meta.grid.origin_y_um;
  j["intensity_scale"] = meta.intensity_scale;
  j["pattern_mode"] = meta.pattern_mode;
  j["config_hash"] = meta.config_hash;
  std::ofstream out(sidecar_path(image_path), std::ios::binary);
  if (!out) throw IoError("cannot write sidecar for '" + image_path.string() + "'");
  out << j.dump(2) << '\n';
}

std::optional<ImageSidecar> read_sidecar(const fs::path& image_path) {
  const fs::path p = sidecar_path(image_path);
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    const json j = json::parse(in);
    ImageSidecar m;
    m.grid.width = j.at("width").get<int>();
    m.grid.height = j.at("height").get<int>();
    m.grid.pixel_pitch_um = j.at("pixel_pitch_um").get<double>();
    m.grid.origin_x_um = j.at("origin_x_um").get<double>();
    m.grid.origin_y_um = j.at("origin_y_um").get<double>();
    m.intensity_scale = j.at("intensity_scale").get<double>();
    m.pattern_mode = j.value("pattern_mode", "");
    m.config_hash = j.value("config_hash", "");
    return m;
  } catch (const json::exception& e) {
    throw IoError("malformed sidecar '" + p.string() + "': " + e.what());
  }
}

ImageGrid load_image(const fs::path& path, const GridSpec& fallback) {
  const PgmRaster raster = read_pgm(path);
  GridSpec grid = fallback;
  double scale = 1.0;
  if (auto meta = read_sidecar(path)) {
    grid = meta->grid;
    scale = meta->intensity_scale;
  } else {
    grid = DetectorGeometry::centered(raster.width, raster.height, fallback.pixel_pitch_um);
  }
  if (grid.width != raster.width || grid.height != raster.height) {
    throw IoError("sidecar dimensions do not match image '" + path.string() + "'");
  }
  ImageGrid image(grid);
  auto values = image.values();
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = raster.counts[i] * scale;
  return image;
}

void write_png8(const fs::path& path, const ImageGrid& image) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.string().c_str(), "wb"), &std::fclose);
  if (!fp) throw IoError("cannot write '" + path.string() + "'");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng failed writing '" + path.string() + "'");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()), static_cast<png_uint_32>(image.height()), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const double peak = image.max_value();
  std::vector<png_byte> line(static_cast<std::size_t>(image.width()));
  for (int r = 0; r < image.height(); ++r) {
    const auto row = image.row(r);
    for (int c = 0; c < image.width(); ++c) {
      const double v = peak > 0.0 ? std::sqrt(row[static_cast<std::size_t>(c)] / peak) : 0.0;
      line[static_cast<std::size_t>(c)] = static_cast<png_byte>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
    }
    png_write_row(png, line.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace comet
