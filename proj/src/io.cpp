#include "svxgerry/io.hpp"

#include <png.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <unordered_map>

namespace svxgerry {

namespace fs = std::filesystem;

namespace {

// -- raw file helpers --------------------------------------------------------

std::vector<std::uint8_t> slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw NotFoundError("cannot open " + file.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + file.string());
  return bytes;
}

void dump(const fs::path& file, const void* data, std::size_t n) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + file.string());
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!out) throw IoError("write failed: " + file.string());
}

// -- little-endian scalar packing ---------------------------------------------

std::uint32_t load_le32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void store_le32(std::uint8_t* p, std::uint32_t v) {
  p[0] = static_cast<std::uint8_t>(v);
  p[1] = static_cast<std::uint8_t>(v >> 8);
  p[2] = static_cast<std::uint8_t>(v >> 16);
  p[3] = static_cast<std::uint8_t>(v >> 24);
}

// -- PNG codec (libpng, memory-backed) ----------------------------------------

struct MemReader {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t off;
};

void png_mem_read(png_structp png, png_bytep out, png_size_t len) {
  auto* r = static_cast<MemReader*>(png_get_io_ptr(png));
  if (r->off + len > r->size) png_error(png, "unexpected end of data");
  std::memcpy(out, r->data + r->off, len);
  r->off += len;
}

void png_mem_write(png_structp png, png_bytep in, png_size_t len) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), in, in + len);
}

void png_mem_flush(png_structp) {}

struct DecodedImage {
  int w = 0, h = 0;
  int channels = 0;   // 1 or 3
  int bit_depth = 0;  // 8 or 16
  std::vector<std::uint8_t> data;  // native-endian samples, row-major
};

// mode: force 3x8-bit RGB, or keep single-channel (8/16-bit) when the file is
// grayscale and fall back to RGB when it is not.
enum class PngMode { ForceRgb8, PreferGray };

DecodedImage decode_png(const std::vector<std::uint8_t>& bytes, PngMode mode) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0)
    throw FormatError("not a PNG stream");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng read init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng read init failed");
  }

  DecodedImage out;
  std::vector<png_bytep> rows;
  MemReader reader{bytes.data(), bytes.size(), 0};

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("corrupt PNG stream");
  }

  png_set_read_fn(png, &reader, png_mem_read);
  png_read_info(png, info);

  png_uint_32 w = 0, h = 0;
  int bit_depth = 0, color_type = 0;
  png_get_IHDR(png, info, &w, &h, &bit_depth, &color_type, nullptr, nullptr, nullptr);

  const bool is_gray =
      color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA;
  const bool keep_gray = mode == PngMode::PreferGray && is_gray;

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (is_gray && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);

  if (!keep_gray) {
    if (bit_depth == 16) png_set_strip_16(png);
    if (is_gray) png_set_gray_to_rgb(png);
  }
  if (keep_gray && bit_depth == 16 && std::endian::native == std::endian::little)
    png_set_swap(png);

  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  out.w = static_cast<int>(w);
  out.h = static_cast<int>(h);
  out.channels = png_get_channels(png, info);
  out.bit_depth = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  out.data.resize(rowbytes * h);
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = out.data.data() + y * rowbytes;

  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

std::vector<std::uint8_t> encode_png(const std::uint8_t* data, int w, int h, int channels,
                                     int bit_depth) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng write init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng write init failed");
  }

  std::vector<std::uint8_t> out;
  std::vector<png_bytep> rows(static_cast<std::size_t>(h));
  const std::size_t rowbytes =
      static_cast<std::size_t>(w) * channels * (bit_depth / 8);

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG encode failed");
  }

  png_set_write_fn(png, &out, png_mem_write, png_mem_flush);
  png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), bit_depth,
               channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16 && std::endian::native == std::endian::little) png_set_swap(png);

  for (int y = 0; y < h; ++y)
    rows[static_cast<std::size_t>(y)] =
        const_cast<png_bytep>(data + static_cast<std::size_t>(y) * rowbytes);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

// -- PPM (binary P6) ----------------------------------------------------------

bool looks_like_ppm(const std::vector<std::uint8_t>& bytes) {
  return bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '6';
}

int ppm_next_int(const std::vector<std::uint8_t>& bytes, std::size_t& off) {
  while (off < bytes.size()) {
    if (std::isspace(bytes[off])) {
      ++off;
    } else if (bytes[off] == '#') {
      while (off < bytes.size() && bytes[off] != '\n') ++off;
    } else {
      break;
    }
  }
  if (off >= bytes.size() || !std::isdigit(bytes[off])) throw FormatError("bad PPM header");
  long v = 0;
  while (off < bytes.size() && std::isdigit(bytes[off])) {
    v = v * 10 + (bytes[off] - '0');
    if (v > 1'000'000'000L) throw FormatError("bad PPM header");
    ++off;
  }
  return static_cast<int>(v);
}

Grid2<Rgb8> decode_ppm(const std::vector<std::uint8_t>& bytes) {
  std::size_t off = 2;
  const int w = ppm_next_int(bytes, off);
  const int h = ppm_next_int(bytes, off);
  const int maxval = ppm_next_int(bytes, off);
  if (w < 1 || h < 1) throw FormatError("bad PPM dimensions");
  if (maxval != 255) throw FormatError("unsupported PPM maxval (want 255)");
  if (off >= bytes.size() || !std::isspace(bytes[off])) throw FormatError("bad PPM header");
  ++off;
  const std::size_t need = static_cast<std::size_t>(w) * h * 3;
  if (bytes.size() - off < need) throw FormatError("truncated PPM payload");

  Grid2<Rgb8> img(h, w);
  std::memcpy(img.data(), bytes.data() + off, need);
  return img;
}

// -- filename ordering ---------------------------------------------------------

long long numeric_key(const std::string& stem) {
  std::size_t end = stem.size();
  while (end > 0 && std::isdigit(static_cast<unsigned char>(stem[end - 1]))) --end;
  if (end == stem.size()) return -1;
  std::size_t begin = end;
  if (stem.size() - begin > 18) begin = stem.size() - 18;
  long long v = 0;
  for (std::size_t i = begin; i < stem.size(); ++i) v = v * 10 + (stem[i] - '0');
  return v;
}

std::string default_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%05d", index);
  return buf;
}

std::string name_or_default(const std::vector<std::string>& names, int index) {
  if (index < static_cast<int>(names.size())) return names[static_cast<std::size_t>(index)];
  return default_name(index);
}

}  // namespace

// -- single images -------------------------------------------------------------

Grid2<Rgb8> read_image_rgb(const fs::path& file) {
  const auto bytes = slurp(file);
  if (looks_like_ppm(bytes)) return decode_ppm(bytes);

  DecodedImage img;
  try {
    img = decode_png(bytes, PngMode::ForceRgb8);
  } catch (const FormatError& e) {
    throw FormatError(file.string() + ": " + e.what());
  }
  Grid2<Rgb8> out(img.h, img.w);
  std::memcpy(out.data(), img.data.data(), img.data.size());
  return out;
}

Grid2<std::uint16_t> read_image_gray(const fs::path& file, int& max_value) {
  const auto bytes = slurp(file);
  DecodedImage img;
  try {
    img = decode_png(bytes, PngMode::PreferGray);
  } catch (const FormatError& e) {
    throw FormatError(file.string() + ": " + e.what());
  }
  if (img.channels != 1)
    throw FormatError(file.string() + ": expected a grayscale image");

  max_value = img.bit_depth == 16 ? 65535 : 255;
  Grid2<std::uint16_t> out(img.h, img.w);
  if (img.bit_depth == 16) {
    std::memcpy(out.data(), img.data.data(), img.data.size());
  } else {
    for (std::size_t i = 0; i < img.data.size(); ++i) out.raw()[i] = img.data[i];
  }
  return out;
}

void write_image_rgb(const fs::path& file, const Grid2<Rgb8>& img) {
  if (file.extension() == ".ppm") {
    std::string header = "P6\n" + std::to_string(img.width()) + " " +
                         std::to_string(img.height()) + "\n255\n";
    std::vector<std::uint8_t> bytes(header.begin(), header.end());
    const auto* px = reinterpret_cast<const std::uint8_t*>(img.data());
    bytes.insert(bytes.end(), px, px + img.size() * 3);
    dump(file, bytes.data(), bytes.size());
    return;
  }
  const auto bytes = encode_png(reinterpret_cast<const std::uint8_t*>(img.data()), img.width(),
                                img.height(), 3, 8);
  dump(file, bytes.data(), bytes.size());
}

void write_image_gray8(const fs::path& file, const Grid2<std::uint8_t>& img) {
  const auto bytes = encode_png(img.data(), img.width(), img.height(), 1, 8);
  dump(file, bytes.data(), bytes.size());
}

void write_image_gray16(const fs::path& file, const Grid2<std::uint16_t>& img) {
  const auto bytes = encode_png(reinterpret_cast<const std::uint8_t*>(img.data()), img.width(),
                                img.height(), 1, 16);
  dump(file, bytes.data(), bytes.size());
}

// -- Middlebury .flo -------------------------------------------------------------

FlowField read_flo(const fs::path& file) {
  const auto bytes = slurp(file);
  if (bytes.size() < 12) throw FormatError(file.string() + ": truncated flow header");
  const float magic = std::bit_cast<float>(load_le32(bytes.data()));
  if (magic != 202021.25f) throw FormatError(file.string() + ": bad flow magic");
  const auto w = static_cast<std::int32_t>(load_le32(bytes.data() + 4));
  const auto h = static_cast<std::int32_t>(load_le32(bytes.data() + 8));
  if (w < 1 || h < 1) throw FormatError(file.string() + ": bad flow dimensions");
  const std::size_t need = 12 + static_cast<std::size_t>(w) * h * 8;
  if (bytes.size() < need) throw FormatError(file.string() + ": truncated flow payload");

  FlowField flow(h, w);
  const std::uint8_t* p = bytes.data() + 12;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      flow.u.at(y, x) = std::bit_cast<float>(load_le32(p));
      flow.v.at(y, x) = std::bit_cast<float>(load_le32(p + 4));
      p += 8;
    }
  return flow;
}

void write_flo(const fs::path& file, const FlowField& flow) {
  const int h = flow.height(), w = flow.width();
  std::vector<std::uint8_t> bytes(12 + static_cast<std::size_t>(w) * h * 8);
  store_le32(bytes.data(), std::bit_cast<std::uint32_t>(202021.25f));
  store_le32(bytes.data() + 4, static_cast<std::uint32_t>(w));
  store_le32(bytes.data() + 8, static_cast<std::uint32_t>(h));
  std::uint8_t* p = bytes.data() + 12;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      store_le32(p, std::bit_cast<std::uint32_t>(static_cast<float>(flow.u.at(y, x))));
      store_le32(p + 4, std::bit_cast<std::uint32_t>(static_cast<float>(flow.v.at(y, x))));
      p += 8;
    }
  dump(file, bytes.data(), bytes.size());
}

// -- directory-level loaders -------------------------------------------------------

std::vector<fs::path> list_frames(const fs::path& dir,
                                  const std::vector<std::string>& extensions) {
  if (!fs::is_directory(dir)) throw NotFoundError("no such directory: " + dir.string());

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (std::find(extensions.begin(), extensions.end(), ext) != extensions.end())
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    const long long ka = numeric_key(a.stem().string());
    const long long kb = numeric_key(b.stem().string());
    if (ka != kb) return ka < kb;
    return a.filename().string() < b.filename().string();
  });
  return files;
}

VideoVolume load_frames(const fs::path& dir) {
  const auto files = list_frames(dir, {".png", ".ppm"});
  if (files.empty()) throw NotFoundError("no frames in " + dir.string());

  const Grid2<Rgb8> first = read_image_rgb(files[0]);
  VideoVolume video(static_cast<int>(files.size()), first.height(), first.width());
  for (std::size_t i = 0; i < files.size(); ++i) {
    const Grid2<Rgb8> frame = i == 0 ? first : read_image_rgb(files[i]);
    if (frame.height() != video.height() || frame.width() != video.width())
      throw FormatError("frame size mismatch: " + files[i].string());
    std::copy(frame.data(), frame.data() + frame.size(),
              video.data() + i * frame.size());
  }
  return video;
}

std::vector<std::string> frame_names(const fs::path& dir) {
  const auto files = list_frames(dir, {".png", ".ppm"});
  std::vector<std::string> names;
  names.reserve(files.size());
  for (const auto& f : files) names.push_back(f.stem().string());
  return names;
}

std::vector<FlowField> load_flow_sequence(const fs::path& dir) {
  const auto files = list_frames(dir, {".flo"});
  if (files.empty()) throw NotFoundError("no .flo files in " + dir.string());

  std::vector<FlowField> flows;
  flows.reserve(files.size());
  for (const auto& f : files) {
    flows.push_back(read_flo(f));
    if (!flows.back().same_shape(flows.front()))
      throw FormatError("flow size mismatch: " + f.string());
  }
  return flows;
}

std::vector<SaliencyMap> load_saliency(const fs::path& dir) {
  const auto files = list_frames(dir, {".png"});
  if (files.empty()) throw NotFoundError("no saliency maps in " + dir.string());

  std::vector<SaliencyMap> maps;
  maps.reserve(files.size());
  for (const auto& f : files) {
    int max_value = 255;
    const Grid2<std::uint16_t> img = read_image_gray(f, max_value);
    SaliencyMap map(img.height(), img.width());
    for (std::size_t i = 0; i < img.size(); ++i)
      map.raw()[i] = static_cast<double>(img.raw()[i]) / max_value;
    if (!maps.empty() && !map.same_shape(maps.front()))
      throw FormatError("saliency size mismatch: " + f.string());
    maps.push_back(std::move(map));
  }
  return maps;
}

LabelGrid load_supervoxel_labels(const fs::path& dir, int expected_frames) {
  const auto files = list_frames(dir, {".png", ".ppm"});
  if (files.empty()) throw NotFoundError("no supervoxel frames in " + dir.string());
  if (expected_frames > 0 && static_cast<int>(files.size()) != expected_frames)
    throw FormatError("supervoxel frame count mismatch in " + dir.string() + ": expected " +
                      std::to_string(expected_frames) + ", found " +
                      std::to_string(files.size()));

  std::unordered_map<std::uint32_t, std::int32_t> color_to_id;
  LabelGrid labels;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const Grid2<Rgb8> img = read_image_rgb(files[i]);
    if (i == 0) {
      labels = LabelGrid(static_cast<int>(files.size()), img.height(), img.width());
    } else if (img.height() != labels.height() || img.width() != labels.width()) {
      throw FormatError("supervoxel frame size mismatch: " + files[i].string());
    }
    for (int y = 0; y < img.height(); ++y)
      for (int x = 0; x < img.width(); ++x) {
        const Rgb8 c = img.at(y, x);
        const std::uint32_t key = static_cast<std::uint32_t>(c.r) << 16 |
                                  static_cast<std::uint32_t>(c.g) << 8 | c.b;
        auto [it, inserted] =
            color_to_id.try_emplace(key, static_cast<std::int32_t>(color_to_id.size()));
        labels.at(static_cast<int>(i), y, x) = it->second;
      }
  }
  return labels;
}

void write_supervoxel_labels(const fs::path& dir, const LabelGrid& labels,
                             const std::vector<std::string>& names) {
  fs::create_directories(dir);
  for (int t = 0; t < labels.frames(); ++t) {
    Grid2<Rgb8> img(labels.height(), labels.width());
    for (int y = 0; y < labels.height(); ++y)
      for (int x = 0; x < labels.width(); ++x) {
        const std::int32_t id = labels.at(t, y, x);
        if (id < 0 || id > 0xFFFFFF)
          throw std::invalid_argument("supervoxel id out of 24-bit color range");
        img.at(y, x) = Rgb8{static_cast<std::uint8_t>(id & 255),
                            static_cast<std::uint8_t>((id >> 8) & 255),
                            static_cast<std::uint8_t>((id >> 16) & 255)};
      }
    write_image_rgb(dir / (name_or_default(names, t) + ".png"), img);
  }
}

MaskSequence load_ground_truth(const fs::path& dir) {
  const auto files = list_frames(dir, {".png"});
  if (files.empty()) throw NotFoundError("no ground-truth masks in " + dir.string());

  MaskSequence masks;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const auto bytes = slurp(files[i]);
    DecodedImage img;
    try {
      img = decode_png(bytes, PngMode::PreferGray);
    } catch (const FormatError& e) {
      throw FormatError(files[i].string() + ": " + e.what());
    }
    if (i == 0) {
      masks = MaskSequence(static_cast<int>(files.size()), img.h, img.w);
    } else if (img.h != masks.height() || img.w != masks.width()) {
      throw FormatError("ground-truth size mismatch: " + files[i].string());
    }

    std::uint8_t* out = masks.raw().data() + static_cast<std::size_t>(i) * img.h * img.w;
    const std::size_t count = static_cast<std::size_t>(img.h) * img.w;
    if (img.channels == 1 && img.bit_depth == 16) {
      const auto* px = reinterpret_cast<const std::uint16_t*>(img.data.data());
      for (std::size_t j = 0; j < count; ++j) out[j] = px[j] != 0 ? 1 : 0;
    } else if (img.channels == 1) {
      for (std::size_t j = 0; j < count; ++j) out[j] = img.data[j] != 0 ? 1 : 0;
    } else {
      for (std::size_t j = 0; j < count; ++j) {
        const std::uint8_t* px = img.data.data() + j * 3;
        out[j] = (px[0] | px[1] | px[2]) != 0 ? 1 : 0;
      }
    }
  }
  return masks;
}

void write_masks(const MaskSequence& masks, const fs::path& dir,
                 const std::vector<std::string>& names) {
  fs::create_directories(dir);
  for (int t = 0; t < masks.frames(); ++t) {
    Grid2<std::uint8_t> img(masks.height(), masks.width());
    for (std::size_t i = 0; i < img.size(); ++i)
      img.raw()[i] =
          masks.raw()[static_cast<std::size_t>(t) * img.size() + i] != 0 ? 255 : 0;
    write_image_gray8(dir / (name_or_default(names, t) + ".png"), img);
  }
}

}  // namespace svxgerry
