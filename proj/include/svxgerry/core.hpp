#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace svxgerry {

/// Input data is malformed (bad magic, inconsistent dimensions, ...).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A required file or directory is missing or empty.
class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A read or write failed at the OS level.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Rgb8 {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb8&) const = default;
};

/// CIELAB triplet (D65 white point). L lies in [0,100].
struct Lab {
  double l = 0, a = 0, b = 0;
};

/// Dense row-major H×W grid.
template <typename T>
class Grid2 {
 public:
  Grid2() = default;
  Grid2(int height, int width, T fill = T{})
      : h_(height), w_(width), data_(static_cast<std::size_t>(height) * width, fill) {
    if (height < 1 || width < 1) throw std::invalid_argument("Grid2: dimensions must be positive");
  }

  int height() const { return h_; }
  int width() const { return w_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& at(int y, int x) { return data_[static_cast<std::size_t>(y) * w_ + x]; }
  const T& at(int y, int x) const { return data_[static_cast<std::size_t>(y) * w_ + x]; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::vector<T>& raw() { return data_; }
  const std::vector<T>& raw() const { return data_; }

  bool same_shape(const Grid2& o) const { return h_ == o.h_ && w_ == o.w_; }
  bool operator==(const Grid2&) const = default;

 private:
  int h_ = 0, w_ = 0;
  std::vector<T> data_;
};

/// Dense T×H×W grid, row-major within each frame.
template <typename T>
class Grid3 {
 public:
  Grid3() = default;
  Grid3(int frames, int height, int width, T fill = T{})
      : t_(frames),
        h_(height),
        w_(width),
        data_(static_cast<std::size_t>(frames) * height * width, fill) {
    if (frames < 1 || height < 1 || width < 1)
      throw std::invalid_argument("Grid3: dimensions must be positive");
  }

  int frames() const { return t_; }
  int height() const { return h_; }
  int width() const { return w_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& at(int t, int y, int x) {
    return data_[(static_cast<std::size_t>(t) * h_ + y) * w_ + x];
  }
  const T& at(int t, int y, int x) const {
    return data_[(static_cast<std::size_t>(t) * h_ + y) * w_ + x];
  }

  Grid2<T> frame(int t) const {
    Grid2<T> f(h_, w_);
    const T* src = data_.data() + static_cast<std::size_t>(t) * h_ * w_;
    std::copy(src, src + static_cast<std::size_t>(h_) * w_, f.data());
    return f;
  }
  void set_frame(int t, const Grid2<T>& f) {
    std::copy(f.data(), f.data() + f.size(),
              data_.data() + static_cast<std::size_t>(t) * h_ * w_);
  }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::vector<T>& raw() { return data_; }
  const std::vector<T>& raw() const { return data_; }

  bool same_shape(const Grid3& o) const { return t_ == o.t_ && h_ == o.h_ && w_ == o.w_; }
  bool operator==(const Grid3&) const = default;

 private:
  int t_ = 0, h_ = 0, w_ = 0;
  std::vector<T> data_;
};

using MaskFrame = Grid2<std::uint8_t>;
using MaskSequence = Grid3<std::uint8_t>;
using LabelGrid = Grid3<std::int32_t>;

/// A stack of T ≥ 2 RGB frames sharing one H×W geometry.
class VideoVolume {
 public:
  VideoVolume() = default;
  VideoVolume(int frames, int height, int width)
      : t_(frames),
        h_(height),
        w_(width),
        px_(static_cast<std::size_t>(frames) * height * width) {
    if (frames < 2) throw std::invalid_argument("VideoVolume: need at least 2 frames");
    if (height < 1 || width < 1)
      throw std::invalid_argument("VideoVolume: frame dimensions must be positive");
  }

  int frames() const { return t_; }
  int height() const { return h_; }
  int width() const { return w_; }
  std::size_t voxel_count() const { return px_.size(); }

  Rgb8& at(int t, int y, int x) {
    return px_[(static_cast<std::size_t>(t) * h_ + y) * w_ + x];
  }
  const Rgb8& at(int t, int y, int x) const {
    return px_[(static_cast<std::size_t>(t) * h_ + y) * w_ + x];
  }

  Rgb8* data() { return px_.data(); }
  const Rgb8* data() const { return px_.data(); }

  bool operator==(const VideoVolume&) const = default;

 private:
  int t_ = 0, h_ = 0, w_ = 0;
  std::vector<Rgb8> px_;
};

/// Lightweight reference to one frame of a volume.
struct FrameView {
  const VideoVolume* video = nullptr;
  int t = 0;

  int height() const { return video->height(); }
  int width() const { return video->width(); }
  Rgb8 at(int y, int x) const { return video->at(t, y, x); }
};

/// Per-voxel real field carrying its declared value range.
struct ScoreField {
  Grid3<double> values;
  double lo = 0, hi = 0;

  ScoreField() = default;
  ScoreField(int frames, int height, int width, double lo_, double hi_)
      : values(frames, height, width), lo(lo_), hi(hi_) {}

  bool in_declared_range() const {
    for (double v : values.raw())
      if (v < lo || v > hi) return false;
    return true;
  }
};

/// sRGB (8-bit) to CIELAB under the D65 illuminant.
Lab rgb_to_lab(Rgb8 rgb);

/// Box-filter downscale by an integer factor. Output is ceil(H/f) × ceil(W/f);
/// edge cells average over the partial box; channel averages round half up.
VideoVolume downscale_volume(const VideoVolume& v, int factor);

/// Nearest-neighbor label upsampling. Target must be at least the source size.
LabelGrid upscale_labels(const LabelGrid& labels, int target_h, int target_w);

}  // namespace svxgerry
