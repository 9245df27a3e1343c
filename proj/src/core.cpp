#include "svxgerry/core.hpp"

#include <algorithm>
#include <cmath>

namespace svxgerry {

namespace {

double srgb_linearize(double c) {
  return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
}

double lab_f(double t) {
  constexpr double kCube = 216.0 / 24389.0;  // (6/29)^3
  constexpr double kSlope = 24389.0 / 27.0 / 116.0;
  return t > kCube ? std::cbrt(t) : kSlope * t + 16.0 / 116.0;
}

}  // namespace

Lab rgb_to_lab(Rgb8 rgb) {
  const double r = srgb_linearize(rgb.r / 255.0);
  const double g = srgb_linearize(rgb.g / 255.0);
  const double b = srgb_linearize(rgb.b / 255.0);

  // IEC 61966-2-1 sRGB matrix; rows sum exactly to the D65 white point,
  // which keeps L at exactly 100 (and a=b=0) for pure white.
  const double x = 0.4124 * r + 0.3576 * g + 0.1805 * b;
  const double y = 0.2126 * r + 0.7152 * g + 0.0722 * b;
  const double z = 0.0193 * r + 0.1192 * g + 0.9505 * b;

  const double fx = lab_f(x / 0.9505);
  const double fy = lab_f(y);
  const double fz = lab_f(z / 1.0890);

  return Lab{116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

VideoVolume downscale_volume(const VideoVolume& v, int factor) {
  if (factor < 1) throw std::invalid_argument("downscale_volume: factor must be >= 1");
  if (factor == 1) return v;

  const int h = v.height(), w = v.width();
  const int oh = (h + factor - 1) / factor;
  const int ow = (w + factor - 1) / factor;
  VideoVolume out(v.frames(), oh, ow);

  for (int t = 0; t < v.frames(); ++t) {
    for (int oy = 0; oy < oh; ++oy) {
      const int y0 = oy * factor, y1 = std::min(y0 + factor, h);
      for (int ox = 0; ox < ow; ++ox) {
        const int x0 = ox * factor, x1 = std::min(x0 + factor, w);
        long long sr = 0, sg = 0, sb = 0;
        for (int y = y0; y < y1; ++y)
          for (int x = x0; x < x1; ++x) {
            const Rgb8& p = v.at(t, y, x);
            sr += p.r;
            sg += p.g;
            sb += p.b;
          }
        const double n = static_cast<double>(y1 - y0) * (x1 - x0);
        out.at(t, oy, ox) = Rgb8{
            static_cast<std::uint8_t>(std::floor(sr / n + 0.5)),
            static_cast<std::uint8_t>(std::floor(sg / n + 0.5)),
            static_cast<std::uint8_t>(std::floor(sb / n + 0.5))};
      }
    }
  }
  return out;
}

LabelGrid upscale_labels(const LabelGrid& labels, int target_h, int target_w) {
  const int sh = labels.height(), sw = labels.width();
  if (target_h < sh || target_w < sw)
    throw std::invalid_argument("upscale_labels: target smaller than source");
  if (target_h == sh && target_w == sw) return labels;

  LabelGrid out(labels.frames(), target_h, target_w);
  std::vector<int> ymap(target_h), xmap(target_w);
  for (int y = 0; y < target_h; ++y)
    ymap[y] = static_cast<int>(static_cast<long long>(y) * sh / target_h);
  for (int x = 0; x < target_w; ++x)
    xmap[x] = static_cast<int>(static_cast<long long>(x) * sw / target_w);

  for (int t = 0; t < labels.frames(); ++t)
    for (int y = 0; y < target_h; ++y)
      for (int x = 0; x < target_w; ++x) out.at(t, y, x) = labels.at(t, ymap[y], xmap[x]);
  return out;
}

}  // namespace svxgerry
