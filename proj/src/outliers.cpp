#include "svxgerry/outliers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace svxgerry {

namespace {

double interp_sorted(const std::vector<double>& s, double p) {
  const double pos = p * (s.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return s[lo] + frac * (s[hi] - s[lo]);
}

}  // namespace

std::tuple<double, double, double> quartiles(const std::vector<double>& data) {
  if (data.empty()) throw std::invalid_argument("quartiles: empty data");
  std::vector<double> s(data);
  std::sort(s.begin(), s.end());
  return {interp_sorted(s, 0.25), interp_sorted(s, 0.5), interp_sorted(s, 0.75)};
}

std::pair<double, double> tukey_fences(double q1, double q3, double k) {
  if (q1 > q3) throw std::invalid_argument("tukey_fences: q1 > q3");
  if (k < 0.0) throw std::invalid_argument("tukey_fences: negative k");
  const double iqr = q3 - q1;
  return {q1 - k * iqr, q3 + k * iqr};
}

std::vector<std::uint8_t> outlier_mask(const std::vector<double>& data, double o1, double o3) {
  std::vector<std::uint8_t> mask(data.size());
  for (std::size_t i = 0; i < data.size(); ++i)
    mask[i] = (data[i] < o1 || data[i] > o3) ? 1 : 0;
  return mask;
}

double outlier_scale(const std::vector<double>& data, const std::vector<std::uint8_t>& mask) {
  if (data.size() != mask.size())
    throw std::invalid_argument("outlier_scale: shape mismatch");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double a = std::fabs(data[i]);
    den += a;
    if (mask[i]) num += a;
  }
  return den == 0.0 ? 0.0 : num / den;
}

OutlierSummary tukey_summary(const std::vector<double>& data, double k,
                             std::vector<std::uint8_t>* mask_out) {
  OutlierSummary s;
  s.k = k;
  std::tie(s.q1, s.q2, s.q3) = quartiles(data);
  std::tie(s.o1, s.o3) = tukey_fences(s.q1, s.q3, k);
  auto mask = outlier_mask(data, s.o1, s.o3);
  s.alpha = outlier_scale(data, mask);
  if (mask_out) *mask_out = std::move(mask);
  return s;
}

}  // namespace svxgerry
