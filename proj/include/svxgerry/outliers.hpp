#pragma once

#include <cstdint>
#include <tuple>
#include <vector>

namespace svxgerry {

// Tukey range-test summary for one data field.
struct OutlierSummary {
  double q1 = 0.0, q2 = 0.0, q3 = 0.0;
  double o1 = 0.0, o3 = 0.0;
  double k = 1.5;
  double alpha = 0.0;
};

// Type-7 quartiles: linear interpolation at position p*(n-1).
// Throws std::invalid_argument on empty data.
std::tuple<double, double, double> quartiles(const std::vector<double>& data);

// o1 = q1 - k*(q3-q1), o3 = q3 + k*(q3-q1). Requires q1 <= q3 and k >= 0.
std::pair<double, double> tukey_fences(double q1, double q3, double k);

// True exactly where d < o1 or d > o3 (strict).
std::vector<std::uint8_t> outlier_mask(const std::vector<double>& data, double o1, double o3);

// alpha = sum_{outliers} |d| / sum_{all} |d|; 0 when the denominator is 0.
double outlier_scale(const std::vector<double>& data, const std::vector<std::uint8_t>& mask);

// Full pipeline over one field: quartiles, fences, mask, alpha.
OutlierSummary tukey_summary(const std::vector<double>& data, double k,
                             std::vector<std::uint8_t>* mask_out = nullptr);

}  // namespace svxgerry
