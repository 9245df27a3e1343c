#include "svxgerry/mvso.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "svxgerry/outliers.hpp"

namespace svxgerry {

namespace {

std::vector<double> frame_values(const Grid3<double>& g, int t) {
  const auto* base = g.data() + static_cast<std::size_t>(t) * g.height() * g.width();
  return std::vector<double>(base, base + static_cast<std::size_t>(g.height()) * g.width());
}

struct ComponentFrameStats {
  double q2 = 0.0;
  double alpha = 0.0;
  std::vector<std::uint8_t> outliers;
};

ComponentFrameStats component_stats(const Grid3<double>& component, int t, double tukey_k) {
  ComponentFrameStats s;
  const auto data = frame_values(component, t);
  OutlierSummary sum = tukey_summary(data, tukey_k, &s.outliers);
  s.q2 = sum.q2;
  s.alpha = sum.alpha;
  return s;
}

}  // namespace

FlowComponents flow_components(const std::vector<FlowField>& flows, bool magnitude_sqrt) {
  if (flows.empty()) throw std::invalid_argument("flow_components: need at least one flow pair");
  const int h = flows[0].height(), w = flows[0].width();
  for (const auto& f : flows)
    if (f.height() != h || f.width() != w)
      throw std::invalid_argument("flow_components: flow size mismatch");

  const int frames = static_cast<int>(flows.size()) + 1;
  FlowComponents comps{Grid3<double>(frames, h, w), Grid3<double>(frames, h, w),
                       Grid3<double>(frames, h, w), Grid3<double>(frames, h, w)};

  for (int t = 0; t < frames; ++t) {
    const FlowField& f = flows[std::min<std::size_t>(t, flows.size() - 1)];
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const double u = f.u.at(y, x), v = f.v.at(y, x);
        comps.x.at(t, y, x) = u;
        comps.y.at(t, y, x) = v;
        const double sq = u * u + v * v;
        comps.magnitude.at(t, y, x) = magnitude_sqrt ? std::sqrt(sq) : sq;
        double a = (u == 0.0 && v == 0.0) ? 0.0 : std::atan2(v, u);
        if (a == -std::numbers::pi) a = std::numbers::pi;
        comps.angle.at(t, y, x) = a;
      }
  }
  return comps;
}

Grid3<double> motion_saliency(const Grid3<double>& component, double tukey_k) {
  Grid3<double> out(component.frames(), component.height(), component.width());
  const std::size_t frame_size =
      static_cast<std::size_t>(component.height()) * component.width();

  for (int t = 0; t < component.frames(); ++t) {
    const ComponentFrameStats s = component_stats(component, t, tukey_k);
    double* dst = out.data() + static_cast<std::size_t>(t) * frame_size;
    const double* src = component.data() + static_cast<std::size_t>(t) * frame_size;
    if (s.alpha < 0.5) continue;
    for (std::size_t i = 0; i < frame_size; ++i)
      if (s.outliers[i]) dst[i] = s.alpha * std::fabs(src[i] - s.q2);
  }
  return out;
}

Grid3<double> visual_saliency_measure(const std::vector<SaliencyMap>& vismaps,
                                      const FlowComponents& comps, double k_exponent,
                                      double tukey_k) {
  if (k_exponent <= 0.0)
    throw std::invalid_argument("visual_saliency_measure: exponent must be positive");
  const int frames = comps.frames();
  if (static_cast<int>(vismaps.size()) != frames)
    throw std::invalid_argument("visual_saliency_measure: saliency frame count mismatch");

  const int h = comps.x.height(), w = comps.x.width();
  Grid3<double> out(frames, h, w);
  const std::size_t frame_size = static_cast<std::size_t>(h) * w;

  for (int t = 0; t < frames; ++t) {
    if (vismaps[t].height() != h || vismaps[t].width() != w)
      throw std::invalid_argument("visual_saliency_measure: saliency size mismatch");

    std::array<ComponentFrameStats, 4> stats;
    for (int i = 0; i < 4; ++i) stats[i] = component_stats(comps.component(i), t, tukey_k);

    double* dst = out.data() + static_cast<std::size_t>(t) * frame_size;
    for (std::size_t p = 0; p < frame_size; ++p) {
      double flow_term = 0.0;
      for (int i = 0; i < 4; ++i) {
        const double d =
            comps.component(i).data()[static_cast<std::size_t>(t) * frame_size + p];
        flow_term += std::max(stats[i].alpha, 0.5) * std::fabs(d - stats[i].q2);
      }
      const double dv = vismaps[t].raw()[p];
      dst[p] = std::pow(dv, k_exponent) * flow_term;
    }
  }
  return out;
}

SaliencyMeasures saliency_measures(const std::vector<SaliencyMap>& vismaps,
                                   const FlowComponents& comps, const MvsoParams& params) {
  SaliencyMeasures m;
  for (int i = 0; i < 4; ++i) m.motion[i] = motion_saliency(comps.component(i), params.tukey_k);
  const double exponents[3] = {1.0, 0.5, 1.0 / 3.0};
  for (int i = 0; i < 3; ++i)
    m.visual[i] = visual_saliency_measure(vismaps, comps, exponents[i], params.tukey_k);
  return m;
}

ScoreField initial_foreground(const SaliencyMeasures& measures) {
  const Grid3<double>& first = measures.motion[0];
  ScoreField f0(first.frames(), first.height(), first.width(), 0.0,
                std::numeric_limits<double>::infinity());
  auto& out = f0.values.raw();
  for (const auto& m : measures.motion)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += m.raw()[i];
  for (const auto& m : measures.visual)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += m.raw()[i];
  return f0;
}

ScoreField scale_f0(const ScoreField& f0, bool per_video) {
  ScoreField out(f0.values.frames(), f0.values.height(), f0.values.width(), 0.0, 1.0);
  const std::size_t frame_size =
      static_cast<std::size_t>(f0.values.height()) * f0.values.width();

  if (per_video) {
    double hi = 0.0;
    for (double v : f0.values.raw()) hi = std::max(hi, v);
    if (hi > 0.0)
      for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values.raw()[i] = f0.values.raw()[i] / hi;
    return out;
  }

  for (int t = 0; t < f0.values.frames(); ++t) {
    const double* src = f0.values.data() + static_cast<std::size_t>(t) * frame_size;
    double* dst = out.values.data() + static_cast<std::size_t>(t) * frame_size;
    double hi = 0.0;
    for (std::size_t i = 0; i < frame_size; ++i) hi = std::max(hi, src[i]);
    if (hi > 0.0)
      for (std::size_t i = 0; i < frame_size; ++i) dst[i] = src[i] / hi;
  }
  return out;
}

MaskFrame keep_top_components(const MaskFrame& mask, const Grid2<double>& score, int max_n,
                              int connectivity) {
  if (max_n < 1) throw std::invalid_argument("keep_top_components: max_n must be >= 1");
  if (connectivity != 4 && connectivity != 8)
    throw std::invalid_argument("keep_top_components: connectivity must be 4 or 8");
  if (!mask.same_shape(MaskFrame(score.height(), score.width())))
    throw std::invalid_argument("keep_top_components: shape mismatch");

  const int h = mask.height(), w = mask.width();
  Grid2<int> labels(h, w, -1);
  struct Component {
    int id = 0;
    double sum = 0.0;
    long count = 0;
    long first = 0;
  };
  std::vector<Component> comps;
  std::vector<long> stack;

  for (long start = 0; start < static_cast<long>(mask.size()); ++start) {
    if (mask.raw()[static_cast<std::size_t>(start)] == 0 ||
        labels.raw()[static_cast<std::size_t>(start)] >= 0)
      continue;
    Component c;
    c.id = static_cast<int>(comps.size());
    c.first = start;
    stack.assign(1, start);
    labels.raw()[static_cast<std::size_t>(start)] = c.id;
    while (!stack.empty()) {
      const long p = stack.back();
      stack.pop_back();
      const int y = static_cast<int>(p / w), x = static_cast<int>(p % w);
      c.sum += score.at(y, x);
      ++c.count;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dy == 0 && dx == 0) continue;
          if (connectivity == 4 && dy != 0 && dx != 0) continue;
          const int ny = y + dy, nx = x + dx;
          if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
          const long np = static_cast<long>(ny) * w + nx;
          if (mask.raw()[static_cast<std::size_t>(np)] == 0 ||
              labels.raw()[static_cast<std::size_t>(np)] >= 0)
            continue;
          labels.raw()[static_cast<std::size_t>(np)] = c.id;
          stack.push_back(np);
        }
    }
    comps.push_back(c);
  }

  if (static_cast<int>(comps.size()) <= max_n) return mask;

  std::vector<int> order(comps.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (comps[a].sum != comps[b].sum) return comps[a].sum > comps[b].sum;
    if (comps[a].count != comps[b].count) return comps[a].count > comps[b].count;
    return comps[a].first < comps[b].first;
  });

  std::vector<std::uint8_t> keep(comps.size(), 0);
  for (int i = 0; i < max_n; ++i) keep[static_cast<std::size_t>(order[i])] = 1;

  MaskFrame out(h, w, 0);
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask.raw()[i] != 0 && keep[static_cast<std::size_t>(labels.raw()[i])])
      out.raw()[i] = 1;
  return out;
}

MaskFrame initial_mask(const Grid2<double>& f0_frame, const MaskFrame* prev, int connectivity) {
  const int h = f0_frame.height(), w = f0_frame.width();
  if (prev && !prev->same_shape(MaskFrame(h, w)))
    throw std::invalid_argument("initial_mask: previous mask shape mismatch");

  double mean = 0.0;
  for (double v : f0_frame.raw()) mean += v;
  mean /= static_cast<double>(f0_frame.size());
  double var = 0.0;
  for (double v : f0_frame.raw()) var += (v - mean) * (v - mean);
  var /= static_cast<double>(f0_frame.size());
  const double beta = mean + std::sqrt(var);

  MaskFrame mask(h, w, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double delta = (prev && prev->at(y, x) != 0) ? 0.5 : 1.0;
      mask.at(y, x) = f0_frame.at(y, x) > beta * delta ? 1 : 0;
    }
  return keep_top_components(mask, f0_frame, 1, connectivity);
}

InitialEstimate compute_initial_estimate(const std::vector<FlowField>& flows,
                                         const std::vector<SaliencyMap>& vismaps,
                                         const MvsoParams& params) {
  if (vismaps.size() < 2)
    throw std::invalid_argument("compute_initial_estimate: need at least 2 frames");
  if (flows.size() + 1 != vismaps.size())
    throw std::invalid_argument(
        "compute_initial_estimate: need exactly one flow pair per frame transition");

  const FlowComponents comps = flow_components(flows, params.magnitude_sqrt);
  const SaliencyMeasures measures = saliency_measures(vismaps, comps, params);

  InitialEstimate est;
  est.f0 = initial_foreground(measures);
  est.f0_scaled = scale_f0(est.f0, params.scale_per_video);

  const int frames = est.f0.values.frames();
  est.m0 = MaskSequence(frames, est.f0.values.height(), est.f0.values.width(), 0);
  MaskFrame prev;
  for (int t = 0; t < frames; ++t) {
    const Grid2<double> f0_frame = est.f0_scaled.values.frame(t);
    const MaskFrame m = initial_mask(f0_frame, t == 0 ? nullptr : &prev, params.connectivity);
    est.m0.set_frame(t, m);
    prev = m;
  }
  return est;
}

}  // namespace svxgerry
