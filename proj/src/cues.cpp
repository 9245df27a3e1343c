#include "svxgerry/cues.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace svxgerry {

namespace {

Grid2<double> to_gray(const Grid2<Rgb8>& img) {
  Grid2<double> g(img.height(), img.width());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const Rgb8 p = img.raw()[i];
    g.raw()[i] = 0.299 * p.r + 0.587 * p.g + 0.114 * p.b;
  }
  return g;
}

Grid2<double> half_scale(const Grid2<double>& g) {
  const int oh = (g.height() + 1) / 2, ow = (g.width() + 1) / 2;
  Grid2<double> out(oh, ow);
  for (int oy = 0; oy < oh; ++oy) {
    const int y0 = oy * 2, y1 = std::min(y0 + 2, g.height());
    for (int ox = 0; ox < ow; ++ox) {
      const int x0 = ox * 2, x1 = std::min(x0 + 2, g.width());
      double sum = 0.0;
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) sum += g.at(y, x);
      out.at(oy, ox) = sum / ((y1 - y0) * (x1 - x0));
    }
  }
  return out;
}

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

double patch_sad(const Grid2<double>& a, const Grid2<double>& b, int ay, int ax, int by, int bx,
                 int patch) {
  const int off = patch / 2 - 1;  // patch 8 covers [-3, +4]
  double cost = 0.0;
  for (int dy = -off; dy < patch - off; ++dy) {
    const int ya = clampi(ay + dy, 0, a.height() - 1);
    const int yb = clampi(by + dy, 0, b.height() - 1);
    for (int dx = -off; dx < patch - off; ++dx) {
      const int xa = clampi(ax + dx, 0, a.width() - 1);
      const int xb = clampi(bx + dx, 0, b.width() - 1);
      cost += std::fabs(a.at(ya, xa) - b.at(yb, xb));
    }
  }
  return cost;
}

struct IntFlow {
  Grid2<int> u, v;
  IntFlow(int h, int w) : u(h, w, 0), v(h, w, 0) {}
};

IntFlow match_level(const Grid2<double>& a, const Grid2<double>& b, const IntFlow* init,
                    const FlowParams& p) {
  const int h = a.height(), w = a.width();
  IntFlow flow(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int iu = 0, iv = 0;
      if (init) {
        iu = 2 * init->u.at(y / 2, x / 2);
        iv = 2 * init->v.at(y / 2, x / 2);
      }
      double best_cost = 0.0;
      long best_l1 = 0;
      int best_u = 0, best_v = 0;
      bool first = true;
      auto consider = [&](int tu, int tv) {
        const double cost = patch_sad(a, b, y, x, y + tv, x + tu, p.patch);
        const long l1 = std::labs(tu) + std::labs(tv);
        const bool better =
            first || cost < best_cost ||
            (cost == best_cost &&
             (l1 < best_l1 || (l1 == best_l1 && (tu < best_u || (tu == best_u && tv < best_v)))));
        if (better) {
          best_cost = cost;
          best_l1 = l1;
          best_u = tu;
          best_v = tv;
          first = false;
        }
      };
      // a bad seed must not strand the search away from small true motion,
      // so the zero-centered window is always searched alongside the seeded one
      for (int dv = -p.radius; dv <= p.radius; ++dv)
        for (int du = -p.radius; du <= p.radius; ++du) {
          consider(iu + du, iv + dv);
          if (iu != 0 || iv != 0) consider(du, dv);
        }
      flow.u.at(y, x) = best_u;
      flow.v.at(y, x) = best_v;
    }
  }
  return flow;
}

Grid2<double> median3x3(const Grid2<double>& g) {
  Grid2<double> out(g.height(), g.width());
  double window[9];
  for (int y = 0; y < g.height(); ++y)
    for (int x = 0; x < g.width(); ++x) {
      int n = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx)
          window[n++] = g.at(clampi(y + dy, 0, g.height() - 1), clampi(x + dx, 0, g.width() - 1));
      std::nth_element(window, window + 4, window + 9);
      out.at(y, x) = window[4];
    }
  return out;
}

}  // namespace

FlowField estimate_flow(const Grid2<Rgb8>& a, const Grid2<Rgb8>& b, const FlowParams& params) {
  if (!a.same_shape(b)) throw std::invalid_argument("estimate_flow: frame size mismatch");

  std::vector<Grid2<double>> pa{to_gray(a)}, pb{to_gray(b)};
  while (static_cast<int>(pa.size()) < params.levels &&
         std::min(pa.back().height(), pa.back().width()) >= 2 * params.patch) {
    pa.push_back(half_scale(pa.back()));
    pb.push_back(half_scale(pb.back()));
  }

  IntFlow flow = match_level(pa.back(), pb.back(), nullptr, params);
  for (int level = static_cast<int>(pa.size()) - 2; level >= 0; --level)
    flow = match_level(pa[level], pb[level], &flow, params);

  FlowField out(a.height(), a.width());
  for (std::size_t i = 0; i < out.u.size(); ++i) {
    out.u.raw()[i] = flow.u.raw()[i];
    out.v.raw()[i] = flow.v.raw()[i];
  }
  out.u = median3x3(out.u);
  out.v = median3x3(out.v);
  return out;
}

SaliencyMap estimate_saliency(const Grid2<Rgb8>& frame) {
  const int h = frame.height(), w = frame.width();
  Grid2<Lab> lab(h, w);
  double gl = 0.0, ga = 0.0, gb = 0.0;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    lab.raw()[i] = rgb_to_lab(frame.raw()[i]);
    gl += lab.raw()[i].l;
    ga += lab.raw()[i].a;
    gb += lab.raw()[i].b;
  }
  const double n = static_cast<double>(frame.size());
  gl /= n;
  ga /= n;
  gb /= n;

  SaliencyMap map(h, w);
  double lo = 0.0, hi = 0.0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double ml = 0.0, ma = 0.0, mb = 0.0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const Lab& c = lab.at(clampi(y + dy, 0, h - 1), clampi(x + dx, 0, w - 1));
          ml += c.l;
          ma += c.a;
          mb += c.b;
        }
      ml /= 9.0;
      ma /= 9.0;
      mb /= 9.0;
      const double d = std::sqrt((ml - gl) * (ml - gl) + (ma - ga) * (ma - ga) +
                                 (mb - gb) * (mb - gb));
      map.at(y, x) = d;
      if (y == 0 && x == 0) {
        lo = hi = d;
      } else {
        lo = std::min(lo, d);
        hi = std::max(hi, d);
      }
    }

  if (hi <= lo) {
    std::fill(map.raw().begin(), map.raw().end(), 0.0);
  } else {
    for (double& v : map.raw()) v = (v - lo) / (hi - lo);
  }
  return map;
}

}  // namespace svxgerry
