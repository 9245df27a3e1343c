#include <cstdint>
#include <fstream>
#include <map>
#include <vector>

#include "doctest.h"
#include "svxgerry/io.hpp"
#include "synthetic.hpp"

using namespace svxgerry;
using testsupport::Rng;
using testsupport::TempDir;

namespace {

Grid2<Rgb8> random_image(Rng& rng, int h, int w) {
  Grid2<Rgb8> img(h, w);
  for (auto& px : img.raw())
    px = {static_cast<std::uint8_t>(rng.range(0, 255)),
          static_cast<std::uint8_t>(rng.range(0, 255)),
          static_cast<std::uint8_t>(rng.range(0, 255))};
  return img;
}

}  // namespace

TEST_CASE("png rgb round trip") {
  TempDir tmp;
  Rng rng(7);
  const Grid2<Rgb8> img = random_image(rng, 13, 7);
  const auto file = tmp.path() / "img.png";
  write_image_rgb(file, img);
  CHECK(read_image_rgb(file) == img);
}

TEST_CASE("png gray round trips keep bit depth") {
  TempDir tmp;
  Rng rng(8);

  Grid2<std::uint8_t> g8(5, 9);
  for (auto& v : g8.raw()) v = static_cast<std::uint8_t>(rng.range(0, 255));
  write_image_gray8(tmp.path() / "g8.png", g8);
  int max_value = 0;
  const auto r8 = read_image_gray(tmp.path() / "g8.png", max_value);
  CHECK(max_value == 255);
  REQUIRE(r8.same_shape(Grid2<std::uint16_t>(5, 9)));
  for (std::size_t i = 0; i < g8.size(); ++i) CHECK(r8.raw()[i] == g8.raw()[i]);

  Grid2<std::uint16_t> g16(4, 3);
  for (auto& v : g16.raw()) v = static_cast<std::uint16_t>(rng.range(0, 65535));
  write_image_gray16(tmp.path() / "g16.png", g16);
  const auto r16 = read_image_gray(tmp.path() / "g16.png", max_value);
  CHECK(max_value == 65535);
  CHECK(r16 == g16);
}

TEST_CASE("ppm read and write") {
  TempDir tmp;

  // hand-built P6 payload
  const auto raw = tmp.path() / "hand.ppm";
  {
    std::ofstream out(raw, std::ios::binary);
    out << "P6\n3 2\n255\n";
    const std::uint8_t px[18] = {255, 0, 0, 0, 255, 0, 0, 0,   255,
                                 9,   8, 7, 1, 2,   3, 4, 250, 6};
    out.write(reinterpret_cast<const char*>(px), sizeof px);
  }
  const Grid2<Rgb8> img = read_image_rgb(raw);
  REQUIRE(img.height() == 2);
  REQUIRE(img.width() == 3);
  CHECK(img.at(0, 0) == Rgb8{255, 0, 0});
  CHECK(img.at(0, 2) == Rgb8{0, 0, 255});
  CHECK(img.at(1, 1) == Rgb8{1, 2, 3});

  // writer round trip through the .ppm extension
  write_image_rgb(tmp.path() / "copy.ppm", img);
  CHECK(read_image_rgb(tmp.path() / "copy.ppm") == img);
}

TEST_CASE("flo round trip is float exact") {
  TempDir tmp;
  FlowField f(4, 5);
  Rng rng(9);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 5; ++x) {
      f.u.at(y, x) = static_cast<float>((rng.uniform() - 0.5) * 100.0);
      f.v.at(y, x) = static_cast<float>((rng.uniform() - 0.5) * 100.0);
    }
  f.u.at(0, 0) = -0.0;
  f.v.at(0, 0) = 3.25f;

  const auto file = tmp.path() / "pair.flo";
  write_flo(file, f);
  const FlowField r = read_flo(file);
  REQUIRE(r.same_shape(f));
  for (std::size_t i = 0; i < f.u.size(); ++i) {
    CHECK(static_cast<float>(r.u.raw()[i]) == static_cast<float>(f.u.raw()[i]));
    CHECK(static_cast<float>(r.v.raw()[i]) == static_cast<float>(f.v.raw()[i]));
  }

  // corrupt magic
  {
    std::ofstream out(tmp.path() / "bad.flo", std::ios::binary);
    out << "nonsense";
  }
  CHECK_THROWS_AS(read_flo(tmp.path() / "bad.flo"), FormatError);
}

TEST_CASE("frame listing is numeric, then lexicographic") {
  TempDir tmp;
  for (const char* name : {"10.png", "0001.png", "00002.png", "frame_3.png", "a.png"})
    std::ofstream(tmp.path() / name) << "x";

  const auto files = list_frames(tmp.path(), {".png"});
  REQUIRE(files.size() == 5);
  CHECK(files[0].filename() == "a.png");        // no digits sorts first
  CHECK(files[1].filename() == "0001.png");
  CHECK(files[2].filename() == "00002.png");
  CHECK(files[3].filename() == "frame_3.png");
  CHECK(files[4].filename() == "10.png");
}

TEST_CASE("mask sequence round trip") {
  TempDir tmp;
  Rng rng(11);
  MaskSequence masks(3, 6, 8, 0);
  for (auto& v : masks.raw()) v = rng.uniform() < 0.4 ? 1 : 0;

  write_masks(masks, tmp.path() / "m");
  CHECK(load_ground_truth(tmp.path() / "m") == masks);
}

TEST_CASE("ground truth accepts gray16 and rgb encodings") {
  TempDir tmp;

  const auto d16 = tmp.path() / "g16";
  std::filesystem::create_directories(d16);
  Grid2<std::uint16_t> g(2, 2, 0);
  g.at(0, 1) = 65535;
  g.at(1, 0) = 1;
  write_image_gray16(d16 / "0.png", g);
  write_image_gray16(d16 / "1.png", g);
  const MaskSequence m = load_ground_truth(d16);
  CHECK(m.at(0, 0, 0) == 0);
  CHECK(m.at(0, 0, 1) == 1);
  CHECK(m.at(0, 1, 0) == 1);

  const auto drgb = tmp.path() / "rgb";
  std::filesystem::create_directories(drgb);
  Grid2<Rgb8> c(2, 2, Rgb8{0, 0, 0});
  c.at(1, 1) = {0, 7, 0};
  write_image_rgb(drgb / "0.png", c);
  write_image_rgb(drgb / "1.png", c);
  const MaskSequence mc = load_ground_truth(drgb);
  CHECK(mc.at(0, 0, 0) == 0);
  CHECK(mc.at(0, 1, 1) == 1);
}

TEST_CASE("supervoxel label color round trip keeps the partition") {
  TempDir tmp;
  Rng rng(12);
  LabelGrid labels(2, 4, 4);
  for (auto& v : labels.raw()) v = rng.range(0, 5);
  labels.at(0, 0, 0) = 300;  // exercise the g channel of the color key

  write_supervoxel_labels(tmp.path() / "svx", labels);
  const LabelGrid back = load_supervoxel_labels(tmp.path() / "svx", 2);
  REQUIRE(back.same_shape(labels));

  std::map<std::int32_t, std::int32_t> fwd, rev;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto a = labels.raw()[i], b = back.raw()[i];
    const auto f = fwd.find(a);
    if (f == fwd.end())
      fwd[a] = b;
    else
      CHECK(f->second == b);
    const auto r = rev.find(b);
    if (r == rev.end())
      rev[b] = a;
    else
      CHECK(r->second == a);
  }
}

TEST_CASE("label loader assigns first appearance ids") {
  TempDir tmp;
  const auto dir = tmp.path() / "svx";
  std::filesystem::create_directories(dir);

  Grid2<Rgb8> f0(1, 3);
  f0.at(0, 0) = {9, 9, 9};
  f0.at(0, 1) = {1, 2, 3};
  f0.at(0, 2) = {9, 9, 9};
  Grid2<Rgb8> f1(1, 3);
  f1.at(0, 0) = {1, 2, 3};
  f1.at(0, 1) = {200, 0, 0};
  f1.at(0, 2) = {200, 0, 0};
  write_image_rgb(dir / "0.png", f0);
  write_image_rgb(dir / "1.png", f1);

  const LabelGrid l = load_supervoxel_labels(dir);
  CHECK(l.at(0, 0, 0) == 0);
  CHECK(l.at(0, 0, 1) == 1);
  CHECK(l.at(0, 0, 2) == 0);
  CHECK(l.at(1, 0, 0) == 1);
  CHECK(l.at(1, 0, 1) == 2);
  CHECK(l.at(1, 0, 2) == 2);

  CHECK_THROWS_AS(load_supervoxel_labels(dir, 3), FormatError);
}

TEST_CASE("missing inputs fail loudly") {
  TempDir tmp;
  CHECK_THROWS_AS(read_image_rgb(tmp.path() / "nope.png"), std::runtime_error);
  CHECK_THROWS_AS(load_frames(tmp.path() / "nothing"), std::runtime_error);
}
