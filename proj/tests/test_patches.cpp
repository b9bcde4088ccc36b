#include "dpp/patches.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "doctest.h"

using namespace dpp;
using namespace dpp::patches;

namespace {

GrayImage constant_image(int w, int h, double v) {
  GrayImage img;
  img.width = w;
  img.height = h;
  img.pixels.assign(size_t(w) * h, v);
  return img;
}

}  // namespace

TEST_CASE("pgm parsing") {
  {
    std::ofstream f("tiny.pgm");
    f << "P2\n1 1\n255\n255\n";
  }
  const auto img = load_pgm("tiny.pgm");
  CHECK(img.width == 1);
  CHECK(img.height == 1);
  CHECK(img.at(0, 0) == doctest::Approx(1.0));
  std::remove("tiny.pgm");
}

TEST_CASE("pgm save/load round-trip") {
  GrayImage img;
  img.width = img.height = 16;
  Rng rng(4);
  for (int i = 0; i < 256; ++i)
    img.pixels.push_back(double(rng.below(256)) / 255.0);
  save_pgm(img, "roundtrip.pgm");
  const auto back = load_pgm("roundtrip.pgm");
  REQUIRE(back.width == 16);
  REQUIRE(back.height == 16);
  for (int i = 0; i < 256; ++i)
    CHECK(back.pixels[i] == doctest::Approx(img.pixels[i]).epsilon(1e-12));
  std::remove("roundtrip.pgm");
}

TEST_CASE("pgm rejects 16-bit maxval") {
  {
    std::ofstream f("deep.pgm");
    f << "P2\n1 1\n65535\n65535\n";
  }
  CHECK_THROWS_AS(load_pgm("deep.pgm"), ContractError);
  std::remove("deep.pgm");
}

TEST_CASE("patch extraction") {
  const auto img = constant_image(8, 8, 0.25);
  auto ps = extract_patches(img, 8, 1, 0);
  REQUIRE(ps.count() == 1);
  CHECK(ps.vectors[0].size() == 64);
  CHECK(ps.positions[0] == std::pair<int, int>{0, 0});

  const auto img2 = constant_image(12, 10, 0.5);
  const auto a = extract_patches(img2, 4, 6, 9);
  const auto b = extract_patches(img2, 4, 6, 9);
  CHECK(a.positions == b.positions);

  CHECK_THROWS_AS(extract_patches(img, 9, 1, 0), ContractError);
}

TEST_CASE("median bandwidth") {
  PatchSet ps;
  ps.w = 1;
  ps.vectors.push_back(RealVec::Zero(2));
  ps.vectors.push_back(RealVec::Zero(2));
  ps.vectors[1](0) = 3.0;
  CHECK(median_bandwidth(ps, 100, 1) == doctest::Approx(3.0));
  CHECK(median_bandwidth(ps, 100, 1, 2.0) == doctest::Approx(6.0));

  // Three patches all at pairwise distance sqrt(2).
  PatchSet tri;
  tri.w = 1;
  for (int i = 0; i < 3; ++i) {
    tri.vectors.push_back(RealVec::Zero(3));
    tri.vectors.back()(i) = 1.0;
  }
  CHECK(median_bandwidth(tri, 100, 1) == doctest::Approx(std::sqrt(2.0)));

  // Subsampled median is close to the full-pair median.
  PatchSet big;
  big.w = 1;
  Rng rng(6);
  for (int i = 0; i < 100; ++i) {
    RealVec v(4);
    for (int j = 0; j < 4; ++j) v(j) = rng.normal();
    big.vectors.push_back(v);
  }
  const double full = median_bandwidth(big, 100 * 99 / 2, 1);
  const double sub = median_bandwidth(big, 1000, 2);
  CHECK(std::abs(sub - full) / full < 0.10);

  PatchSet dup;
  dup.w = 1;
  dup.vectors.assign(2, RealVec::Zero(2));
  CHECK_THROWS_AS(median_bandwidth(dup, 10, 1), DomainError);
}

TEST_CASE("uniform selection") {
  PatchSet ps;
  ps.w = 1;
  ps.vectors.assign(6, RealVec::Zero(1));
  const auto all = select_uniform(ps, 6, 3);
  CHECK(all.indices == IndexSet{0, 1, 2, 3, 4, 5});
  CHECK(select_uniform(ps, 0, 3).indices.empty());
  CHECK(select_uniform(ps, 3, 8).indices == select_uniform(ps, 3, 8).indices);
  CHECK_THROWS_AS(select_uniform(ps, 7, 1), ContractError);
}

TEST_CASE("reconstruction mse") {
  // Constant image: any selection reconstructs perfectly.
  const auto flat = constant_image(16, 16, 0.5);
  const auto ps = extract_patches(flat, 4, 5, 1);
  SampleSet sel;
  sel.indices = {0, 2};
  const auto rec = reconstruct(flat, ps, sel, 4);
  CHECK(rec.mse == doctest::Approx(0.0));

  // A patch set containing every grid block exactly reproduces the image.
  const auto tex = synthetic_texture(16, 16, 3);
  PatchSet grid;
  grid.w = 4;
  for (int y = 0; y + 4 <= 16; y += 4)
    for (int x = 0; x + 4 <= 16; x += 4) {
      grid.positions.emplace_back(x, y);
      RealVec v(16);
      for (int dy = 0; dy < 4; ++dy)
        for (int dx = 0; dx < 4; ++dx) v(dy * 4 + dx) = tex.at(x + dx, y + dy);
      grid.vectors.push_back(v);
    }
  SampleSet every;
  every.indices.resize(grid.count());
  for (int i = 0; i < grid.count(); ++i) every.indices[i] = i;
  const auto perfect = reconstruct(tex, grid, every, 4);
  CHECK(perfect.mse == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("synthetic texture is deterministic and in range") {
  const auto a = synthetic_texture(32, 32, 5);
  const auto b = synthetic_texture(32, 32, 5);
  CHECK(a.pixels == b.pixels);
  CHECK(*std::min_element(a.pixels.begin(), a.pixels.end()) >= 0.0);
  CHECK(*std::max_element(a.pixels.begin(), a.pixels.end()) <= 1.0);
  // Distinct regions: the texture is not constant.
  CHECK(*std::max_element(a.pixels.begin(), a.pixels.end()) >
        *std::min_element(a.pixels.begin(), a.pixels.end()));
}
