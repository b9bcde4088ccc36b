#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dpp/common.hpp"

namespace dpp::patches {

// Row-major grayscale image with intensities in [0, 1] (8-bit source
// scaled by 1/255).
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;

  double& at(int x, int y) { return pixels[size_t(y) * width + x]; }
  double at(int x, int y) const { return pixels[size_t(y) * width + x]; }
};

// PGM (P2 ascii / P5 binary), maxval 255 only.
GrayImage load_pgm(const std::string& path);
void save_pgm(const GrayImage& img, const std::string& path);

struct PatchSet {
  int w = 0;                                    // patch side
  std::vector<std::pair<int, int>> positions;   // top-left (x, y)
  std::vector<RealVec> vectors;                 // w*w flattened patches

  int count() const { return static_cast<int>(vectors.size()); }
};

// Uniform sampling without replacement of top-left positions.
PatchSet extract_patches(const GrayImage& img, int w, int count, uint64_t seed);

// s = c * median of Euclidean interdistances over up to pair_budget
// uniformly sampled unordered pairs.
double median_bandwidth(const PatchSet& patches, int pair_budget, uint64_t seed,
                        double c = 1.0);

// Uniform selection of exactly k patch indices, without replacement.
SampleSet select_uniform(const PatchSet& patches, int k, uint64_t seed);

struct Reconstruction {
  GrayImage image;
  double mse = 0.0;
};

// Tiles the image with stride-w blocks (last row/column anchored flush to
// the border, overlaps averaged); each block becomes the nearest selected
// patch in Euclidean distance.
Reconstruction reconstruct(const GrayImage& original, const PatchSet& patches,
                           const SampleSet& selected, int w);

// Deterministic multi-region test texture (stripes, checks, blobs,
// gradient); used by tests and available to regenerate the bundled image.
GrayImage synthetic_texture(int width, int height, uint64_t seed);

}  // namespace dpp::patches
