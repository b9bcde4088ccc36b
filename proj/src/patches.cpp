#include "dpp/patches.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace dpp::patches {

namespace {

int next_pgm_token(std::istream& is) {
  // skips whitespace and '#' comments
  while (true) {
    const int c = is.peek();
    if (c == EOF) throw ContractError("pgm: unexpected end of file");
    if (std::isspace(c)) {
      is.get();
      continue;
    }
    if (c == '#') {
      std::string line;
      std::getline(is, line);
      continue;
    }
    break;
  }
  int value = 0;
  if (!(is >> value)) throw ContractError("pgm: malformed header token");
  return value;
}

}  // namespace

GrayImage load_pgm(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ContractError("pgm: cannot open " + path);
  std::string magic;
  is >> magic;
  if (magic != "P2" && magic != "P5")
    throw ContractError("pgm: unsupported magic '" + magic + "'");
  const int width = next_pgm_token(is);
  const int height = next_pgm_token(is);
  const int maxval = next_pgm_token(is);
  if (width <= 0 || height <= 0) throw ContractError("pgm: bad dimensions");
  if (maxval != 255)
    throw ContractError("pgm: unsupported maxval " + std::to_string(maxval));

  GrayImage img{width, height, {}};
  img.pixels.resize(size_t(width) * height);
  if (magic == "P5") {
    is.get();  // single whitespace after maxval
    std::vector<unsigned char> raw(img.pixels.size());
    is.read(reinterpret_cast<char*>(raw.data()), raw.size());
    if (size_t(is.gcount()) != raw.size())
      throw ContractError("pgm: truncated payload");
    for (size_t i = 0; i < raw.size(); ++i) img.pixels[i] = raw[i] / 255.0;
  } else {
    for (auto& px : img.pixels) {
      const int v = next_pgm_token(is);
      if (v < 0 || v > 255) throw ContractError("pgm: pixel out of range");
      px = v / 255.0;
    }
  }
  return img;
}

void save_pgm(const GrayImage& img, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ContractError("pgm: cannot open for writing " + path);
  os << "P5\n" << img.width << ' ' << img.height << "\n255\n";
  std::vector<unsigned char> raw(img.pixels.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    const double v = std::clamp(img.pixels[i], 0.0, 1.0);
    raw[i] = static_cast<unsigned char>(std::lround(v * 255.0));
  }
  os.write(reinterpret_cast<const char*>(raw.data()), raw.size());
}

PatchSet extract_patches(const GrayImage& img, int w, int count, uint64_t seed) {
  if (w < 1 || w > img.width || w > img.height)
    throw ContractError("extract_patches: patch size does not fit the image");
  const int nx = img.width - w + 1;
  const int ny = img.height - w + 1;
  const int64_t valid = int64_t(nx) * ny;
  if (count < 1 || count > valid)
    throw ContractError("extract_patches: count exceeds valid positions");

  // Partial Fisher-Yates over the position grid.
  std::vector<int64_t> ids(valid);
  std::iota(ids.begin(), ids.end(), 0);
  Rng rng(seed);
  PatchSet out;
  out.w = w;
  for (int i = 0; i < count; ++i) {
    const int64_t j = i + int64_t(rng.below(uint64_t(valid - i)));
    std::swap(ids[i], ids[j]);
    const int x = static_cast<int>(ids[i] % nx);
    const int y = static_cast<int>(ids[i] / nx);
    out.positions.emplace_back(x, y);
    RealVec v(w * w);
    for (int dy = 0; dy < w; ++dy)
      for (int dx = 0; dx < w; ++dx) v(dy * w + dx) = img.at(x + dx, y + dy);
    out.vectors.push_back(std::move(v));
  }
  return out;
}

double median_bandwidth(const PatchSet& patches, int pair_budget, uint64_t seed,
                        double c) {
  if (c <= 0.0) throw ContractError("median_bandwidth: multiplier must be > 0");
  const int n = patches.count();
  if (n < 2) throw ContractError("median_bandwidth: need at least 2 patches");
  const int64_t all_pairs = int64_t(n) * (n - 1) / 2;

  std::vector<double> dists;
  Rng rng(seed);
  if (all_pairs <= pair_budget) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        dists.push_back((patches.vectors[i] - patches.vectors[j]).norm());
  } else {
    dists.reserve(pair_budget);
    for (int t = 0; t < pair_budget; ++t) {
      int i = static_cast<int>(rng.below(n));
      int j = static_cast<int>(rng.below(n - 1));
      if (j >= i) ++j;
      dists.push_back((patches.vectors[i] - patches.vectors[j]).norm());
    }
  }
  const size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
  const double median = dists[mid];
  if (median <= 0.0)
    throw DomainError("median_bandwidth: all sampled patches are identical");
  return c * median;
}

SampleSet select_uniform(const PatchSet& patches, int k, uint64_t seed) {
  const int n = patches.count();
  if (k < 0 || k > n) throw ContractError("select_uniform: k out of range");
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  Rng rng(seed);
  SampleSet s;
  s.seed = seed;
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(rng.below(uint64_t(n - i)));
    std::swap(ids[i], ids[j]);
    s.indices.push_back(ids[i]);
  }
  std::sort(s.indices.begin(), s.indices.end());
  return s;
}

Reconstruction reconstruct(const GrayImage& original, const PatchSet& patches,
                           const SampleSet& selected, int w) {
  if (selected.indices.empty())
    throw ContractError("reconstruct: empty selection");
  for (int i : selected.indices)
    if (i < 0 || i >= patches.count())
      throw ContractError("reconstruct: selection index out of range");

  const int width = original.width, height = original.height;
  std::vector<double> acc(size_t(width) * height, 0.0);
  std::vector<int> hits(size_t(width) * height, 0);

  // Stride-w grid; last row/column anchored flush to the border.
  std::vector<int> xs, ys;
  for (int x = 0; x + w <= width; x += w) xs.push_back(x);
  if (xs.empty() || xs.back() + w < width) xs.push_back(width - w);
  for (int y = 0; y + w <= height; y += w) ys.push_back(y);
  if (ys.empty() || ys.back() + w < height) ys.push_back(height - w);

  RealVec block(w * w);
  for (int y0 : ys) {
    for (int x0 : xs) {
      for (int dy = 0; dy < w; ++dy)
        for (int dx = 0; dx < w; ++dx)
          block(dy * w + dx) = original.at(x0 + dx, y0 + dy);
      int best = selected.indices.front();
      double best_d = std::numeric_limits<double>::infinity();
      for (int i : selected.indices) {
        const double d = (patches.vectors[i] - block).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = i;
        }
      }
      const RealVec& src = patches.vectors[best];
      for (int dy = 0; dy < w; ++dy)
        for (int dx = 0; dx < w; ++dx) {
          const size_t idx = size_t(y0 + dy) * width + (x0 + dx);
          acc[idx] += src(dy * w + dx);
          ++hits[idx];
        }
    }
  }

  Reconstruction out;
  out.image = GrayImage{width, height, {}};
  out.image.pixels.resize(acc.size());
  double err = 0.0;
  for (size_t i = 0; i < acc.size(); ++i) {
    out.image.pixels[i] = hits[i] > 0 ? acc[i] / hits[i] : original.pixels[i];
    const double d = out.image.pixels[i] - original.pixels[i];
    err += d * d;
  }
  out.mse = err / double(acc.size());
  return out;
}

GrayImage synthetic_texture(int width, int height, uint64_t seed) {
  GrayImage img{width, height, {}};
  img.pixels.resize(size_t(width) * height);
  Rng rng(seed);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const bool left = x < width / 2;
      const bool top = y < height / 2;
      double v;
      if (left && top) {
        v = 0.5 + 0.45 * std::sin(2.0 * M_PI * x / 7.0);  // vertical stripes
      } else if (!left && top) {
        v = 0.5 + 0.45 * std::sin(2.0 * M_PI * y / 5.0);  // horizontal stripes
      } else if (left) {
        v = ((x / 4 + y / 4) % 2) ? 0.85 : 0.15;  // checkerboard
      } else {
        v = double(x - width / 2) / double(width / 2) * 0.7 +
            0.15 * std::sin(2.0 * M_PI * (x + 2 * y) / 11.0);  // slanted ramp
      }
      v += 0.03 * (rng.uniform() - 0.5);
      img.at(x, y) = std::clamp(v, 0.0, 1.0);
    }
  }
  return img;
}

}  // namespace dpp::patches
