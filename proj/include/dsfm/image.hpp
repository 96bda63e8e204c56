#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dsfm/submodular.hpp"

namespace dsfm {

// 8-bit raster, row-major, channel-interleaved. channels is 1 (gray) or 3.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> data;

  int pixel_id(int x, int y) const { return y * width + x; }

  // Channels scaled to [0, 1]; gray replicated across all three.
  Eigen::Vector3d color(int x, int y) const;
};

// Binary PGM (P5) and PPM (P6), 8-bit only; '#' comments allowed in the
// header. Deeper rasters are refused rather than quantized.
Image read_pnm(std::istream& in);
Image load_pnm(const std::string& path);
void write_pnm(std::ostream& out, const Image& img);
void save_pnm(const std::string& path, const Image& img);

struct IngestParams {
  // Reference colors in [0, 1] for the label-cost surrogate.
  Eigen::Vector3d foreground = Eigen::Vector3d::Ones();
  Eigen::Vector3d background = Eigen::Vector3d::Zero();
  double lambda_pair = 1.0;    // 8-neighbor cuts; 0 disables
  double lambda_square = 0.0;  // 2x2 squares; 0 disables
  int region_count = 0;        // grown regions; 0 disables
  int region_size = 24;        // pixels per region, at most 30
  std::uint64_t seed = 0;      // region placement
};

// Segmentation energy over pixels (id = y*width + x):
//   - one unary per pixel, delta = ||v_p - fg||^2 - ||v_p - bg||^2;
//   - one edge cut per 8-neighbor pair, weight
//     lambda_pair * exp(-beta * ||v_i - v_j||^2) with
//     beta = 1 / (2 * mean squared neighbor color difference)
//     (beta = 0 on a constant image, so every weight is lambda_pair);
//   - one square per 2x2 block, (width-1)*(height-1) in all;
//   - region_count regions grown by breadth-first search from random seed
//     pixels, pairwise disjoint, each at most region_size pixels.
// Deterministic for fixed image and params. Requires at least 2x2.
DecomposableInstance image_to_instance(const Image& img,
                                       const IngestParams& params);

}  // namespace dsfm
