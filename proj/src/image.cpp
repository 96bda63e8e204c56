#include "dsfm/image.hpp"

#include <cmath>
#include <fstream>
#include <queue>

#include "dsfm/potentials.hpp"
#include "dsfm/rng.hpp"

namespace dsfm {

namespace {

[[noreturn]] void raster_fail(const std::string& what) {
  fail(ErrorCategory::parse, "raster: " + what);
}

// Whitespace- and comment-skipping header token.
std::string pnm_token(std::istream& in) {
  std::string t;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(c)) break;
  }
  if (c == EOF) raster_fail("truncated header");
  for (; c != EOF && !std::isspace(c) && c != '#'; c = in.get())
    t.push_back(static_cast<char>(c));
  if (c == '#') in.unget();
  return t;
}

int pnm_int(std::istream& in, const char* what, int lo, int hi) {
  const std::string t = pnm_token(in);
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(t, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != t.size())
    raster_fail(std::string("bad ") + what + " '" + t + "'");
  if (v < lo || v > hi)
    raster_fail(std::string(what) + " " + t + " out of range [" +
                std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return v;
}

}  // namespace

Eigen::Vector3d Image::color(int x, int y) const {
  const std::size_t at = std::size_t(pixel_id(x, y)) * channels;
  if (channels == 1) {
    const double g = data[at] / 255.0;
    return {g, g, g};
  }
  return {data[at] / 255.0, data[at + 1] / 255.0, data[at + 2] / 255.0};
}

Image read_pnm(std::istream& in) {
  const std::string magic = pnm_token(in);
  Image img;
  if (magic == "P5")
    img.channels = 1;
  else if (magic == "P6")
    img.channels = 3;
  else
    raster_fail("unsupported magic '" + magic + "' (want binary P5 or P6)");
  img.width = pnm_int(in, "width", 1, 1 << 16);
  img.height = pnm_int(in, "height", 1, 1 << 16);
  const int maxval = pnm_int(in, "maxval", 1, 65535);
  if (maxval > 255)
    fail(ErrorCategory::capability,
         "raster: 16-bit samples (maxval " + std::to_string(maxval) +
             ") unsupported; expect 8-bit");
  // The single whitespace byte after maxval was consumed by the tokenizer.
  const std::size_t want =
      std::size_t(img.width) * img.height * img.channels;
  img.data.resize(want);
  in.read(reinterpret_cast<char*>(img.data.data()),
          static_cast<std::streamsize>(want));
  if (static_cast<std::size_t>(in.gcount()) != want)
    raster_fail("payload truncated: want " + std::to_string(want) +
                " bytes, got " + std::to_string(in.gcount()));
  return img;
}

Image load_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCategory::invalid_input, "cannot open '" + path + "'");
  try {
    return read_pnm(in);
  } catch (const Error& e) {
    fail(e.category(), path + ": " + e.what());
  }
}

void write_pnm(std::ostream& out, const Image& img) {
  if (img.width < 1 || img.height < 1 ||
      (img.channels != 1 && img.channels != 3) ||
      img.data.size() != std::size_t(img.width) * img.height * img.channels)
    fail(ErrorCategory::invalid_input, "malformed raster");
  out << (img.channels == 1 ? "P5" : "P6") << "\n"
      << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size()));
}

void save_pnm(const std::string& path, const Image& img) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCategory::invalid_input, "cannot open '" + path + "'");
  write_pnm(out, img);
  if (!out.flush()) fail(ErrorCategory::invalid_input, "write failed: " + path);
}

DecomposableInstance image_to_instance(const Image& img,
                                       const IngestParams& params) {
  const int W = img.width, H = img.height;
  if (W < 2 || H < 2)
    fail(ErrorCategory::invalid_input,
         "image too small: need at least 2x2, got " + std::to_string(W) + "x" +
             std::to_string(H));
  if (params.region_count > 0 &&
      (params.region_size < 2 || params.region_size > 30))
    fail(ErrorCategory::invalid_input,
         "region size must lie in [2, 30], got " +
             std::to_string(params.region_size));

  std::vector<std::unique_ptr<SubmodularPotential>> pots;

  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      const Eigen::Vector3d c = img.color(x, y);
      const double delta = (c - params.foreground).squaredNorm() -
                           (c - params.background).squaredNorm();
      pots.push_back(std::make_unique<UnaryPotential>(img.pixel_id(x, y), delta));
    }

  if (params.lambda_pair > 0) {
    // Right, down, and the two down diagonals cover each 8-neighbor pair once.
    static constexpr int kStep[4][2] = {{1, 0}, {0, 1}, {1, 1}, {1, -1}};
    std::vector<std::pair<int, int>> pairs;
    std::vector<double> dist2;
    double mean = 0;
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x)
        for (const auto& s : kStep) {
          const int nx = x + s[0], ny = y + s[1];
          if (nx < 0 || nx >= W || ny < 0 || ny >= H) continue;
          pairs.emplace_back(img.pixel_id(x, y), img.pixel_id(nx, ny));
          dist2.push_back((img.color(x, y) - img.color(nx, ny)).squaredNorm());
          mean += dist2.back();
        }
    mean /= static_cast<double>(pairs.size());
    const double beta = mean > 0 ? 1.0 / (2.0 * mean) : 0.0;
    for (std::size_t j = 0; j < pairs.size(); ++j)
      pots.push_back(std::make_unique<EdgeCutPotential>(
          pairs[j].first, pairs[j].second,
          params.lambda_pair * std::exp(-beta * dist2[j])));
  }

  if (params.lambda_square > 0)
    for (int y = 0; y + 1 < H; ++y)
      for (int x = 0; x + 1 < W; ++x)
        pots.push_back(std::make_unique<SquarePotential>(
            img.pixel_id(x, y), img.pixel_id(x + 1, y), img.pixel_id(x, y + 1),
            img.pixel_id(x + 1, y + 1), params.lambda_square));

  if (params.region_count > 0) {
    Rng rng(params.seed);
    std::vector<char> claimed(std::size_t(W) * H, 0);
    for (int k = 0; k < params.region_count; ++k) {
      int seed_px = -1;
      for (int probe = 0; probe < 4 * W * H && seed_px < 0; ++probe) {
        const int p = rng.uniform_int(W * H);
        if (!claimed[p]) seed_px = p;
      }
      if (seed_px < 0)
        for (int p = 0; p < W * H && seed_px < 0; ++p)
          if (!claimed[p]) seed_px = p;
      if (seed_px < 0) break;
      std::vector<int> members;
      std::queue<int> frontier;
      frontier.push(seed_px);
      claimed[seed_px] = 1;
      while (!frontier.empty() &&
             static_cast<int>(members.size()) < params.region_size) {
        const int p = frontier.front();
        frontier.pop();
        members.push_back(p);
        const int x = p % W, y = p / W;
        const int neigh[4] = {x + 1 < W ? p + 1 : -1, x > 0 ? p - 1 : -1,
                              y + 1 < H ? p + W : -1, y > 0 ? p - W : -1};
        for (int q : neigh)
          if (q >= 0 && !claimed[q] &&
              static_cast<int>(members.size() + frontier.size()) <
                  params.region_size) {
            claimed[q] = 1;
            frontier.push(q);
          }
      }
      while (!frontier.empty()) {
        members.push_back(frontier.front());
        frontier.pop();
      }
      if (members.size() >= 2)
        pots.push_back(std::make_unique<RegionPotential>(std::move(members)));
    }
  }

  return DecomposableInstance(GroundSet(W * H), std::move(pots));
}

}  // namespace dsfm
