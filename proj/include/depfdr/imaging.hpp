#pragma once

// Lattice restoration by pixel-wise testing, and binary PGM/PPM rendering.
//
// PGM (P5): H = 1 is black (0), H = 0 is white (255).
// PPM (P6): TN white, TP black, FP red, FN blue.

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "depfdr/empirical_proc.hpp"
#include "depfdr/field_gen.hpp"
#include "depfdr/testing_procedures.hpp"

namespace depfdr {

enum class Label : std::uint8_t { TN, TP, FP, FN };

struct ClassificationGrid {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<Label> labels;  // row-major

  std::size_t count(Label l) const {
    std::size_t c = 0;
    for (Label x : labels) c += (x == l) ? 1 : 0;
    return c;
  }
};

namespace detail {

// (height, width) of a 1-D or 2-D shape; 1-D shapes render as a single row.
inline std::array<std::size_t, 2> raster_shape(const std::vector<std::size_t>& dims) {
  if (dims.size() == 1) return {1, dims[0]};
  if (dims.size() == 2) return {dims[0], dims[1]};
  throw std::invalid_argument("only 1-D and 2-D fields can be rendered");
}

}  // namespace detail

/// Estimated field: site s is 1 iff the chosen procedure rejects it.
inline HypothesisField restore_field(const PValueSample& sample, const ProcedureConfig& config, Procedure procedure) {
  const auto& dims = sample.dims();
  if (!(dims.size() == 2 && dims[0] == dims[1])) throw std::invalid_argument("restoration needs a square lattice sample");
  const TestResult result = run_procedure(procedure, sample, config);
  return {dims, result.rejected, {"estimate", "procedure=" + to_string(procedure), 0}};
}

inline ClassificationGrid diff_map(const HypothesisField& truth, const HypothesisField& estimate) {
  if (truth.dims() != estimate.dims()) throw std::invalid_argument("truth and estimate dimensions differ");
  const auto [h, w] = detail::raster_shape(truth.dims());
  ClassificationGrid g{h, w, std::vector<Label>(truth.size())};
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] != 0, e = estimate[i] != 0;
    g.labels[i] = t ? (e ? Label::TP : Label::FN) : (e ? Label::FP : Label::TN);
  }
  return g;
}

inline std::string write_pgm(const HypothesisField& field) {
  const auto [h, w] = detail::raster_shape(field.dims());
  std::string out = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  out.reserve(out.size() + field.size());
  for (std::uint8_t v : field.values()) out.push_back(static_cast<char>(v ? 0 : 255));
  return out;
}

inline std::array<std::uint8_t, 3> label_color(Label l) {
  switch (l) {
    case Label::TN: return {255, 255, 255};
    case Label::TP: return {0, 0, 0};
    case Label::FP: return {255, 0, 0};
    case Label::FN: return {0, 0, 255};
  }
  return {0, 0, 0};
}

inline std::string write_ppm(const ClassificationGrid& grid) {
  std::string out = "P6\n" + std::to_string(grid.width) + " " + std::to_string(grid.height) + "\n255\n";
  out.reserve(out.size() + 3 * grid.labels.size());
  for (Label l : grid.labels)
    for (std::uint8_t c : label_color(l)) out.push_back(static_cast<char>(c));
  return out;
}

namespace detail {

// Reads the next whitespace-delimited header token, skipping '#' comments.
inline std::string pnm_token(std::string_view bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    const char c = bytes[pos];
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++pos;
    } else {
      break;
    }
  }
  const std::size_t start = pos;
  while (pos < bytes.size() && !(bytes[pos] == ' ' || bytes[pos] == '\t' || bytes[pos] == '\r' || bytes[pos] == '\n')) ++pos;
  if (start == pos) throw std::runtime_error("truncated PNM header");
  return std::string(bytes.substr(start, pos - start));
}

struct PnmImage {
  std::string magic;
  std::size_t width = 0;
  std::size_t height = 0;
  std::string_view pixels;
};

inline PnmImage parse_pnm(std::string_view bytes) {
  std::size_t pos = 0;
  PnmImage img;
  img.magic = pnm_token(bytes, pos);
  img.width = std::stoul(pnm_token(bytes, pos));
  img.height = std::stoul(pnm_token(bytes, pos));
  if (pnm_token(bytes, pos) != "255") throw std::runtime_error("only maxval 255 is supported");
  ++pos;  // single whitespace byte before the raster
  const std::size_t channels = img.magic == "P6" ? 3 : 1;
  if (img.magic != "P5" && img.magic != "P6") throw std::runtime_error("not a binary PGM/PPM file");
  if (bytes.size() < pos + channels * img.width * img.height) throw std::runtime_error("truncated PNM raster");
  img.pixels = bytes.substr(pos, channels * img.width * img.height);
  return img;
}

}  // namespace detail

/// Inverse of write_pgm: black pixels become H = 1. A single-row image maps
/// back to a 1-D field only when `one_dimensional` is set.
inline HypothesisField read_pgm(std::string_view bytes, bool one_dimensional = false) {
  const auto img = detail::parse_pnm(bytes);
  if (img.magic != "P5") throw std::runtime_error("not a binary PGM file");
  std::vector<std::uint8_t> values(img.pixels.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = static_cast<std::uint8_t>(img.pixels[i]) < 128 ? 1 : 0;
  std::vector<std::size_t> dims = one_dimensional ? std::vector<std::size_t>{img.width}
                                                  : std::vector<std::size_t>{img.height, img.width};
  return {std::move(dims), std::move(values), {"file", "", 0}};
}

/// Counts of red and blue pixels in a PPM produced by write_ppm.
struct ColorCounts {
  std::size_t red = 0;
  std::size_t blue = 0;
};

inline ColorCounts count_ppm_colors(std::string_view bytes) {
  const auto img = detail::parse_pnm(bytes);
  if (img.magic != "P6") throw std::runtime_error("not a binary PPM file");
  ColorCounts c;
  for (std::size_t i = 0; i + 2 < img.pixels.size(); i += 3) {
    const auto r = static_cast<std::uint8_t>(img.pixels[i]);
    const auto g = static_cast<std::uint8_t>(img.pixels[i + 1]);
    const auto b = static_cast<std::uint8_t>(img.pixels[i + 2]);
    if (r == 255 && g == 0 && b == 0) ++c.red;
    if (r == 0 && g == 0 && b == 255) ++c.blue;
  }
  return c;
}

/// One simulated restoration: Ising truth, p-values, test, estimate, diff.
struct RestoreRun {
  HypothesisField truth;
  PValueSample sample;
  TestResult result;
  HypothesisField estimate;
  ClassificationGrid grid;
  std::string truth_pgm;
  std::string restored_pgm;
  std::string diff_ppm;
};

struct RestoreConfig {
  IsingParams ising;
  double a = 1.0 / 98.0;
  ProcedureConfig procedure_config;
  Procedure procedure = Procedure::bh;
  std::uint64_t seed = kDefaultMasterSeed;
};

inline RestoreRun run_restore(const RestoreConfig& cfg) {
  HypothesisField truth = gen_ising(cfg.ising, substream_seed(cfg.seed, Substream::field));
  PValueSample sample = generate_pvalues(truth, AlternativeDistribution::paper(cfg.a), substream_seed(cfg.seed, Substream::pvalues));
  TestResult result = run_procedure(cfg.procedure, sample, cfg.procedure_config);
  HypothesisField estimate(truth.dims(), result.rejected, {"estimate", "procedure=" + to_string(cfg.procedure), cfg.seed});
  ClassificationGrid grid = diff_map(truth, estimate);
  std::string truth_pgm = write_pgm(truth);
  std::string restored_pgm = write_pgm(estimate);
  std::string diff_ppm = write_ppm(grid);
  return {std::move(truth),        std::move(sample),       std::move(result),  std::move(estimate),
          std::move(grid),         std::move(truth_pgm),    std::move(restored_pgm), std::move(diff_ppm)};
}

}  // namespace depfdr
