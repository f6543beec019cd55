#include "riskplan/inpaint.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>

#include "riskplan/io.hpp"
#include "riskplan/subprocess.hpp"

namespace riskplan {

const char* to_string(InpainterKind kind) {
  switch (kind) {
    case InpainterKind::kMeanReplacement: return "mean";
    case InpainterKind::kPatchReplacement: return "patch";
    case InpainterKind::kDiffusion: return "diffusion";
    case InpainterKind::kExternal: return "external";
  }
  return "?";
}

InpainterKind parse_inpainter_kind(const std::string& name) {
  if (name == "mean" || name == "mean_replacement") return InpainterKind::kMeanReplacement;
  if (name == "patch" || name == "patch_replacement") return InpainterKind::kPatchReplacement;
  if (name == "diffusion" || name == "navier_stokes") return InpainterKind::kDiffusion;
  if (name == "external") return InpainterKind::kExternal;
  throw ValidationError("unknown inpainter '" + name + "'");
}

MaskComponents label_components(const BinaryMask& mask) {
  MaskComponents out{Raster<int>(mask.width(), mask.height(), -1), 0};
  std::vector<std::size_t> stack;
  const int w = mask.width();
  const int h = mask.height();
  for (std::size_t seed = 0; seed < mask.size(); ++seed) {
    if (!mask[seed] || out.label[seed] >= 0) continue;
    const int id = out.count++;
    out.label[seed] = id;
    stack.push_back(seed);
    while (!stack.empty()) {
      const Pixel p = mask.pixel(stack.back());
      stack.pop_back();
      constexpr std::array<Pixel, 4> kSteps{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
      for (const Pixel d : kSteps) {
        const Pixel q{p.row + d.row, p.col + d.col};
        if (q.row < 0 || q.col < 0 || q.row >= h || q.col >= w) continue;
        const std::size_t qi = mask.index(q);
        if (mask[qi] && out.label[qi] < 0) {
          out.label[qi] = id;
          stack.push_back(qi);
        }
      }
    }
  }
  return out;
}

Rgb mean_of_class(const ColorImage& image, const LabelGrid& labels, const BinaryMask& mask,
                  const std::vector<ClassId>& ids) {
  if (!image.same_shape(labels) || !image.same_shape(mask)) {
    throw ValidationError("image, labels and mask dimensions differ");
  }
  std::array<bool, 256> wanted{};
  for (ClassId id : ids) wanted[id] = true;
  std::array<std::uint64_t, 3> sum{};
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (mask[i] || !wanted[labels[i]]) continue;
    sum[0] += image[i].r;
    sum[1] += image[i].g;
    sum[2] += image[i].b;
    ++count;
  }
  if (count == 0) {
    throw ValidationError("no unmasked pixels of the requested classes to average");
  }
  auto round_mean = [count](std::uint64_t s) {
    return static_cast<std::uint8_t>((2 * s + count) / (2 * count));
  };
  return {round_mean(sum[0]), round_mean(sum[1]), round_mean(sum[2])};
}

namespace {

InpaintResult fill_constant(const ColorImage& image, const BinaryMask& mask, Rgb color) {
  InpaintResult result{image};
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (mask[i]) result.image[i] = color;
  }
  return result;
}

InpaintResult fill_patch(const ColorImage& image, const BinaryMask& mask,
                         const ColorImage& patch) {
  if (patch.empty()) throw ValidationError("patch replacement needs a nonempty patch");
  const MaskComponents comps = label_components(mask);
  std::vector<Pixel> origin(comps.count, Pixel{image.height(), image.width()});
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const int id = comps.label[i];
    if (id < 0) continue;
    const Pixel p = mask.pixel(i);
    origin[id].row = std::min(origin[id].row, p.row);
    origin[id].col = std::min(origin[id].col, p.col);
  }
  InpaintResult result{image};
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const int id = comps.label[i];
    if (id < 0) continue;
    const Pixel p = mask.pixel(i);
    const int pr = (p.row - origin[id].row) % patch.height();
    const int pc = (p.col - origin[id].col) % patch.width();
    result.image[i] = patch.at(pr, pc);
  }
  return result;
}

// Harmonic (Laplace) fill solved by Gauss-Seidel sweeps in row-major order.
// Each masked pixel starts at the mean of its component's boundary ring, so
// every iterate stays inside the ring's per-channel range.
InpaintResult fill_diffusion(const ColorImage& image, const BinaryMask& mask,
                             const DiffusionParams& params) {
  if (!(params.tolerance > 0.0)) throw ValidationError("diffusion tolerance must be > 0");
  if (params.max_iterations < 1) {
    throw ValidationError("diffusion max_iterations must be >= 1");
  }
  const int w = mask.width();
  const int h = mask.height();
  const MaskComponents comps = label_components(mask);

  std::vector<std::array<double, 3>> ring_sum(comps.count, {0.0, 0.0, 0.0});
  std::vector<std::size_t> ring_count(comps.count, 0);
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (mask[i]) continue;
    const Pixel p = image.pixel(i);
    // An unmasked pixel counts once per distinct adjacent component.
    std::array<int, 4> seen{-1, -1, -1, -1};
    int nseen = 0;
    constexpr std::array<Pixel, 4> kSteps{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
    for (const Pixel d : kSteps) {
      const Pixel q{p.row + d.row, p.col + d.col};
      if (q.row < 0 || q.col < 0 || q.row >= h || q.col >= w) continue;
      const int id = comps.label[q];
      if (id < 0 || std::find(seen.begin(), seen.begin() + nseen, id) != seen.begin() + nseen) {
        continue;
      }
      seen[nseen++] = id;
      ring_sum[id][0] += image[i].r;
      ring_sum[id][1] += image[i].g;
      ring_sum[id][2] += image[i].b;
      ++ring_count[id];
    }
  }
  for (int id = 0; id < comps.count; ++id) {
    if (ring_count[id] == 0) {
      throw ValidationError("masked region has no unmasked neighbours to diffuse from");
    }
  }

  std::vector<std::array<double, 3>> value(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) {
    const int id = comps.label[i];
    if (id < 0) {
      value[i] = {double(image[i].r), double(image[i].g), double(image[i].b)};
    } else {
      const double n = static_cast<double>(ring_count[id]);
      value[i] = {ring_sum[id][0] / n, ring_sum[id][1] / n, ring_sum[id][2] / n};
    }
  }

  struct Node {
    std::size_t index;
    std::array<std::size_t, 4> nbr;
    int degree;
  };
  std::vector<Node> nodes;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) continue;
    const Pixel p = mask.pixel(i);
    Node node{i, {}, 0};
    if (p.row > 0) node.nbr[node.degree++] = i - w;
    if (p.row + 1 < h) node.nbr[node.degree++] = i + w;
    if (p.col > 0) node.nbr[node.degree++] = i - 1;
    if (p.col + 1 < w) node.nbr[node.degree++] = i + 1;
    nodes.push_back(node);
  }

  InpaintResult result{image};
  result.converged = nodes.empty();
  for (int iter = 1; iter <= params.max_iterations && !nodes.empty(); ++iter) {
    double max_update = 0.0;
    for (const Node& node : nodes) {
      auto& v = value[node.index];
      for (int ch = 0; ch < 3; ++ch) {
        double acc = 0.0;
        for (int j = 0; j < node.degree; ++j) acc += value[node.nbr[j]][ch];
        const double next = acc / node.degree;
        max_update = std::max(max_update, std::abs(next - v[ch]));
        v[ch] = next;
      }
    }
    result.iterations = iter;
    result.max_update = max_update;
    if (max_update < params.tolerance) {
      result.converged = true;
      break;
    }
  }

  auto to_byte = [](double x) {
    return static_cast<std::uint8_t>(std::clamp(std::lround(x), 0L, 255L));
  };
  for (const Node& node : nodes) {
    const auto& v = value[node.index];
    result.image[node.index] = {to_byte(v[0]), to_byte(v[1]), to_byte(v[2])};
  }
  return result;
}

InpaintResult fill_external(const ColorImage& image, const BinaryMask& mask,
                            const ExternalInpainterParams& params) {
  TempDir dir("riskplan-inpaint-");
  io::write_rgb_png(dir.path() / "input.png", image);
  io::write_mask_png(dir.path() / "mask.png", mask);
  const auto status =
      run_command(params.command, {dir.path().string()},
                  std::chrono::duration_cast<std::chrono::milliseconds>(params.timeout));
  if (status.timed_out) throw AdapterError("external inpainter timed out");
  if (status.exit_code != 0) {
    throw AdapterError("external inpainter exited with status " +
                       std::to_string(status.exit_code));
  }
  const auto out_path = dir.path() / "output.png";
  if (!std::filesystem::exists(out_path)) {
    throw AdapterError("external inpainter did not write output.png");
  }
  ColorImage filled;
  try {
    filled = io::read_rgb_png(out_path);
  } catch (const Error& e) {
    throw AdapterError(std::string("external inpainter output: ") + e.what());
  }
  if (!filled.same_shape(image)) {
    throw AdapterError("external inpainter output has mismatched dimensions");
  }
  InpaintResult result{image};
  for (std::size_t i = 0; i < image.size(); ++i) {
    if (mask[i]) result.image[i] = filled[i];
  }
  return result;
}

}  // namespace

InpaintResult inpaint(const ColorImage& image, const BinaryMask& mask,
                      const InpainterConfig& cfg, const LabelGrid* labels) {
  require_valid(validate(image), "image");
  require_valid(validate(mask), "mask");
  if (!image.same_shape(mask)) {
    throw ValidationError("image and mask dimensions differ");
  }
  if (mask.count() == 0) return InpaintResult{image};

  switch (cfg.kind) {
    case InpainterKind::kMeanReplacement:
      if (labels == nullptr) throw ValidationError("mean replacement needs a label grid");
      if (cfg.mean_class_ids.empty()) {
        throw ValidationError("mean replacement needs at least one class to average");
      }
      return fill_constant(image, mask,
                           mean_of_class(image, *labels, mask, cfg.mean_class_ids));
    case InpainterKind::kPatchReplacement:
      return fill_patch(image, mask, cfg.patch);
    case InpainterKind::kDiffusion:
      return fill_diffusion(image, mask, cfg.diffusion);
    case InpainterKind::kExternal:
      return fill_external(image, mask, cfg.external);
  }
  throw ValidationError("unknown inpainter kind");
}

}  // namespace riskplan
