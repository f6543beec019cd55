// riskplan: command-line front end for the occlusion-aware planning pipeline.

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "riskplan/error.hpp"
#include "riskplan/io.hpp"
#include "riskplan/pipeline.hpp"
#include "riskplan/render.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace riskplan;

namespace {

constexpr const char* kTimeoutEnv = "RISKPLAN_ADAPTER_TIMEOUT";

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kValidation: return 1;
    case ErrorKind::kIo: return 2;
    case ErrorKind::kAdapter: return 3;
  }
  return 1;
}

Pixel parse_pixel(const std::string& text) {
  const auto sep = text.find_first_of(",:");
  if (sep == std::string::npos) throw ValidationError("pixel '" + text + "' is not row,col");
  auto num = [&](std::string_view s) {
    int v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
      throw ValidationError("pixel '" + text + "' is not row,col");
    }
    return v;
  };
  const std::string_view all(text);
  return {num(all.substr(0, sep)), num(all.substr(sep + 1))};
}

std::string format_lambda(double v) {
  char buf[32];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

json pixel_json(Pixel p) { return json::array({p.row, p.col}); }

// Options shared by every stage.
struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
};

// Stage-specific overrides; unset options keep the config's value.
struct Overrides {
  std::optional<int> kernel_size;
  std::vector<double> lambdas;
  std::optional<std::string> inpainter;
  std::optional<int> connectivity;
  std::optional<int> samples;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON config file");
  cmd->add_option("--seed", c.seed, "Random seed");
  cmd->add_option("--out", c.out, "Output directory");
}

PipelineConfig resolve_config(const Common& c, const Overrides& o) {
  PipelineConfig cfg = c.config.empty() ? PipelineConfig{} : load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (o.kernel_size) cfg.mask.kernel_size = *o.kernel_size;
  if (!o.lambdas.empty()) cfg.planner.lambdas = o.lambdas;
  if (o.inpainter) cfg.inpaint.kind = parse_inpainter_kind(*o.inpainter);
  if (o.connectivity) cfg.planner.connectivity = *o.connectivity;
  if (o.samples) cfg.segment.n_samples = *o.samples;
  if (const char* env = std::getenv(kTimeoutEnv); env != nullptr && *env != '\0') {
    int secs = 0;
    const std::string_view s(env);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), secs);
    if (ec != std::errc() || p != s.data() + s.size() || secs < 1) {
      throw ValidationError(std::string(kTimeoutEnv) + " must be a positive integer");
    }
    cfg.segment.timeout_s = secs;
    cfg.inpaint.timeout_s = secs;
  }
  validate_config(cfg);
  return cfg;
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir + "': " + ec.message());
  return dir;
}

void write_segmentation(const fs::path& dir, const Segmentation& seg) {
  export_probability_stack(seg.probs, dir / "probs.probstack");
  io::write_label_png(dir / "labels.png", seg.labels);
  io::write_rgb_png(dir / "uncertainty.png", uncertainty_heatmap(seg.uncertainty));
}

void write_mask(const fs::path& dir, const BinaryMask& mask, const ColorImage* image) {
  io::write_mask_png(dir / "mask.png", mask);
  if (image != nullptr) io::write_rgb_png(dir / "mask_vis.png", mask_overlay(*image, mask));
}

void write_inpainted(const fs::path& dir, const InpaintResult& r) {
  io::write_rgb_png(dir / "inpainted.png", r.image);
  const json meta{{"iterations", r.iterations},
                  {"max_update", r.max_update},
                  {"converged", r.converged}};
  io::write_text_atomic(dir / "inpaint.json", meta.dump(2) + "\n");
}

// One overlay per lambda with every pair's path.
void write_overlays(const fs::path& dir, const ColorImage& scene, const Segmentation& seg,
                    const std::vector<Pixel>& waypoints, const PipelineConfig& cfg) {
  for (double lambda : cfg.planner.lambdas) {
    const PlannerConfig pc = planner_config(cfg, lambda);
    const CostMap cost =
        build_cost_map(seg.labels, seg.uncertainty, *cfg.taxonomy, lambda);
    ColorImage img = scene;
    for (const auto& [a, b] : enumerate_pairs(waypoints)) {
      img = draw_path(img, plan_pair(cost, a, b, pc), cfg.render.path_color);
    }
    io::write_rgb_png(dir / ("paths_lambda_" + format_lambda(lambda) + ".png"), img);
  }
}

void write_report(const fs::path& dir, const SurpriseReport& report) {
  io::write_text_atomic(dir / "report.csv", report_to_csv(report));
  io::write_text_atomic(dir / "report.json", report_to_json(report));
}

void print_summary(const SurpriseReport& report) {
  for (const auto& a : report.aggregates) {
    std::cout << "lambda " << format_lambda(a.lambda) << ": mean surprise " << a.mean
              << " over " << a.pairs << " pairs\n";
  }
}

BinaryMask load_boost(const std::string& path, const ColorImage& image) {
  if (path.empty()) return {};
  BinaryMask m = io::read_mask_png(path);
  if (!m.same_shape(image)) throw ValidationError("boost mask and image dimensions differ");
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk-aware path planning over occluded overhead imagery"};
  app.require_subcommand(0, 1);
  bool print_default = false;
  app.add_flag("--print-default-config", print_default, "Print the default config and exit");

  Common common;
  Overrides over;
  std::string image, labels, mask, probs, truth_labels, boost, scene_dir, start, goal;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene bundle");
  add_common(synth, common);

  auto* mask_cmd = app.add_subcommand("mask", "Occlusion mask from a label map");
  add_common(mask_cmd, common);
  mask_cmd->add_option("--labels", labels, "Label PNG")->required();
  mask_cmd->add_option("--image", image, "Scene PNG for mask_vis.png");
  mask_cmd->add_option("--kernel-size", over.kernel_size, "Odd dilation kernel size");

  auto* inpaint_cmd = app.add_subcommand("inpaint", "Fill masked pixels");
  add_common(inpaint_cmd, common);
  inpaint_cmd->add_option("--image", image, "Scene PNG")->required();
  inpaint_cmd->add_option("--mask", mask, "Mask PNG")->required();
  inpaint_cmd->add_option("--labels", labels, "Label PNG (mean replacement)");
  inpaint_cmd->add_option("--inpainter", over.inpainter, "mean|patch|diffusion|external");

  auto* segment_cmd = app.add_subcommand("segment", "Sample segmentations and uncertainty");
  add_common(segment_cmd, common);
  segment_cmd->add_option("--image", image, "Scene PNG")->required();
  segment_cmd->add_option("--boost-mask", boost, "Mask of pixels with extra sampling noise");
  segment_cmd->add_option("--truth-labels", truth_labels, "Label PNG for label_source=truth");
  segment_cmd->add_option("--samples", over.samples, "Number of samples");

  auto* plan_cmd = app.add_subcommand("plan", "Plan one path on a probability stack");
  add_common(plan_cmd, common);
  plan_cmd->add_option("--probs", probs, "PROBSTACK file")->required();
  plan_cmd->add_option("--start", start, "row,col")->required();
  plan_cmd->add_option("--goal", goal, "row,col")->required();
  plan_cmd->add_option("--lambda", over.lambdas, "Risk weight")->expected(1);
  plan_cmd->add_option("--connectivity", over.connectivity, "4 or 8");
  plan_cmd->add_option("--image", image, "Scene PNG for path.png");

  auto* surprise_cmd = app.add_subcommand("surprise", "Surprise report over waypoint pairs");
  add_common(surprise_cmd, common);
  surprise_cmd->add_option("--probs", probs, "PROBSTACK file")
      ->required();
  surprise_cmd->add_option("--truth-labels", truth_labels, "Ground-truth label PNG")
      ->required();
  surprise_cmd->add_option("--lambda", over.lambdas, "Risk weights (repeatable)");
  surprise_cmd->add_option("--connectivity", over.connectivity, "4 or 8");
  surprise_cmd->add_option("--image", image, "Scene PNG for path overlays");

  auto* pipeline_cmd = app.add_subcommand("pipeline", "Mask, inpaint, segment, plan, report");
  add_common(pipeline_cmd, common);
  pipeline_cmd->add_option("--scene", scene_dir, "Scene bundle written by synth");
  pipeline_cmd->add_option("--image", image, "Input scene PNG");
  pipeline_cmd->add_option("--truth-labels", truth_labels, "Ground-truth label PNG");
  pipeline_cmd->add_option("--mask", mask, "Manual mask replacing the generated one");
  pipeline_cmd->add_option("--kernel-size", over.kernel_size, "Odd dilation kernel size");
  pipeline_cmd->add_option("--inpainter", over.inpainter, "mean|patch|diffusion|external");
  pipeline_cmd->add_option("--lambda", over.lambdas, "Risk weights (repeatable)");
  pipeline_cmd->add_option("--connectivity", over.connectivity, "4 or 8");
  pipeline_cmd->add_option("--samples", over.samples, "Number of samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (print_default) {
      std::cout << config_to_json(PipelineConfig{}).dump(2) << "\n";
      return 0;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << app.help();
      return 1;
    }
    const PipelineConfig cfg = resolve_config(common, over);
    const auto tax = cfg.taxonomy;

    if (synth->parsed()) {
      SceneSpec spec = cfg.synth;
      if (common.seed) spec.seed = *common.seed;
      const Scene scene = generate_scene(spec, tax);
      const fs::path out = prepare_out(common.out);
      io::write_label_png(out / "truth_labels.png", scene.truth_labels);
      io::write_rgb_png(out / "truth.png", scene.truth_image);
      io::write_label_png(out / "occluded_labels.png", scene.occluded_labels);
      io::write_rgb_png(out / "occluded.png", scene.occluded_image);
      io::write_mask_png(out / "occlusion.png", scene.occlusion);
      io::write_text_atomic(out / "spec.json", scene_spec_to_json(spec).dump(2) + "\n");
    } else if (mask_cmd->parsed()) {
      const LabelGrid grid = io::read_label_png(labels, tax);
      const BinaryMask m = generate_occlusion_mask(grid, mask_config(cfg));
      std::optional<ColorImage> scene;
      if (!image.empty()) {
        scene = io::read_rgb_png(image);
        if (!scene->same_shape(grid)) throw ValidationError("image and labels differ in size");
      }
      write_mask(prepare_out(common.out), m, scene ? &*scene : nullptr);
      std::cout << m.count() << " masked pixels\n";
    } else if (inpaint_cmd->parsed()) {
      const ColorImage img = io::read_rgb_png(image);
      const BinaryMask m = io::read_mask_png(mask);
      std::optional<LabelGrid> grid;
      if (!labels.empty()) grid = io::read_label_png(labels, tax);
      const InpaintResult r =
          inpaint(img, m, inpainter_config(cfg), grid ? &*grid : nullptr);
      write_inpainted(prepare_out(common.out), r);
    } else if (segment_cmd->parsed()) {
      const ColorImage img = io::read_rgb_png(image);
      std::optional<LabelGrid> truth;
      if (!truth_labels.empty()) truth = io::read_label_png(truth_labels, tax);
      const Segmentation seg =
          segment_image(img, cfg, load_boost(boost, img), truth ? &*truth : nullptr);
      write_segmentation(prepare_out(common.out), seg);
    } else if (plan_cmd->parsed()) {
      if (over.lambdas.size() > 1) throw ValidationError("plan takes a single --lambda");
      const double lambda = over.lambdas.empty() ? cfg.planner.lambdas.front() : over.lambdas[0];
      const Segmentation seg = summarize(import_probability_stack(probs), cfg);
      if (seg.probs.n_classes() != static_cast<int>(tax->size())) {
        throw ValidationError("stack class count does not match the taxonomy");
      }
      const PlannerConfig pc = planner_config(cfg, lambda);
      const CostMap cost = build_cost_map(seg.labels, seg.uncertainty, *tax, lambda);
      const PlannedPath path =
          plan(cost, seg.uncertainty, parse_pixel(start), parse_pixel(goal), pc);
      json pixels = json::array();
      for (Pixel p : path.pixels) pixels.push_back(pixel_json(p));
      const json doc{{"lambda", lambda},
                     {"total_cost", path.total_cost},
                     {"uncertainty_sum", path.uncertainty_sum},
                     {"pixels", pixels}};
      const fs::path out = prepare_out(common.out);
      io::write_text_atomic(out / "path.json", doc.dump(2) + "\n");
      if (!image.empty()) {
        const ColorImage scene = io::read_rgb_png(image);
        if (!scene.same_shape(cost)) throw ValidationError("image and stack differ in size");
        io::write_rgb_png(out / "path.png", draw_path(scene, path, cfg.render.path_color));
      }
      std::cout << "cost " << path.total_cost << ", " << path.pixels.size() << " pixels\n";
    } else if (surprise_cmd->parsed()) {
      const Segmentation seg = summarize(import_probability_stack(probs), cfg);
      const LabelGrid truth = io::read_label_png(truth_labels, tax);
      if (!truth.same_shape(seg.labels)) throw ValidationError("truth and stack differ in size");
      const auto waypoints = resolve_waypoints(cfg, truth);
      const SurpriseReport report =
          evaluate_protocol(truth, seg.labels, seg.uncertainty,
                            {waypoints, cfg.planner.lambdas}, planner_config(cfg, 0.0));
      const fs::path out = prepare_out(common.out);
      write_report(out, report);
      if (!image.empty()) {
        const ColorImage scene = io::read_rgb_png(image);
        if (!scene.same_shape(truth)) throw ValidationError("image and truth differ in size");
        write_overlays(out, scene, seg, waypoints, cfg);
      }
      print_summary(report);
    } else if (pipeline_cmd->parsed()) {
      if (!scene_dir.empty()) {
        if (image.empty()) image = (fs::path(scene_dir) / "occluded.png").string();
        if (truth_labels.empty()) {
          truth_labels = (fs::path(scene_dir) / "truth_labels.png").string();
        }
      }
      if (image.empty() || truth_labels.empty()) {
        throw ValidationError("pipeline needs --scene or both --image and --truth-labels");
      }
      const ColorImage input = io::read_rgb_png(image);
      const LabelGrid truth = io::read_label_png(truth_labels, tax);
      std::optional<BinaryMask> manual;
      if (!mask.empty()) manual = io::read_mask_png(mask);
      const PipelineResult r = run_pipeline(input, truth, cfg, manual);
      const fs::path out = prepare_out(common.out);
      write_segmentation(prepare_out((out / "initial").string()), r.initial);
      write_mask(out, r.mask, &input);
      write_inpainted(out, r.inpainted);
      write_segmentation(prepare_out((out / "final").string()), r.final);
      write_report(out, r.report);
      write_overlays(out, r.inpainted.image, r.final, r.waypoints, cfg);
      print_summary(r.report);
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
