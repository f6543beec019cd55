#include "riskplan/pipeline.hpp"

#include <set>

#include "riskplan/io.hpp"

namespace riskplan {

using nlohmann::json;

namespace {

const char* to_string(SegmenterKind k) {
  return k == SegmenterKind::kSynthetic ? "synthetic" : "external";
}
const char* to_string(LabelSource s) {
  return s == LabelSource::kPerceived ? "perceived" : "truth";
}

json rgb_json(Rgb c) { return json::array({c.r, c.g, c.b}); }

Rgb rgb_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ValidationError("color must be [r, g, b]");
  auto ch = [&](int i) {
    const int v = j.at(i).get<int>();
    if (v < 0 || v > 255) throw ValidationError("color channel out of range");
    return static_cast<std::uint8_t>(v);
  };
  return {ch(0), ch(1), ch(2)};
}

json pixel_json(Pixel p) { return json::array({p.row, p.col}); }

Pixel pixel_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw ValidationError("pixel must be [row, col]");
  return {j.at(0).get<int>(), j.at(1).get<int>()};
}

// Visits an object's keys, rejecting any key without a handler.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) throw ValidationError(where_ + " must be an object");
  }
  template <typename F>
  ObjectReader& on(const std::string& key, F&& f) {
    known_.insert(key);
    if (auto it = obj_.find(key); it != obj_.end()) f(*it);
    return *this;
  }
  void finish() const {
    for (const auto& [key, _] : obj_.items()) {
      if (!known_.count(key)) throw ValidationError("unknown key '" + key + "' in " + where_);
    }
  }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> known_;
};

template <typename T>
auto assign(T& dst) {
  return [&dst](const json& j) { dst = j.get<T>(); };
}

std::vector<ClassId> ids_for(const ClassTaxonomy& tax, const std::vector<std::string>& names) {
  std::vector<ClassId> ids;
  for (const auto& n : names) ids.push_back(tax.require(n));
  return ids;
}

}  // namespace

json scene_spec_to_json(const SceneSpec& spec) {
  json buildings = json::array();
  for (const auto& b : spec.buildings) {
    buildings.push_back({{"rect", {b.rect.row, b.rect.col, b.rect.height, b.rect.width}},
                         {"height_class", b.height_class}});
  }
  json shifts = json::array();
  for (Pixel s : spec.occlusion_shift) shifts.push_back(pixel_json(s));
  return {{"width", spec.width},
          {"height", spec.height},
          {"layout", to_string(spec.layout)},
          {"road_width", spec.road_width},
          {"marker_period", spec.marker_period},
          {"buildings", buildings},
          {"occlusion_shift", shifts},
          {"color_jitter", spec.color_jitter},
          {"seed", spec.seed}};
}

SceneSpec scene_spec_from_json(const json& j) {
  SceneSpec s;
  try {
    ObjectReader(j, "synth")
        .on("width", assign(s.width))
        .on("height", assign(s.height))
        .on("layout", [&](const json& v) { s.layout = parse_road_layout(v.get<std::string>()); })
        .on("road_width", assign(s.road_width))
        .on("marker_period", assign(s.marker_period))
        .on("buildings",
            [&](const json& v) {
              s.buildings.clear();
              for (const auto& b : v) {
                Building building;
                ObjectReader(b, "building")
                    .on("rect",
                        [&](const json& r) {
                          if (!r.is_array() || r.size() != 4) {
                            throw ValidationError("rect must be [row, col, height, width]");
                          }
                          building.rect = {r[0].get<int>(), r[1].get<int>(), r[2].get<int>(),
                                           r[3].get<int>()};
                        })
                    .on("height_class", assign(building.height_class))
                    .finish();
                s.buildings.push_back(building);
              }
            })
        .on("occlusion_shift",
            [&](const json& v) {
              s.occlusion_shift.clear();
              for (const auto& p : v) s.occlusion_shift.push_back(pixel_from(p));
            })
        .on("color_jitter", assign(s.color_jitter))
        .on("seed", assign(s.seed))
        .finish();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("scene spec: ") + e.what());
  }
  validate_spec(s);
  return s;
}

void validate_config(const PipelineConfig& cfg) {
  if (!cfg.taxonomy) throw ValidationError("config has no taxonomy");
  validate_config(mask_config(cfg), *cfg.taxonomy);
  const auto inpaint = inpainter_config(cfg);
  if (inpaint.kind == InpainterKind::kMeanReplacement && inpaint.mean_class_ids.empty()) {
    throw ValidationError("mean replacement needs at least one class");
  }
  if (!(cfg.inpaint.tolerance > 0.0)) throw ValidationError("inpaint tolerance must be > 0");
  if (cfg.inpaint.max_iterations < 1) throw ValidationError("max_iterations must be >= 1");
  if (cfg.inpaint.kind == InpainterKind::kExternal && cfg.inpaint.command.empty()) {
    throw ValidationError("external inpainter needs a command");
  }
  if (cfg.inpaint.patch_size < 1) throw ValidationError("patch_size must be >= 1");
  if (cfg.segment.kind == SegmenterKind::kExternal && cfg.segment.command.empty()) {
    throw ValidationError("external segmenter needs a command");
  }
  if (cfg.segment.n_samples < 1) throw ValidationError("n_samples must be >= 1");
  if (cfg.segment.timeout_s < 1 || cfg.inpaint.timeout_s < 1) {
    throw ValidationError("adapter timeouts must be >= 1 s");
  }
  if (cfg.planner.lambdas.empty()) throw ValidationError("lambda list is empty");
  for (double l : cfg.planner.lambdas) validate_config(planner_config(cfg, l));
  if (cfg.protocol.waypoints.empty() && cfg.protocol.count < 2) {
    throw ValidationError("protocol needs at least 2 waypoints");
  }
  if (!cfg.protocol.waypoints.empty() && cfg.protocol.waypoints.size() < 2) {
    throw ValidationError("protocol needs at least 2 waypoints");
  }
  validate_spec(cfg.synth);
}

json config_to_json(const PipelineConfig& cfg) {
  json classes = json::array();
  for (const auto& c : cfg.taxonomy->classes()) {
    classes.push_back({{"id", c.id},
                       {"name", c.name},
                       {"color", rgb_json(c.color)},
                       {"cost", c.cost},
                       {"navigable", c.navigable}});
  }
  json waypoints = json::array();
  for (Pixel p : cfg.protocol.waypoints) waypoints.push_back(pixel_json(p));
  return {
      {"seed", cfg.seed},
      {"taxonomy", classes},
      {"mask",
       {{"kernel_size", cfg.mask.kernel_size},
        {"marker_classes", cfg.mask.marker_classes},
        {"building_classes", cfg.mask.building_classes}}},
      {"inpaint",
       {{"kind", to_string(cfg.inpaint.kind)},
        {"mean_classes", cfg.inpaint.mean_classes},
        {"patch_file", cfg.inpaint.patch_file},
        {"patch_size", cfg.inpaint.patch_size},
        {"tolerance", cfg.inpaint.tolerance},
        {"max_iterations", cfg.inpaint.max_iterations},
        {"command", cfg.inpaint.command},
        {"timeout_s", cfg.inpaint.timeout_s}}},
      {"segment",
       {{"kind", to_string(cfg.segment.kind)},
        {"label_source", to_string(cfg.segment.label_source)},
        {"base_confidence", cfg.segment.base_confidence},
        {"noise_sigma", cfg.segment.noise_sigma},
        {"boost_sigma", cfg.segment.boost_sigma},
        {"boost_masked", cfg.segment.boost_masked},
        {"n_samples", cfg.segment.n_samples},
        {"command", cfg.segment.command},
        {"timeout_s", cfg.segment.timeout_s}}},
      {"planner",
       {{"lambdas", cfg.planner.lambdas},
        {"connectivity", cfg.planner.connectivity},
        {"diagonal_scale", cfg.planner.diagonal_scale}}},
      {"protocol",
       {{"waypoints", waypoints}, {"count", cfg.protocol.count}, {"seed", cfg.protocol.seed}}},
      {"render", {{"path_color", rgb_json(cfg.render.path_color)}}},
      {"synth", scene_spec_to_json(cfg.synth)},
  };
}

PipelineConfig config_from_json(const json& doc) {
  PipelineConfig cfg;
  try {
    ObjectReader(doc, "config")
        .on("seed", assign(cfg.seed))
        .on("taxonomy",
            [&](const json& j) {
              if (!j.is_array()) throw ValidationError("taxonomy must be an array");
              std::vector<ClassInfo> classes;
              for (const auto& c : j) {
                ClassInfo info;
                int id = -1;
                ObjectReader(c, "taxonomy entry")
                    .on("id", assign(id))
                    .on("name", assign(info.name))
                    .on("color", [&](const json& v) { info.color = rgb_from(v); })
                    .on("cost", assign(info.cost))
                    .on("navigable", assign(info.navigable))
                    .finish();
                if (id < 0 || id > 255) throw ValidationError("class id out of range");
                info.id = static_cast<ClassId>(id);
                classes.push_back(std::move(info));
              }
              cfg.taxonomy = std::make_shared<const ClassTaxonomy>(std::move(classes));
            })
        .on("mask",
            [&](const json& j) {
              ObjectReader(j, "mask")
                  .on("kernel_size", assign(cfg.mask.kernel_size))
                  .on("marker_classes", assign(cfg.mask.marker_classes))
                  .on("building_classes", assign(cfg.mask.building_classes))
                  .finish();
            })
        .on("inpaint",
            [&](const json& j) {
              ObjectReader(j, "inpaint")
                  .on("kind",
                      [&](const json& v) {
                        cfg.inpaint.kind = parse_inpainter_kind(v.get<std::string>());
                      })
                  .on("mean_classes", assign(cfg.inpaint.mean_classes))
                  .on("patch_file", assign(cfg.inpaint.patch_file))
                  .on("patch_size", assign(cfg.inpaint.patch_size))
                  .on("tolerance", assign(cfg.inpaint.tolerance))
                  .on("max_iterations", assign(cfg.inpaint.max_iterations))
                  .on("command", assign(cfg.inpaint.command))
                  .on("timeout_s", assign(cfg.inpaint.timeout_s))
                  .finish();
            })
        .on("segment",
            [&](const json& j) {
              ObjectReader(j, "segment")
                  .on("kind",
                      [&](const json& v) {
                        const auto s = v.get<std::string>();
                        if (s == "synthetic") cfg.segment.kind = SegmenterKind::kSynthetic;
                        else if (s == "external") cfg.segment.kind = SegmenterKind::kExternal;
                        else throw ValidationError("unknown segmenter '" + s + "'");
                      })
                  .on("label_source",
                      [&](const json& v) {
                        const auto s = v.get<std::string>();
                        if (s == "perceived") cfg.segment.label_source = LabelSource::kPerceived;
                        else if (s == "truth") cfg.segment.label_source = LabelSource::kTruth;
                        else throw ValidationError("unknown label_source '" + s + "'");
                      })
                  .on("base_confidence", assign(cfg.segment.base_confidence))
                  .on("noise_sigma", assign(cfg.segment.noise_sigma))
                  .on("boost_sigma", assign(cfg.segment.boost_sigma))
                  .on("boost_masked", assign(cfg.segment.boost_masked))
                  .on("n_samples", assign(cfg.segment.n_samples))
                  .on("command", assign(cfg.segment.command))
                  .on("timeout_s", assign(cfg.segment.timeout_s))
                  .finish();
            })
        .on("planner",
            [&](const json& j) {
              ObjectReader(j, "planner")
                  .on("lambdas", assign(cfg.planner.lambdas))
                  .on("connectivity", assign(cfg.planner.connectivity))
                  .on("diagonal_scale", assign(cfg.planner.diagonal_scale))
                  .finish();
            })
        .on("protocol",
            [&](const json& j) {
              ObjectReader(j, "protocol")
                  .on("waypoints",
                      [&](const json& v) {
                        cfg.protocol.waypoints.clear();
                        for (const auto& p : v) cfg.protocol.waypoints.push_back(pixel_from(p));
                      })
                  .on("count", assign(cfg.protocol.count))
                  .on("seed", assign(cfg.protocol.seed))
                  .finish();
            })
        .on("render",
            [&](const json& j) {
              ObjectReader(j, "render")
                  .on("path_color", [&](const json& v) { cfg.render.path_color = rgb_from(v); })
                  .finish();
            })
        .on("synth", [&](const json& j) { cfg.synth = scene_spec_from_json(j); })
        .finish();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  const std::string text = io::read_text(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError("config '" + path.string() + "': " + e.what());
  }
  return config_from_json(doc);
}

MaskGenConfig mask_config(const PipelineConfig& cfg) {
  return {ids_for(*cfg.taxonomy, cfg.mask.marker_classes),
          ids_for(*cfg.taxonomy, cfg.mask.building_classes), cfg.mask.kernel_size};
}

InpainterConfig inpainter_config(const PipelineConfig& cfg) {
  InpainterConfig out;
  out.kind = cfg.inpaint.kind;
  out.mean_class_ids = ids_for(*cfg.taxonomy, cfg.inpaint.mean_classes);
  if (cfg.inpaint.kind == InpainterKind::kPatchReplacement) {
    if (!cfg.inpaint.patch_file.empty()) {
      out.patch = io::read_rgb_png(cfg.inpaint.patch_file);
    } else {
      const Rgb road = cfg.taxonomy->info(cfg.taxonomy->require("road")).color;
      out.patch = ColorImage(cfg.inpaint.patch_size, cfg.inpaint.patch_size, road);
    }
  }
  out.diffusion = {cfg.inpaint.tolerance, cfg.inpaint.max_iterations};
  out.external = {cfg.inpaint.command, std::chrono::seconds(cfg.inpaint.timeout_s)};
  return out;
}

PlannerConfig planner_config(const PipelineConfig& cfg, double lambda) {
  return {lambda, cfg.planner.connectivity, cfg.planner.diagonal_scale};
}

Segmentation summarize(ProbabilityStack probs, const PipelineConfig& cfg) {
  Segmentation out;
  out.labels = consensus_labels(probs, cfg.taxonomy);
  out.uncertainty = uncertainty_map(probs);
  out.probs = std::move(probs);
  return out;
}

Segmentation segment_image(const ColorImage& image, const PipelineConfig& cfg,
                           const BinaryMask& boost, const LabelGrid* truth) {
  const auto& s = cfg.segment;
  if (s.kind == SegmenterKind::kExternal) {
    return summarize(run_external_segmenter(image, cfg.taxonomy->size(),
                                            {s.command, s.n_samples,
                                             std::chrono::seconds(s.timeout_s)}),
                     cfg);
  }
  LabelGrid base;
  if (s.label_source == LabelSource::kTruth) {
    if (truth == nullptr) throw ValidationError("label_source 'truth' needs truth labels");
    if (!truth->same_shape(image)) {
      throw ValidationError("truth labels and image dimensions differ");
    }
    base = *truth;
  } else {
    base = perceive_labels(image, cfg.taxonomy);
  }
  SyntheticSegmenterConfig syn;
  syn.base_confidence = s.base_confidence;
  syn.noise_sigma = s.noise_sigma;
  syn.boost_sigma = s.boost_sigma;
  if (s.boost_masked) syn.boost_region = boost;
  syn.seed = cfg.seed;
  syn.n_samples = s.n_samples;
  return summarize(sample_synthetic(base, syn), cfg);
}

std::vector<Pixel> resolve_waypoints(const PipelineConfig& cfg, const LabelGrid& truth) {
  if (!cfg.protocol.waypoints.empty()) return cfg.protocol.waypoints;
  return waypoints_on_road(truth, cfg.protocol.count, cfg.protocol.seed);
}

namespace {

SurpriseReport evaluate(const LabelGrid& truth, const Segmentation& seg,
                        const std::vector<Pixel>& waypoints, const PipelineConfig& cfg) {
  return evaluate_protocol(truth, seg.labels, seg.uncertainty, {waypoints, cfg.planner.lambdas},
                           planner_config(cfg, 0.0));
}

}  // namespace

PipelineResult run_pipeline(const ColorImage& input, const LabelGrid& truth,
                            const PipelineConfig& cfg,
                            const std::optional<BinaryMask>& manual_mask) {
  validate_config(cfg);
  if (!input.same_shape(truth)) {
    throw ValidationError("input image and truth labels differ in dimensions");
  }
  PipelineResult out;
  out.initial = segment_image(input, cfg, BinaryMask(), &truth);
  if (manual_mask) {
    if (!manual_mask->same_shape(input)) {
      throw ValidationError("manual mask and image dimensions differ");
    }
    out.mask = *manual_mask;
  } else {
    out.mask = generate_occlusion_mask(out.initial.labels, mask_config(cfg));
  }
  out.inpainted = inpaint(input, out.mask, inpainter_config(cfg), &out.initial.labels);
  out.final = segment_image(out.inpainted.image, cfg, out.mask, &truth);
  out.waypoints = resolve_waypoints(cfg, truth);
  out.report = evaluate(truth, out.final, out.waypoints, cfg);
  return out;
}

SurpriseReport evaluate_unmodified(const ColorImage& input, const LabelGrid& truth,
                                   const PipelineConfig& cfg) {
  validate_config(cfg);
  const Segmentation seg = segment_image(input, cfg, BinaryMask(), &truth);
  return evaluate(truth, seg, resolve_waypoints(cfg, truth), cfg);
}

}  // namespace riskplan
