// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "riskplan/inpaint.hpp"
#include "riskplan/io.hpp"
#include "riskplan/mask_gen.hpp"
#include "riskplan/metrics.hpp"
#include "riskplan/pipeline.hpp"
#include "riskplan/planner.hpp"
#include "riskplan/segment.hpp"
#include "riskplan/subprocess.hpp"
#include "riskplan/synth.hpp"

using namespace riskplan;
using riskplan::testing::default_taxonomy;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void fail(const std::string& why) {
    if (pass) detail << "first failure: " << why << "; ";
    pass = false;
  }
  void check(bool ok, const std::string& why) {
    if (!ok) fail(why);
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool subset(const BinaryMask& a, const BinaryMask& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && !b[i]) return false;
  }
  return true;
}

// 1. Cost map against direct evaluation.
void cost_map_fidelity(Outcome& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> cls(0, 10);
  std::uniform_real_distribution<double> unc(0.0, 0.25), lam(0.0, 100.0);
  double worst = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto label = static_cast<ClassId>(cls(rng));
    const double u = unc(rng), lambda = lam(rng);
    const LabelGrid g(1, 1, default_taxonomy(), label);
    const UncertaintyMap um(1, 1, u);
    const double got = build_cost_map(g, um, *default_taxonomy(), lambda)[0];
    worst = std::max(worst, std::abs(got - (default_taxonomy()->cost(label) + lambda * u)));
  }
  o.check(worst <= 1e-12, "deviation " + std::to_string(worst));
  for (int t = 0; t < 20; ++t) {
    const LabelGrid g = riskplan::testing::random_grid(rng, 64, 64);
    UncertaintyMap um(64, 64);
    for (auto& v : um.values()) v = unc(rng);
    const CostMap c = build_cost_map(g, um, g.taxonomy(), 0.0);
    o.check(c == class_cost_map(g), "lambda=0 differs from class costs");
  }
  const double secs = seconds_since(t0);
  o.check(secs < 1.0, "runtime " + std::to_string(secs) + " s");
  o.detail << "1000 triples, max |diff| " << worst << ", " << secs << " s";
}

// 2. Uncertainty against a brute-force population variance.
void uncertainty_formula(Outcome& o) {
  std::mt19937_64 rng(102);
  double worst = 0;
  std::size_t pixels = 0, bound_violations = 0;
  for (int t = 0; t < 100; ++t) {
    ProbabilityStack s = riskplan::testing::random_stack(rng, 20, 11, 100, 100);
    if (t % 4 == 1) {
      // Extreme stacks: each sample one-hot on a random class.
      std::uniform_int_distribution<int> cls(0, 10);
      std::fill(s.values().begin(), s.values().end(), 0.0f);
      for (int i = 0; i < 20; ++i) {
        for (std::size_t p = 0; p < s.pixel_count(); ++p) s.at(i, cls(rng), p) = 1.0f;
      }
    } else if (t % 4 == 2) {
      // Two-class Bernoulli extremes, the case that attains 0.25.
      std::bernoulli_distribution coin(0.5);
      std::fill(s.values().begin(), s.values().end(), 0.0f);
      for (int i = 0; i < 20; ++i) {
        for (std::size_t p = 0; p < s.pixel_count(); ++p) s.at(i, coin(rng) ? 1 : 0, p) = 1.0f;
      }
    }
    const UncertaintyMap u = uncertainty_map(s);
    for (std::size_t p = 0; p < u.size(); ++p) {
      worst = std::max(worst, std::abs(u[p] - riskplan::testing::brute_uncertainty(s, p)));
      bound_violations += !(u[p] >= 0.0 && u[p] <= 0.25);
    }
    pixels += u.size();
  }
  o.check(worst <= 1e-10, "oracle deviation " + std::to_string(worst));
  o.check(bound_violations == 0, std::to_string(bound_violations) + " bound violations");
  o.detail << "K=11 n=20, " << pixels << " pixels, max |diff| " << worst << ", "
           << bound_violations << " bound violations";
}

// 3. A* against Dijkstra.
void planner_optimality(Outcome& o) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(103);
  std::uniform_int_distribution<int> dim(1, 64);
  std::uniform_real_distribution<double> unc(0.0, 0.25), lam(0.0, 40.0);
  int mismatches = 0, queries = 0;
  for (int t = 0; t < 200; ++t) {
    const int w = dim(rng), h = dim(rng);
    const LabelGrid g = riskplan::testing::random_grid(rng, w, h);
    UncertaintyMap u(w, h);
    for (auto& v : u.values()) v = unc(rng);
    const double lambda = t % 5 == 0 ? 0.0 : lam(rng);
    const CostMap c = build_cost_map(g, u, g.taxonomy(), lambda);
    const Pixel s{static_cast<int>(rng() % h), static_cast<int>(rng() % w)};
    const Pixel e{static_cast<int>(rng() % h), static_cast<int>(rng() % w)};
    for (int conn : {4, 8}) {
      const PlannedPath p = plan(c, s, e, {lambda, conn});
      const double ref = riskplan::testing::dijkstra(c, s, e, conn);
      ++queries;
      if (p.total_cost != ref || !validate(p, conn, s, e).empty()) {
        ++mismatches;
        o.fail("map " + std::to_string(t) + " conn " + std::to_string(conn) + ": " +
               std::to_string(p.total_cost) + " vs " + std::to_string(ref));
      }
    }
  }
  const double secs = seconds_since(t0);
  o.check(secs < 30.0, "runtime " + std::to_string(secs) + " s");
  o.detail << queries << " queries on 200 maps, " << mismatches << " mismatches, " << secs
           << " s";
}

// 4. Uncertainty along the chosen path never grows with lambda.
void risk_monotonicity(Outcome& o) {
  const std::vector<double> ladder{0, 1, 2, 5, 10, 20};
  int violations = 0, pairs = 0;
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    PipelineConfig cfg;
    cfg.seed = seed;
    cfg.mask.kernel_size = 15;
    cfg.synth = random_scene_spec(seed);
    const Scene scene = generate_scene(cfg.synth, cfg.taxonomy);
    const PipelineResult r = run_pipeline(scene.occluded_image, scene.truth_labels, cfg);
    const auto& seg = r.final;
    for (const auto& [a, b] : enumerate_pairs(r.waypoints)) {
      ++pairs;
      double prev = std::numeric_limits<double>::infinity();
      for (double lambda : ladder) {
        const CostMap c = build_cost_map(seg.labels, seg.uncertainty, *cfg.taxonomy, lambda);
        const PlannedPath p = plan_pair(c, a, b, planner_config(cfg, lambda));
        const double sum = path_uncertainty_sum(p, seg.uncertainty);
        if (sum > prev) {
          worst = std::max(worst, sum - prev);
          if (sum > prev + 1e-9) {
            ++violations;
            o.fail("seed " + std::to_string(seed) + " lambda " + std::to_string(lambda));
          }
        }
        prev = sum;
      }
    }
  }
  o.detail << "50 scenes, " << pairs << " pairs x 6 lambdas, " << violations
           << " violations (largest increase " << worst << ")";
}

// 5. Surprise protocol on the building-over-road scene.
void surprise_protocol(Outcome& o) {
  const auto t0 = Clock::now();
  PipelineConfig cfg;
  cfg.mask.kernel_size = 15;
  const Scene scene = generate_scene(cfg.synth, cfg.taxonomy);

  const SurpriseReport occluded = evaluate_unmodified(scene.occluded_image, scene.truth_labels, cfg);
  const PipelineResult inpainted = run_pipeline(scene.occluded_image, scene.truth_labels, cfg);

  TempDir dir("riskplan-accept");
  io::write_rgb_png(dir.path() / "truth.png", scene.truth_image);
  PipelineConfig perfect = cfg;
  perfect.segment.label_source = LabelSource::kTruth;
  perfect.inpaint.kind = InpainterKind::kExternal;
  perfect.inpaint.command = riskplan::testing::write_script(
      dir.path(), "truth.sh", "cp " + (dir.path() / "truth.png").string() + " \"$1/output.png\"");
  const PipelineResult ideal = run_pipeline(scene.occluded_image, scene.truth_labels, perfect);

  const double occ0 = occluded.aggregate_for(0).mean, occ20 = occluded.aggregate_for(20).mean;
  const double inp0 = inpainted.report.aggregate_for(0).mean;
  const double ideal20 = ideal.report.aggregate_for(20).mean;
  o.check(occluded.aggregate_for(0).pairs == 10, "expected 10 pairs");
  o.check(occ20 <= occ0, "occluded: lambda=20 above lambda=0");
  o.check(inp0 <= occ0, "inpainted lambda=0 above occluded lambda=0");
  o.check(ideal20 <= 0.1, "perfect pipeline lambda=20 above 0.1");
  const double secs = seconds_since(t0);
  o.check(secs < 120.0, "runtime " + std::to_string(secs) + " s");
  o.detail << "occluded l=0 " << occ0 << ", l=20 " << occ20 << "; inpainted l=0 " << inp0
           << " (l=20 " << inpainted.report.aggregate_for(20).mean << "); perfect l=20 "
           << ideal20 << "; " << secs << " s";
}

// 6. Occlusion mask against composed oracles.
void mask_correctness(Outcome& o) {
  std::mt19937_64 rng(106);
  const ClassId marker = riskplan::testing::class_id("road_marker");
  const ClassId building = riskplan::testing::class_id("building");
  const ClassId road = riskplan::testing::class_id("road");
  int mismatches = 0, non_monotone = 0;
  for (int t = 0; t < 100; ++t) {
    LabelGrid g = riskplan::testing::random_grid(rng, 32, 32);
    if (t % 2 == 1) {
      // Sparse markers among buildings and road, closer to real scenes.
      std::discrete_distribution<int> pick({0.03, 0.5, 0.47});
      const ClassId ids[] = {marker, building, road};
      for (auto& v : g.values()) v = ids[pick(rng)];
    }
    for (int k : {1, 3, 5}) {
      const auto cfg = MaskGenConfig::ForTaxonomy(*default_taxonomy(), k);
      const BinaryMask want = riskplan::testing::brute_and(
          riskplan::testing::brute_dilate(riskplan::testing::membership(g, cfg.marker_ids), k),
          riskplan::testing::membership(g, cfg.building_ids));
      if (generate_occlusion_mask(g, cfg) != want) {
        ++mismatches;
        o.fail("grid " + std::to_string(t) + " kernel " + std::to_string(k));
      }
    }
    const BinaryMask small =
        generate_occlusion_mask(g, MaskGenConfig::ForTaxonomy(*default_taxonomy(), 11));
    const BinaryMask large =
        generate_occlusion_mask(g, MaskGenConfig::ForTaxonomy(*default_taxonomy(), 15));
    if (!subset(small, large)) {
      ++non_monotone;
      o.fail("grid " + std::to_string(t) + " mask(11) not within mask(15)");
    }
  }
  o.detail << "100 grids x kernels {1,3,5}: " << mismatches << " mismatches; 11 within 15 on "
           << 100 - non_monotone << "/100";
}

// 7. Inpainting contracts.
void inpainting_contracts(Outcome& o) {
  std::mt19937_64 rng(107);
  TempDir dir("riskplan-accept");
  const ColorImage model_output = riskplan::testing::random_image(rng, 32, 32);
  io::write_rgb_png(dir.path() / "model.png", model_output);

  InpainterConfig base;
  base.mean_class_ids = {riskplan::testing::class_id("road")};
  base.patch = riskplan::testing::random_image(rng, 5, 3);
  base.external.command = riskplan::testing::write_script(
      dir.path(), "model.sh", "cp " + (dir.path() / "model.png").string() + " \"$1/output.png\"");

  int immut_fail = 0;
  for (int t = 0; t < 100; ++t) {
    const ColorImage img = riskplan::testing::random_image(rng, 32, 32);
    const BinaryMask m = riskplan::testing::random_mask(rng, 32, 32, 0.05 + 0.004 * t);
    LabelGrid labels = riskplan::testing::random_grid(rng, 32, 32);
    labels.at(0, 0) = riskplan::testing::class_id("road");
    BinaryMask safe = m;
    safe.set(0, 0, false);
    for (auto kind : {InpainterKind::kMeanReplacement, InpainterKind::kPatchReplacement,
                      InpainterKind::kDiffusion, InpainterKind::kExternal}) {
      InpainterConfig cfg = base;
      cfg.kind = kind;
      const ColorImage out = inpaint(img, safe, cfg, &labels).image;
      for (std::size_t i = 0; i < safe.size(); ++i) {
        if (!safe[i] && out[i] != img[i]) {
          ++immut_fail;
          o.fail(std::string(to_string(kind)) + " changed an unmasked pixel");
          break;
        }
      }
    }
  }

  int principle_fail = 0, unconverged = 0, components = 0, max_iters = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Scene scene = generate_scene(random_scene_spec(seed), default_taxonomy());
    BinaryMask m = seed % 2 == 0
                       ? generate_occlusion_mask(scene.occluded_labels,
                                                 MaskGenConfig::ForTaxonomy(*default_taxonomy(), 15))
                       : riskplan::testing::random_mask(rng, 64, 64, 0.4);
    if (m.count() == 0) m = riskplan::testing::random_mask(rng, 64, 64, 0.3);
    InpainterConfig cfg = base;
    cfg.kind = InpainterKind::kDiffusion;
    const InpaintResult r = inpaint(scene.occluded_image, m, cfg);
    max_iters = std::max(max_iters, r.iterations);
    if (!r.converged || !(r.max_update < 1e-3) || r.iterations > 10000) {
      ++unconverged;
      o.fail("diffusion did not converge on scene " + std::to_string(seed));
    }
    const MaskComponents comps = label_components(m);
    components += comps.count;
    std::vector<std::array<int, 6>> range(comps.count, {255, 255, 255, 0, 0, 0});
    for (int y = 0; y < 64; ++y) {
      for (int x = 0; x < 64; ++x) {
        if (m.test(y, x)) continue;
        for (auto [dy, dx] : {std::pair{-1, 0}, {1, 0}, {0, -1}, {0, 1}}) {
          const int yy = y + dy, xx = x + dx;
          if (yy < 0 || xx < 0 || yy >= 64 || xx >= 64 || !m.test(yy, xx)) continue;
          auto& rg = range[comps.label.at(yy, xx)];
          const Rgb p = scene.occluded_image.at(y, x);
          rg = {std::min(rg[0], int(p.r)), std::min(rg[1], int(p.g)), std::min(rg[2], int(p.b)),
                std::max(rg[3], int(p.r)), std::max(rg[4], int(p.g)), std::max(rg[5], int(p.b))};
        }
      }
    }
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (!m[i]) continue;
      const auto& rg = range[comps.label[i]];
      const Rgb p = r.image[i];
      if (!(p.r >= rg[0] && p.r <= rg[3] && p.g >= rg[1] && p.g <= rg[4] && p.b >= rg[2] &&
            p.b <= rg[5])) {
        ++principle_fail;
        o.fail("maximum principle violated on scene " + std::to_string(seed));
        break;
      }
    }
  }

  int constant_fail = 0;
  for (int t = 0; t < 10; ++t) {
    const Rgb color{static_cast<std::uint8_t>(rng() % 256), static_cast<std::uint8_t>(rng() % 256),
                    static_cast<std::uint8_t>(rng() % 256)};
    ColorImage img = riskplan::testing::random_image(rng, 64, 64);
    BinaryMask m(64, 64);
    const int r0 = 4 + t, c0 = 6 + 2 * t, hh = 20 + t, ww = 30 - t;
    for (int y = r0 - 1; y <= r0 + hh; ++y) {
      for (int x = c0 - 1; x <= c0 + ww; ++x) {
        const bool inside = y >= r0 && y < r0 + hh && x >= c0 && x < c0 + ww;
        if (inside) {
          m.set(y, x);
        } else {
          img.at(y, x) = color;
        }
      }
    }
    InpainterConfig cfg = base;
    cfg.kind = InpainterKind::kDiffusion;
    const ColorImage out = inpaint(img, m, cfg).image;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (!m[i]) continue;
      if (std::abs(out[i].r - color.r) > 1 || std::abs(out[i].g - color.g) > 1 ||
          std::abs(out[i].b - color.b) > 1) {
        ++constant_fail;
        o.fail("constant boundary region off by more than 1 level");
        break;
      }
    }
  }
  o.detail << "immutability 100 cases x 4 backends, " << immut_fail << " failures; diffusion "
           << components << " components on 20 64x64 scenes, " << principle_fail
           << " principle violations, " << unconverged << " unconverged (max " << max_iters
           << " sweeps); constant boundary " << 10 - constant_fail << "/10";
}

// 8. Format round trips.
void format_round_trips(Outcome& o) {
  std::mt19937_64 rng(108);
  int cases = 0;
  for (int t = 0; t < 50; ++t) {
    const int w = 1 + static_cast<int>(rng() % 40), h = 1 + static_cast<int>(rng() % 40);
    const ProbabilityStack s =
        riskplan::testing::random_stack(rng, 1 + static_cast<int>(rng() % 5), 11, w, h);
    o.check(decode_probstack(encode_probstack(s)) == s, "PROBSTACK");
    const LabelGrid g = riskplan::testing::random_grid(rng, w, h);
    o.check(io::decode_label_png(io::encode_label_png(g), default_taxonomy()) == g, "label PNG");
    const BinaryMask m = riskplan::testing::random_mask(rng, w, h, 0.4);
    o.check(io::decode_mask_png(io::encode_mask_png(m)) == m, "mask PNG");
    const ColorImage img = riskplan::testing::random_image(rng, w, h);
    o.check(io::decode_rgb_png(io::encode_rgb_png(img)) == img, "RGB PNG");

    std::vector<SurpriseRow> rows;
    std::uniform_real_distribution<double> d(-1e3, 1e3);
    for (int i = 0; i < 12; ++i) {
      rows.push_back({std::abs(d(rng)) / 7, i, {int(rng() % 99), int(rng() % 99)},
                      {int(rng() % 99), int(rng() % 99)}, int(rng() % 300), std::abs(d(rng)),
                      d(rng) / 97});
    }
    const SurpriseReport report{rows, aggregate_rows(rows)};
    o.check(report_from_csv(report_to_csv(report)) == report, "report CSV");
    o.check(report_from_json(report_to_json(report)) == report, "report JSON");
    ++cases;
  }
  o.detail << cases << " randomized instances per format";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"cost map fidelity", cost_map_fidelity},
      {"uncertainty formula", uncertainty_formula},
      {"planner optimality", planner_optimality},
      {"risk-aversion monotonicity", risk_monotonicity},
      {"surprise protocol", surprise_protocol},
      {"mask generation", mask_correctness},
      {"inpainting contracts", inpainting_contracts},
      {"format round trips", format_round_trips},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      criteria[i].second(o);
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    failed += !o.pass;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
