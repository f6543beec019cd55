#include "riskplan/segment.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "riskplan/io.hpp"
#include "riskplan/subprocess.hpp"

namespace riskplan {
namespace {

// SplitMix64 step; also used as a mixing function for substream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t state) : state_(state) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

constexpr char kProbstackMagic[] = "PROBSTACK 1\n";
constexpr double kRangeSlack = 1e-6;
constexpr double kRenormalizeLimit = 1e-3;

}  // namespace

void validate_config(const SyntheticSegmenterConfig& cfg, int n_classes, int width,
                     int height) {
  if (n_classes < 1) throw ValidationError("segmenter needs at least one class");
  const double floor = n_classes > 1 ? 1.0 / n_classes : 0.0;
  if (!(cfg.base_confidence > floor && cfg.base_confidence <= 1.0)) {
    throw ValidationError("base_confidence must lie in (1/K, 1]");
  }
  if (!(cfg.noise_sigma >= 0.0) || !std::isfinite(cfg.noise_sigma) ||
      !(cfg.boost_sigma >= 0.0) || !std::isfinite(cfg.boost_sigma)) {
    throw ValidationError("noise scales must be finite and nonnegative");
  }
  if (cfg.n_samples < 1) throw ValidationError("n_samples must be >= 1");
  if (!cfg.boost_region.empty() &&
      (cfg.boost_region.width() != width || cfg.boost_region.height() != height)) {
    throw ValidationError("boost region dimensions do not match the label grid");
  }
}

ProbabilityStack sample_synthetic(const LabelGrid& truth,
                                  const SyntheticSegmenterConfig& cfg) {
  require_valid(validate(truth), "segmenter input");
  const int k = truth.taxonomy().size();
  validate_config(cfg, k, truth.width(), truth.height());

  const std::size_t npix = truth.size();
  const double off = k > 1 ? (1.0 - cfg.base_confidence) / (k - 1) : 0.0;
  const bool boosted = !cfg.boost_region.empty();
  const std::uint64_t seed_key = mix64(cfg.seed);

  ProbabilityStack stack(cfg.n_samples, k, truth.width(), truth.height());
  std::vector<double> row(k);
  for (int s = 0; s < cfg.n_samples; ++s) {
    for (std::size_t p = 0; p < npix; ++p) {
      const int label = truth[p];
      const double sigma =
          cfg.noise_sigma + (boosted && cfg.boost_region[p] ? cfg.boost_sigma : 0.0);
      SplitMix64 rng(seed_key ^ mix64(static_cast<std::uint64_t>(s) * npix + p));
      std::normal_distribution<double> noise(0.0, 1.0);
      double sum = 0.0;
      for (int c = 0; c < k; ++c) {
        double v = c == label ? cfg.base_confidence : off;
        if (sigma > 0.0) v += sigma * noise(rng);
        v = std::clamp(v, 0.0, 1.0);
        row[c] = v;
        sum += v;
      }
      if (sum <= 0.0) {
        std::fill(row.begin(), row.end(), 0.0);
        row[label] = 1.0;
        sum = 1.0;
      }
      for (int c = 0; c < k; ++c) {
        stack.at(s, c, p) = static_cast<float>(row[c] / sum);
      }
    }
  }
  return stack;
}

LabelGrid consensus_labels(const ProbabilityStack& stack,
                           std::shared_ptr<const ClassTaxonomy> taxonomy) {
  require_valid(validate(stack, taxonomy ? taxonomy->size() : -1), "probability stack");
  const std::size_t npix = stack.pixel_count();
  std::vector<double> best(npix, -1.0);
  LabelGrid out(stack.width(), stack.height(), std::move(taxonomy));
  std::vector<double> sum(npix);
  for (int c = 0; c < stack.n_classes(); ++c) {
    std::fill(sum.begin(), sum.end(), 0.0);
    for (int s = 0; s < stack.n_samples(); ++s) {
      for (std::size_t p = 0; p < npix; ++p) sum[p] += stack.at(s, c, p);
    }
    for (std::size_t p = 0; p < npix; ++p) {
      const double mean = sum[p] / stack.n_samples();
      // Strict comparison keeps the lowest class id on ties.
      if (mean > best[p]) {
        best[p] = mean;
        out[p] = static_cast<ClassId>(c);
      }
    }
  }
  return out;
}

UncertaintyMap uncertainty_map(const ProbabilityStack& stack) {
  require_valid(validate(stack), "probability stack");
  const std::size_t npix = stack.pixel_count();
  const int n = stack.n_samples();
  UncertaintyMap out(stack.width(), stack.height(), 0.0);
  std::vector<double> mean(npix);
  std::vector<double> sq(npix);
  for (int c = 0; c < stack.n_classes(); ++c) {
    std::fill(mean.begin(), mean.end(), 0.0);
    std::fill(sq.begin(), sq.end(), 0.0);
    for (int s = 0; s < n; ++s) {
      for (std::size_t p = 0; p < npix; ++p) mean[p] += stack.at(s, c, p);
    }
    for (std::size_t p = 0; p < npix; ++p) mean[p] /= n;
    for (int s = 0; s < n; ++s) {
      for (std::size_t p = 0; p < npix; ++p) {
        const double d = stack.at(s, c, p) - mean[p];
        sq[p] += d * d;
      }
    }
    for (std::size_t p = 0; p < npix; ++p) out[p] += sq[p] / n;
  }
  for (auto& v : out.values()) v /= stack.n_classes();
  return out;
}

LabelGrid perceive_labels(const ColorImage& image,
                          std::shared_ptr<const ClassTaxonomy> taxonomy) {
  require_valid(validate(image), "image");
  const auto& classes = taxonomy->classes();
  LabelGrid out(image.width(), image.height(), taxonomy);
  for (std::size_t i = 0; i < image.size(); ++i) {
    const Rgb px = image[i];
    int best = std::numeric_limits<int>::max();
    for (const auto& c : classes) {
      const int dr = int(px.r) - c.color.r;
      const int dg = int(px.g) - c.color.g;
      const int db = int(px.b) - c.color.b;
      const int d = dr * dr + dg * dg + db * db;
      if (d < best) {
        best = d;
        out[i] = c.id;
      }
    }
  }
  return out;
}

std::vector<std::uint8_t> encode_probstack(const ProbabilityStack& stack) {
  std::ostringstream header;
  header << kProbstackMagic << stack.width() << ' ' << stack.height() << ' '
         << stack.n_classes() << ' ' << stack.n_samples() << '\n';
  const std::string h = header.str();
  std::vector<std::uint8_t> out(h.begin(), h.end());
  out.reserve(h.size() + stack.values().size() * 4);
  for (float v : stack.values()) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<std::uint8_t>(bits >> (8 * b)));
  }
  return out;
}

ProbabilityStack decode_probstack(const std::vector<std::uint8_t>& bytes) {
  const std::string magic = kProbstackMagic;
  if (bytes.size() < magic.size() ||
      !std::equal(magic.begin(), magic.end(), bytes.begin())) {
    throw IoError("probstack: bad magic line");
  }
  auto nl = std::find(bytes.begin() + magic.size(), bytes.end(), '\n');
  if (nl == bytes.end()) throw IoError("probstack: missing dimension line");
  const std::string dims(bytes.begin() + magic.size(), nl);
  std::istringstream in(dims);
  long long w = -1, h = -1, k = -1, n = -1;
  std::string trailing;
  if (!(in >> w >> h >> k >> n) || (in >> trailing) || w < 1 || h < 1 || k < 1 ||
      n < 1) {
    throw IoError("probstack: malformed dimension line '" + dims + "'");
  }
  const std::size_t payload_offset = static_cast<std::size_t>(nl - bytes.begin()) + 1;
  const unsigned long long count =
      static_cast<unsigned long long>(w) * h * k * n;
  if (count > (1ULL << 32)) throw IoError("probstack: dimensions too large");
  const std::size_t expected = static_cast<std::size_t>(count) * 4;
  const std::size_t actual = bytes.size() - payload_offset;
  if (actual != expected) {
    throw IoError("probstack: payload holds " + std::to_string(actual) +
                  " bytes, header implies " + std::to_string(expected));
  }

  ProbabilityStack stack(static_cast<int>(n), static_cast<int>(k), static_cast<int>(w),
                         static_cast<int>(h));
  auto& vals = stack.values();
  const std::uint8_t* src = bytes.data() + payload_offset;
  for (std::size_t i = 0; i < vals.size(); ++i, src += 4) {
    const std::uint32_t bits = std::uint32_t(src[0]) | (std::uint32_t(src[1]) << 8) |
                               (std::uint32_t(src[2]) << 16) | (std::uint32_t(src[3]) << 24);
    vals[i] = std::bit_cast<float>(bits);
  }

  const std::size_t npix = stack.pixel_count();
  for (int s = 0; s < stack.n_samples(); ++s) {
    for (std::size_t p = 0; p < npix; ++p) {
      double sum = 0.0;
      bool in_range = true;
      for (int c = 0; c < stack.n_classes(); ++c) {
        const double v = stack.at(s, c, p);
        if (!(v >= -kRangeSlack && v <= 1.0 + kRangeSlack)) {
          throw IoError("probstack: probability " + std::to_string(v) +
                        " outside [0,1] at sample " + std::to_string(s));
        }
        in_range = in_range && v >= 0.0 && v <= 1.0;
        sum += v;
      }
      const double err = std::abs(sum - 1.0);
      if (err > kRenormalizeLimit) {
        throw IoError("probstack: sample " + std::to_string(s) + " pixel " +
                      std::to_string(p) + " sums to " + std::to_string(sum));
      }
      if (err <= kNormalizationTolerance && in_range) continue;
      double clamped_sum = 0.0;
      for (int c = 0; c < stack.n_classes(); ++c) {
        float& v = stack.at(s, c, p);
        v = std::clamp(v, 0.0f, 1.0f);
        clamped_sum += v;
      }
      if (err > kNormalizationTolerance) {
        for (int c = 0; c < stack.n_classes(); ++c) {
          float& v = stack.at(s, c, p);
          v = static_cast<float>(v / clamped_sum);
        }
      }
    }
  }
  const auto report = validate(stack);
  if (!report.empty()) throw IoError("probstack: " + report.front());
  return stack;
}

void export_probability_stack(const ProbabilityStack& stack,
                              const std::filesystem::path& path) {
  io::write_file_atomic(path, encode_probstack(stack));
}

ProbabilityStack import_probability_stack(const std::filesystem::path& path) {
  return decode_probstack(io::read_file(path));
}

ProbabilityStack run_external_segmenter(const ColorImage& image, int n_classes,
                                        const ExternalSegmenterConfig& cfg) {
  if (cfg.n_samples < 1) throw ValidationError("n_samples must be >= 1");
  TempDir dir("riskplan-seg-");
  io::write_rgb_png(dir.path() / "input.png", image);

  ProbabilityStack stack(cfg.n_samples, n_classes, image.width(), image.height());
  const std::size_t per_sample = static_cast<std::size_t>(n_classes) * stack.pixel_count();
  for (int s = 0; s < cfg.n_samples; ++s) {
    const auto result =
        run_command(cfg.command, {dir.path().string(), std::to_string(s)},
                    std::chrono::duration_cast<std::chrono::milliseconds>(cfg.timeout));
    if (result.timed_out) throw AdapterError("external segmenter timed out");
    if (result.exit_code != 0) {
      throw AdapterError("external segmenter exited with status " +
                         std::to_string(result.exit_code));
    }
    const auto file = dir.path() / ("probs_" + std::to_string(s) + ".probstack");
    if (!std::filesystem::exists(file)) {
      throw AdapterError("external segmenter did not write " + file.filename().string());
    }
    ProbabilityStack one;
    try {
      one = import_probability_stack(file);
    } catch (const Error& e) {
      throw AdapterError(std::string("external segmenter output: ") + e.what());
    }
    if (one.n_samples() != 1 || one.n_classes() != n_classes ||
        one.width() != image.width() || one.height() != image.height()) {
      throw AdapterError("external segmenter output has mismatched dimensions");
    }
    std::copy(one.values().begin(), one.values().end(),
              stack.values().begin() + static_cast<std::ptrdiff_t>(s * per_sample));
  }
  return stack;
}

}  // namespace riskplan
