#include "iceseg/classifier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <limits>

#include "iceseg/error.hpp"
#include "iceseg/tiling.hpp"

namespace iceseg {
namespace {

// Luma scaled by 1000 so that window sums stay exact integers.
constexpr double kLumaScale = 255000.0;

std::int64_t luma(Rgb p) noexcept { return 299 * p.r + 587 * p.g + 114 * p.b; }

template <typename LumaAt>
FeatureVector make_features(Rgb center, LumaAt luma_at, int r, int c, int rows, int cols) {
  constexpr int half = kFeatureWindow / 2;
  constexpr int count = kFeatureWindow * kFeatureWindow;
  std::int64_t sum = 0;
  std::int64_t sum_sq = 0;
  std::int64_t lo = std::numeric_limits<std::int64_t>::max();
  std::int64_t hi = std::numeric_limits<std::int64_t>::min();
  for (int dr = -half; dr <= half; ++dr) {
    const int rr = reflect_index(r + dr, rows);
    for (int dc = -half; dc <= half; ++dc) {
      const std::int64_t v = luma_at(rr, reflect_index(c + dc, cols));
      sum += v;
      sum_sq += v * v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  // count^2 * variance, exact in integers.
  const std::int64_t scaled_var = count * sum_sq - sum * sum;

  FeatureVector f;
  f[0] = center.r / 255.0;
  f[1] = center.g / 255.0;
  f[2] = center.b / 255.0;
  f[3] = static_cast<double>(luma(center)) / kLumaScale;
  f[4] = static_cast<double>(sum) / (count * kLumaScale);
  f[5] = std::sqrt(static_cast<double>(scaled_var)) / (count * kLumaScale);
  f[6] = static_cast<double>(lo) / kLumaScale;
  f[7] = static_cast<double>(hi) / kLumaScale;
  return f;
}

// Accumulates loss and unregularized gradient over samples[begin, end) with a
// fixed pairwise split, independent of scheduling.
constexpr std::size_t kLeafSize = 128;

struct Partial {
  double loss = 0.0;
  ModelParams grad;
};

void add_into(Partial& a, const Partial& b) {
  a.loss += b.loss;
  for (int k = 0; k < kNumClasses; ++k)
    for (int f = 0; f < ModelParams::kCols; ++f) a.grad.w[k][f] += b.grad.w[k][f];
}

Partial accumulate(const ModelParams& params, std::span<const Sample> samples) {
  if (samples.size() > kLeafSize) {
    const std::size_t mid = samples.size() / 2;
    Partial left = accumulate(params, samples.first(mid));
    add_into(left, accumulate(params, samples.subspan(mid)));
    return left;
  }
  Partial p;
  for (const Sample& s : samples) {
    const auto scores = class_scores(params, s.x);
    const double top = *std::max_element(scores.begin(), scores.end());
    double z = 0.0;
    for (double v : scores) z += std::exp(v - top);
    const double log_z = top + std::log(z);
    const int y = index_of(s.label);
    p.loss += log_z - scores[y];
    for (int k = 0; k < kNumClasses; ++k) {
      const double delta = std::exp(scores[k] - log_z) - (k == y ? 1.0 : 0.0);
      for (int f = 0; f < kNumFeatures; ++f) p.grad.w[k][f] += delta * s.x[f];
      p.grad.w[k][kNumFeatures] += delta;
    }
  }
  return p;
}

}  // namespace

FeatureGrid extract_features(const RgbImage& image) {
  Grid<std::int64_t> lum(image.rows(), image.cols());
  for (int r = 0; r < image.rows(); ++r)
    for (int c = 0; c < image.cols(); ++c) lum(r, c) = luma(image(r, c));

  FeatureGrid out(image.rows(), image.cols());
  auto luma_at = [&](int r, int c) { return lum(r, c); };
  for (int r = 0; r < image.rows(); ++r)
    for (int c = 0; c < image.cols(); ++c)
      out(r, c) = make_features(image(r, c), luma_at, r, c, image.rows(), image.cols());
  return out;
}

FeatureVector features_at(const Patch& patch, int r, int c) {
  auto luma_at = [&](int rr, int cc) { return luma(patch.pixel(rr, cc)); };
  return make_features(patch.pixel(r, c), luma_at, r, c, patch.size(), patch.size());
}

bool ModelParams::finite() const noexcept {
  for (const auto& row : w)
    for (double v : row)
      if (!std::isfinite(v)) return false;
  return true;
}

std::array<double, kNumClasses> class_scores(const ModelParams& params,
                                             const FeatureVector& x) noexcept {
  std::array<double, kNumClasses> s{};
  for (int k = 0; k < kNumClasses; ++k) {
    double v = params.w[k][kNumFeatures];
    for (int f = 0; f < kNumFeatures; ++f) v += params.w[k][f] * x[f];
    s[k] = v;
  }
  return s;
}

std::array<double, kNumClasses> softmax(const std::array<double, kNumClasses>& scores) noexcept {
  const double top = *std::max_element(scores.begin(), scores.end());
  std::array<double, kNumClasses> p{};
  double z = 0.0;
  for (int k = 0; k < kNumClasses; ++k) z += p[k] = std::exp(scores[k] - top);
  for (double& v : p) v /= z;
  return p;
}

LossAndGrad loss_and_grad(const ModelParams& params, std::span<const Sample> samples, double l2) {
  if (samples.empty()) throw EmptySelection("loss over an empty pixel selection");
  Partial total = accumulate(params, samples);
  const double n = static_cast<double>(samples.size());

  LossAndGrad out;
  double penalty = 0.0;
  for (int k = 0; k < kNumClasses; ++k) {
    for (int f = 0; f < ModelParams::kCols; ++f) {
      out.grad.w[k][f] = total.grad.w[k][f] / n;
      if (f < kNumFeatures) {
        penalty += params.w[k][f] * params.w[k][f];
        out.grad.w[k][f] += l2 * params.w[k][f];
      }
    }
  }
  out.loss = total.loss / n + 0.5 * l2 * penalty;
  return out;
}

LossAndGrad loss_and_grad(const ModelParams& params, const FeatureGrid& features,
                          const LabelMask& labels, const PixelSelection& selection, double l2) {
  if (selection.empty()) throw EmptySelection("loss over an empty pixel selection");
  if (!features.same_shape(labels)) throw DimensionMismatch("features and labels differ in size");
  std::vector<Sample> samples;
  samples.reserve(selection.entries.size());
  for (const SelectedPixel& p : selection.entries) {
    if (p.row < 0 || p.row >= labels.rows() || p.col < 0 || p.col >= labels.cols())
      throw InvalidArgument("selected pixel outside the mask");
    const ClassId y = labels(p.row, p.col);
    if (!is_scored(y)) throw InvalidArgument("selected pixel is Void");
    samples.push_back({features(p.row, p.col), y});
  }
  return loss_and_grad(params, samples, l2);
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be positive");
  if (epochs < 0) throw InvalidArgument("epochs must be non-negative");
  if (batch_size == 0) throw InvalidArgument("batch_size must be positive");
  if (n_per_class == 0) throw InvalidArgument("n_per_class must be positive");
  if (!(l2 >= 0.0)) throw InvalidArgument("l2 must be non-negative");
}

TrainConfig TrainConfig::from_config(const KeyValueConfig& cfg) {
  TrainConfig c;
  c.learning_rate = cfg.get_double("learning_rate", c.learning_rate);
  c.epochs = static_cast<int>(cfg.get_int("epochs", c.epochs));
  c.batch_size = cfg.get_uint("batch_size", c.batch_size);
  c.n_per_class = cfg.get_uint("n_per_class", c.n_per_class);
  const std::string policy = cfg.get_string("policy", "discard");
  if (policy == "discard") {
    c.policy = SelectionPolicy::Discard;
  } else if (policy == "take_all") {
    c.policy = SelectionPolicy::TakeAll;
  } else {
    throw FormatError("config key 'policy': expected discard or take_all, got '" + policy + "'");
  }
  c.resample_each_epoch = cfg.get_bool("resample", c.resample_each_epoch);
  c.seed = cfg.get_uint("seed", c.seed);
  c.l2 = cfg.get_double("l2", c.l2);
  c.validate();
  return c;
}

TrainResult train(const PatchSet& patches, const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  TrainResult result;

  // Units that can never satisfy the policy are dropped up front; their class
  // counts do not change between epochs.
  std::vector<std::size_t> units;
  std::vector<ClassCounts> counts;
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const ClassCounts cc = class_counts(patches[i]);
    const bool discard =
        config.policy == SelectionPolicy::Discard
            ? std::any_of(cc.begin(), cc.end(), [&](std::uint64_t v) { return v < config.n_per_class; })
            : cc[0] + cc[1] + cc[2] == 0;
    if (discard) {
      ++result.units_discarded;
      continue;
    }
    units.push_back(i);
    counts.push_back(cc);
  }
  result.units_used = units.size();
  if (units.empty())
    throw NoTrainableData("every training patch was discarded by the selection policy");
  if (config.epochs == 0) return result;

  auto select = [&](std::size_t u, Rng rng) {
    auto sel = sample_class_balanced_pixels(patches[units[u]], counts[u], config.n_per_class,
                                            config.policy, rng);
    return sel.value_or(PixelSelection{});
  };

  std::vector<PixelSelection> fixed;
  if (!config.resample_each_epoch) {
    fixed.reserve(units.size());
    for (std::size_t u = 0; u < units.size(); ++u)
      fixed.push_back(select(u, Rng::stream(config.seed, {1, units[u]})));
  }

  ModelParams& params = result.params;
  std::vector<Sample> samples;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    samples.clear();
    for (std::size_t u = 0; u < units.size(); ++u) {
      const Patch& patch = patches[units[u]];
      const PixelSelection sel =
          config.resample_each_epoch
              ? select(u, Rng::stream(config.seed, {2, static_cast<std::uint64_t>(epoch), units[u]}))
              : fixed[u];
      for (const SelectedPixel& p : sel.entries)
        samples.push_back({features_at(patch, p.row, p.col), p.cls});
    }
    if (samples.empty()) throw NoTrainableData("no pixels selected for training");

    Rng order = Rng::stream(config.seed, {3, static_cast<std::uint64_t>(epoch)});
    order.shuffle(samples);

    const std::span<const Sample> all(samples);
    for (std::size_t begin = 0; begin < all.size(); begin += config.batch_size) {
      const auto batch = all.subspan(begin, std::min(config.batch_size, all.size() - begin));
      const LossAndGrad lg = loss_and_grad(params, batch, config.l2);
      for (int k = 0; k < kNumClasses; ++k)
        for (int f = 0; f < ModelParams::kCols; ++f)
          params.w[k][f] -= config.learning_rate * lg.grad.w[k][f];
    }

    const double loss = loss_and_grad(params, all, config.l2).loss;
    result.epoch_loss.push_back(loss);
    if (on_epoch) on_epoch(epoch, loss);
  }
  return result;
}

LabelMask predict(const ModelParams& params, const RgbImage& image) {
  const FeatureGrid features = extract_features(image);
  LabelMask out(image.rows(), image.cols());
  auto f = features.values();
  auto dst = out.values();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto s = class_scores(params, f[i]);
    int best = 0;
    for (int k = 1; k < kNumClasses; ++k)
      if (s[k] > s[best]) best = k;
    dst[i] = static_cast<ClassId>(best);
  }
  return out;
}

LabelMask predict_tiled(const ModelParams& params, const RgbImage& image, int tile_size) {
  const TiledFrame<Rgb> tiled = tile(image, tile_size);
  std::vector<LabelMask> masks;
  masks.reserve(tiled.tiles.size());
  for (const RgbImage& t : tiled.tiles) masks.push_back(predict(params, t));
  return stitch(masks, tiled.layout);
}

namespace {
constexpr char kMagic[5] = {'I', 'S', 'T', 'B', '1'};
constexpr std::size_t kParamBytes = sizeof(kMagic) + 8 * kNumClasses * ModelParams::kCols;
}  // namespace

void save_params(const std::filesystem::path& path, const ModelParams& params) {
  std::string bytes(kMagic, sizeof(kMagic));
  for (const auto& row : params.w) {
    for (double v : row) {
      const auto bits = std::bit_cast<std::uint64_t>(v);
      for (int b = 0; b < 8; ++b) bytes.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("short write to '" + path.string() + "'");
}

ModelParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() != kParamBytes || bytes.compare(0, sizeof(kMagic), kMagic, sizeof(kMagic)) != 0)
    throw FormatError("'" + path.string() + "' is not an ISTB1 parameter file");

  ModelParams params;
  std::size_t pos = sizeof(kMagic);
  for (auto& row : params.w) {
    for (double& v : row) {
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b)
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[pos + b])) << (8 * b);
      v = std::bit_cast<double>(bits);
      pos += 8;
    }
  }
  if (!params.finite()) throw FormatError("'" + path.string() + "' contains non-finite weights");
  return params;
}

}  // namespace iceseg
