// eval, compare, conc and vidconsist.

#include <fstream>
#include <memory>
#include <sstream>

#include "commands.hpp"
#include "iceseg/concentration.hpp"
#include "iceseg/csv.hpp"
#include "iceseg/error.hpp"
#include "iceseg/metrics.hpp"

namespace iceseg::cli {
namespace {

struct EvalOptions {
  fs::path gt;
  fs::path pred;
  fs::path out;
  std::string classes = "all";
};

void run_eval(const EvalOptions& o, const Globals& g) {
  const MetricView view = parse_metric_view(o.classes);
  const auto pairs = load_mask_pairs(o.gt, o.pred, g.mask_encoding(), g.jobs);
  std::vector<ConfusionMatrix> per_frame(pairs.size());
  parallel_for(pairs.size(), g.jobs,
               [&](std::size_t i) { per_frame[i] = confusion(pairs[i].truth, pairs[i].predicted); });

  fs::create_directories(o.out);
  const auto names = metric_names(view);
  std::vector<std::string> header = {"frame"};
  for (auto& h : pct_frac_header(names)) header.push_back(std::move(h));
  CsvWriter frames(o.out / "per_frame.csv", header);

  ConfusionMatrix pooled;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    pooled += per_frame[i];
    std::optional<SegMetrics> m;
    try {
      m = compute_view(per_frame[i], view);
    } catch (const EmptyConfusion&) {
      // no pixels of the view in this frame; cells stay empty
    }
    std::vector<std::string> row = {pairs[i].name};
    for (const auto& e : metric_entries(m, view)) append_pct_frac(row, e.fraction);
    frames.row(row);
  }

  const SegMetrics total = compute_view(pooled, view);
  CsvWriter aggregate(o.out / "aggregate.csv", {"metric", "value_pct", "value_frac"});
  for (const auto& e : metric_entries(total, view)) {
    std::vector<std::string> row = {e.name};
    append_pct_frac(row, e.fraction);
    aggregate.row(row);
  }

  CsvWriter cm(o.out / "confusion.csv", {"truth", "water", "anchor", "frazil"});
  for (ClassId c : kScoredClasses) {
    const int i = index_of(c);
    cm.row({std::string(class_name(c)), std::to_string(pooled(i, 0)), std::to_string(pooled(i, 1)),
            std::to_string(pooled(i, 2))});
  }
  log("evaluated " + std::to_string(pairs.size()) + " frames (" + std::string(metric_view_name(view)) +
      "): pix_acc " + format_fixed(100 * total.pix_acc) + "%, mean_iou " +
      format_fixed(100 * total.mean_iou) + "%");
}

struct CompareOptions {
  fs::path baseline;
  fs::path model;
  fs::path out;
  std::string direction = "increase";
};

// First column names the entry; values come from value_frac (x100) when
// present, else from value_pct.
std::vector<NamedValue> read_summary(const fs::path& path) {
  const CsvTable t = read_csv(path);
  if (t.header.empty()) throw FormatError("'" + path.string() + "' has no header");
  bool use_frac = true;
  std::size_t col = 0;
  try {
    col = t.column("value_frac");
  } catch (const FormatError&) {
    use_frac = false;
    col = t.column("value_pct");
  }
  std::vector<NamedValue> out;
  for (const auto& r : t.rows) {
    if (r[col].empty()) continue;
    try {
      std::size_t pos = 0;
      const double v = std::stod(r[col], &pos);
      if (pos != r[col].size()) throw std::invalid_argument(r[col]);
      out.push_back({r[0], use_frac ? 100.0 * v : v});
    } catch (const std::logic_error&) {
      throw FormatError("'" + path.string() + "': bad value '" + r[col] + "' for " + r[0]);
    }
  }
  return out;
}

void run_compare(const CompareOptions& o, const Globals&) {
  const Direction dir = o.direction == "decrease" ? Direction::DecreaseBetter : Direction::IncreaseBetter;
  const auto base = read_summary(o.baseline);
  const auto model = read_summary(o.model);
  const ComparisonReport report = compare(base, model, dir);
  if (report.entries.empty()) throw EmptyInput("no matching entries between the two summaries");
  if (o.out.has_parent_path()) fs::create_directories(o.out.parent_path());
  CsvWriter w(o.out, {"metric", "baseline_pct", "model_pct", "relative_change_pct"});
  for (const auto& e : report.entries)
    w.row({e.name, format_fixed(e.baseline), format_fixed(e.model), format_fixed(e.relative)});
  log("compared " + std::to_string(report.entries.size()) + " entries (" + o.direction + " is better)");
}

struct ConcOptions {
  fs::path gt;
  fs::path pred;
  fs::path out;
};

void run_conc(const ConcOptions& o, const Globals& g) {
  const auto pairs = load_mask_pairs(o.gt, o.pred, g.mask_encoding(), g.jobs);
  std::vector<std::array<double, 3>> mae(pairs.size());
  parallel_for(pairs.size(), g.jobs, [&](std::size_t i) {
    for (std::size_t s = 0; s < kIceClassSets.size(); ++s)
      mae[i][s] = frame_mae(conc_vector(pairs[i].truth, kIceClassSets[s]),
                            conc_vector(pairs[i].predicted, kIceClassSets[s]));
  });

  fs::create_directories(o.out);
  std::vector<std::string> names;
  for (IceClassSet s : kIceClassSets) names.push_back(std::string(ice_class_set_name(s)) + "_mae");
  std::vector<std::string> header = {"frame"};
  for (auto& h : pct_frac_header(names)) header.push_back(std::move(h));
  CsvWriter frames(o.out / "per_frame.csv", header);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    std::vector<std::string> row = {pairs[i].name};
    for (double v : mae[i]) append_pct_frac(row, v / 100.0);
    frames.row(row);
  }

  CsvWriter summary(o.out / "summary.csv", {"class_set", "value_pct", "value_frac", "frames"});
  std::string note;
  for (std::size_t s = 0; s < kIceClassSets.size(); ++s) {
    std::vector<double> column;
    for (const auto& m : mae) column.push_back(m[s]);
    const double med = median_mae(column);
    std::vector<std::string> row = {std::string(ice_class_set_name(kIceClassSets[s]))};
    append_pct_frac(row, med / 100.0);
    row.push_back(std::to_string(pairs.size()));
    summary.row(row);
    note += " " + row[0] + " " + format_fixed(med);
  }
  log("median MAE over " + std::to_string(pairs.size()) + " frames:" + note);
}

struct VidOptions {
  fs::path masks;
  fs::path list;
  fs::path out;
  fs::path plot_data;
};

std::vector<fs::path> read_frame_list(const fs::path& list, const fs::path& dir) {
  std::ifstream in(list);
  if (!in) throw IoError("cannot open frame list '" + list.string() + "'");
  std::vector<fs::path> out;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    out.push_back(dir / line.substr(start));
  }
  return out;
}

void run_vidconsist(const VidOptions& o, const Globals& g) {
  const auto files = o.list.empty() ? require_pngs(o.masks) : read_frame_list(o.list, o.masks);
  if (files.size() < 2) throw TooFewFrames("need at least two frames, got " + std::to_string(files.size()));
  const MaskEncoding enc = g.mask_encoding();
  std::vector<LabelMask> frames(files.size());
  parallel_for(files.size(), g.jobs, [&](std::size_t i) { frames[i] = read_mask(files[i], enc); });
  const VideoConsistency vc = temporal_consistency(frames);

  fs::create_directories(o.out);
  std::vector<std::string> names;
  for (IceClassSet s : kIceClassSets) names.push_back(std::string(ice_class_set_name(s)) + "_diff");
  std::vector<std::string> header = {"pair", "frame_a", "frame_b"};
  for (auto& h : pct_frac_header(names)) header.push_back(std::move(h));
  CsvWriter pairs(o.out / "pairs.csv", header);
  for (std::size_t t = 0; t + 1 < files.size(); ++t) {
    std::vector<std::string> row = {std::to_string(t), files[t].filename().string(),
                                    files[t + 1].filename().string()};
    for (std::size_t s = 0; s < 3; ++s) append_pct_frac(row, vc.pair_difference[s][t] / 100.0);
    pairs.row(row);
  }

  CsvWriter summary(o.out / "summary.csv", {"class_set", "value_pct", "value_frac", "pairs"});
  for (std::size_t s = 0; s < 3; ++s) {
    std::vector<std::string> row = {std::string(ice_class_set_name(kIceClassSets[s]))};
    append_pct_frac(row, vc.mean_difference[s] / 100.0);
    row.push_back(std::to_string(files.size() - 1));
    summary.row(row);
  }

  if (!o.plot_data.empty()) {
    if (o.plot_data.has_parent_path()) fs::create_directories(o.plot_data.parent_path());
    std::vector<std::string> plot_header = {"frame_index"};
    for (auto& h : pct_frac_header(names)) plot_header.push_back(std::move(h));
    CsvWriter plot(o.plot_data, plot_header);
    for (std::size_t t = 0; t + 1 < files.size(); ++t) {
      std::vector<std::string> row = {std::to_string(t + 1)};
      for (std::size_t s = 0; s < 3; ++s) append_pct_frac(row, vc.pair_difference[s][t] / 100.0);
      plot.row(row);
    }
  }
  log("temporal consistency over " + std::to_string(files.size()) + " frames: combined " +
      format_fixed(vc[IceClassSet::Combined]));
}

}  // namespace

void register_eval_commands(CLI::App& app, const Globals& g, std::vector<Handler>& out) {
  {
    auto o = std::make_shared<EvalOptions>();
    auto* sub = app.add_subcommand("eval", "Segmentation metrics of predicted masks against ground truth");
    sub->add_option("--gt", o->gt, "Ground-truth mask directory")->required()->check(CLI::ExistingDirectory);
    sub->add_option("--pred", o->pred, "Predicted mask directory (same file names)")->required()->check(CLI::ExistingDirectory);
    sub->add_option("--classes", o->classes, "Class view")
        ->check(CLI::IsMember({"all", "ice", "water", "anchor", "frazil"}));
    sub->add_option("--out", o->out, "Output directory (per_frame.csv, aggregate.csv, confusion.csv)")->required();
    out.emplace_back(sub, [o, &g] { run_eval(*o, g); });
  }
  {
    auto o = std::make_shared<CompareOptions>();
    auto* sub = app.add_subcommand("compare", "Relative change of a model over a baseline summary");
    sub->add_option("--baseline", o->baseline, "Baseline summary CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--model", o->model, "Model summary CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--direction", o->direction, "Which direction is better")
        ->check(CLI::IsMember({"increase", "decrease"}));
    sub->add_option("--out", o->out, "Output CSV")->required();
    out.emplace_back(sub, [o, &g] { run_compare(*o, g); });
  }
  {
    auto o = std::make_shared<ConcOptions>();
    auto* sub = app.add_subcommand("conc", "Ice concentration MAE per frame and its median");
    sub->add_option("--gt", o->gt, "Ground-truth mask directory")->required()->check(CLI::ExistingDirectory);
    sub->add_option("--pred", o->pred, "Predicted mask directory (same file names)")->required()->check(CLI::ExistingDirectory);
    sub->add_option("--out", o->out, "Output directory (per_frame.csv, summary.csv)")->required();
    out.emplace_back(sub, [o, &g] { run_conc(*o, g); });
  }
  {
    auto o = std::make_shared<VidOptions>();
    auto* sub = app.add_subcommand("vidconsist", "Mean ice concentration difference between consecutive frames");
    sub->add_option("--masks", o->masks, "Directory of frame masks (lexicographic order)")->required()->check(CLI::ExistingDirectory);
    sub->add_option("--list", o->list, "File listing frame names in order, one per line")->check(CLI::ExistingFile);
    sub->add_option("--out", o->out, "Output directory (pairs.csv, summary.csv)")->required();
    sub->add_option("--plot-data", o->plot_data, "Optional CSV of frame index against difference");
    out.emplace_back(sub, [o, &g] { run_vidconsist(*o, g); });
  }
}

}  // namespace iceseg::cli
