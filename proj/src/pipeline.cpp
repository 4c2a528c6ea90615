#include "bgx/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "bgx/errors.hpp"
#include "bgx/image_codec.hpp"

namespace bgx {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - start_).count();
    start_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

const char* name_of(SelectionDirection d) {
  return d == SelectionDirection::kMostDistinct ? "most-distinct" : "least-distinct";
}

std::string numbered(const char* stem, std::size_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%05zu%s", stem, i, ext);
  return buf;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

Tensor load_background(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw MissingBackground("background " + path.string() + " does not exist");
  if (path.extension() == ".bgt") {
    Tensor t = read_tensor(path);
    if (t.order() != 3 || t.extent(2) != 3) throw MissingBackground(path.string() + " is not a (h, w, 3) tensor");
    return t;
  }
  return load_image(path);
}

std::vector<ForegroundMask> load_masks(const fs::path& dir, std::vector<std::string>* names = nullptr) {
  std::vector<ForegroundMask> masks;
  for (const fs::path& p : resolve_sequence({dir, std::nullopt})) {
    masks.push_back(load_mask(p));
    if (names) names->push_back(p.filename().string());
  }
  return masks;
}

}  // namespace

ExtractOutcome extract_from_video(const Tensor& video, const SelectionParams& selection, const EngineConfig& engine) {
  ExtractOutcome out;
  Stopwatch clock;
  out.selection = select_frames(to_gray(video), selection);
  out.timings.selection = clock.lap();
  out.background = extract_background(gather_frames(video, out.selection.selected_indices), engine);
  out.timings.extraction = clock.lap();
  return out;
}

ExtractOutcome run_extract(const ExtractOptions& options, json* report_out) {
  Stopwatch clock;
  const Tensor video = load_sequence(options.input);
  const double load = clock.lap();

  ExtractOutcome out = extract_from_video(video, options.selection, options.engine);
  out.timings.load = load;
  for (const std::string& w : out.selection.warnings) std::cerr << "warning: " << w << "\n";

  clock.lap();
  ensure_dir(options.out_dir);
  save_frame(out.background.background, options.out_dir / "background.png");
  write_tensor(out.background.background, options.out_dir / "background.bgt");
  out.timings.output = clock.lap();

  json report;
  report["command"] = "extract";
  report["config"] = {{"input", options.input.source.string()},
                      {"max_frames", options.input.max_frames ? json(*options.input.max_frames) : json(nullptr)},
                      {"selection", to_json(options.selection)},
                      {"engine", to_json(options.engine)}};
  report["frames"] = video.extent(3);
  report["shape"] = {video.extent(0), video.extent(1), video.extent(2)};
  report["selection"] = to_json(out.selection);
  report["convergence"] = to_json(out.background);
  report["timings"] = to_json(out.timings);
  report["artifacts"] = {"background.png", "background.bgt", "report.json"};
  write_json(report, options.out_dir / "report.json");
  if (report_out) *report_out = std::move(report);
  return out;
}

json run_detect(const DetectOptions& options) {
  Stopwatch clock;
  StageTimings timings;
  Tensor background;
  if (options.background) {
    background = load_background(*options.background);
  } else if (!options.extract_first) {
    throw MissingBackground("detect needs --background or --extract-first");
  }
  const Tensor video = load_sequence(options.input);
  timings.load = clock.lap();

  json report;
  report["command"] = "detect";
  if (!options.background) {
    ExtractOutcome ex = extract_from_video(video, options.selection, options.engine);
    background = std::move(ex.background.background);
    timings.selection = ex.timings.selection;
    timings.extraction = ex.timings.extraction;
    report["selection"] = to_json(ex.selection);
    report["convergence"] = to_json(ex.background);
    clock.lap();
  }
  if (background.extent(0) != video.extent(0) || background.extent(1) != video.extent(1))
    throw IngestError("background shape does not match the frames");

  const std::vector<ForegroundMask> masks = detect_all(video, background, options.mrf);
  timings.detection = clock.lap();

  const std::vector<fs::path> frame_files = resolve_sequence(options.input);
  if (options.mask_out) {
    ensure_dir(*options.mask_out);
    for (std::size_t i = 0; i < masks.size(); ++i) save_mask(masks[i], *options.mask_out / numbered("mask", i, ".png"));
  }
  if (options.truth_dir) {
    std::vector<std::string> truth_names;
    const std::vector<ForegroundMask> truth = load_masks(*options.truth_dir, &truth_names);
    if (truth.size() != masks.size())
      throw IngestError("truth directory has " + std::to_string(truth.size()) + " masks for " +
                        std::to_string(masks.size()) + " frames");
    for (std::size_t i = 0; i < truth.size(); ++i)
      if (truth[i].height != masks[i].height || truth[i].width != masks[i].width)
        throw IngestError("truth mask " + truth_names[i] + " is " + std::to_string(truth[i].width) + "x" +
                          std::to_string(truth[i].height) + ", frames are " + std::to_string(masks[i].width) + "x" +
                          std::to_string(masks[i].height));
    std::vector<std::string> names;
    for (const fs::path& p : frame_files) names.push_back(p.filename().string());
    report["metrics"] = mask_metrics(masks, truth, names);
  }
  timings.output = clock.lap();

  report["config"] = {{"input", options.input.source.string()},
                      {"background", options.background ? json(options.background->string()) : json(nullptr)},
                      {"extract_first", options.extract_first},
                      {"lambda_a", options.mrf ? json(options.mrf->lambda_a) : json("auto")},
                      {"lambda_b", options.mrf ? json(options.mrf->lambda_b) : json("auto")},
                      {"selection", to_json(options.selection)},
                      {"engine", to_json(options.engine)}};
  json counts = json::array();
  for (const auto& m : masks) counts.push_back(m.count());
  report["foreground_pixels"] = counts;
  report["timings"] = to_json(timings);
  if (options.report) write_json(report, *options.report);
  return report;
}

json run_eval(const EvalOptions& options) {
  std::vector<std::string> names;
  const std::vector<ForegroundMask> predicted = load_masks(options.pred_dir, &names);
  const std::vector<ForegroundMask> truth = load_masks(options.truth_dir);
  if (predicted.size() != truth.size())
    throw IngestError("prediction and truth directories hold different mask counts (" +
                      std::to_string(predicted.size()) + " vs " + std::to_string(truth.size()) + ")");
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (predicted[i].height != truth[i].height || predicted[i].width != truth[i].width)
      throw IngestError("mask " + names[i] + " does not match the shape of its truth mask");
  json report;
  report["command"] = "eval";
  report["config"] = {{"pred_dir", options.pred_dir.string()}, {"truth_dir", options.truth_dir.string()}};
  report["metrics"] = mask_metrics(predicted, truth, names);
  if (options.report) write_json(report, *options.report);
  return report;
}

json run_sweep(const SweepOptions& options) {
  Stopwatch clock;
  const Tensor video = load_sequence(options.input);
  const double load = clock.lap();
  const SweepReport sweep =
      sweep_n_frames(video, options.n_values, options.standard_n, options.selection, options.engine);
  for (const std::string& w : sweep.warnings) std::cerr << "warning: " << w << "\n";

  json report;
  report["command"] = "sweep";
  report["config"] = {{"input", options.input.source.string()},
                      {"n", options.n_values},
                      {"standard_n", options.standard_n},
                      {"selection", to_json(options.selection)},
                      {"engine", to_json(options.engine)}};
  report["standard_n_effective"] = sweep.standard_n;
  json points = json::array();
  for (const auto& p : sweep.points) points.push_back({{"n_frames", p.n_frames}, {"ratio", p.ratio}});
  report["points"] = points;
  report["ranking"] = sweep.selection.ranking;
  report["warnings"] = sweep.warnings;
  report["timings"] = {{"load", load}, {"sweep", clock.lap()}};
  if (options.report) write_json(report, *options.report);
  return report;
}

void run_synth(const SynthOptions& options) {
  const SynthScene scene = generate_scene(options.scene);
  const fs::path frames_dir = options.out_dir / "frames";
  const fs::path masks_dir = options.out_dir / "masks";
  ensure_dir(frames_dir);
  ensure_dir(masks_dir);
  const std::size_t n = scene.frames.extent(3);
  for (std::size_t f = 0; f < n; ++f) {
    save_frame(frame_at(scene.frames, f), frames_dir / numbered("frame", f, ".png"));
    save_mask(scene.masks[f], masks_dir / numbered("mask", f, ".png"));
  }
  save_frame(scene.background, options.out_dir / "background.png");
  write_tensor(scene.background, options.out_dir / "background.bgt");
  write_tensor(scene.frames, options.out_dir / "frames.bgt");
  const SynthConfig& c = options.scene;
  json meta = {{"command", "synth"},
               {"height", c.height},
               {"width", c.width},
               {"frames", c.frames},
               {"square", c.square},
               {"vx", c.vx},
               {"vy", c.vy},
               {"noise", c.noise},
               {"seed", c.seed},
               {"square_color", c.square_color}};
  write_json(meta, options.out_dir / "scene.json");
}

std::vector<std::size_t> parse_frame_counts(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  const auto to_count = [&](const std::string& s) -> std::size_t {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("bad frame count '" + s + "' in '" + text + "'");
    }
    if (used != s.size() || v < 1) throw InvalidArgument("bad frame count '" + s + "' in '" + text + "'");
    return static_cast<std::size_t>(v);
  };
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_count(item));
      continue;
    }
    const std::size_t lo = to_count(item.substr(0, dots));
    const std::size_t hi = to_count(item.substr(dots + 2));
    if (hi < lo) throw InvalidArgument("empty range '" + item + "'");
    for (std::size_t v = lo; v <= hi; ++v) out.push_back(v);
  }
  if (out.empty()) throw InvalidArgument("no frame counts in '" + text + "'");
  return out;
}

json to_json(const SelectionParams& p) {
  return {{"n_select", p.n_select},
          {"lambda_rel", p.lambda_rel},
          {"tau_rel", p.tau_rel},
          {"direction", name_of(p.direction)},
          {"sparse_tolerance", p.sparse.tolerance},
          {"sparse_max_iter", p.sparse.max_iter}};
}

json to_json(const EngineConfig& c) {
  return {{"mu", c.mu ? json(*c.mu) : json("auto")},
          {"inner_tol", c.inner_tol},
          {"inner_max_iter", c.inner_max_iter},
          {"outer_tol", c.outer_tol},
          {"outer_max_iter", c.outer_max_iter},
          {"adm_mode", c.adm_mode == AdmMode::kSolve ? "solve" : "single-step"},
          {"warm_start_lambda", c.warm_start_lambda},
          {"projection", c.projection == Projection::kMean ? "mean" : "median"}};
}

json to_json(const SelectionResult& r) {
  return {{"useful_indices", r.useful_indices},
          {"scores", r.scores},
          {"selected_indices", r.selected_indices},
          {"warnings", r.warnings}};
}

json to_json(const BackgroundResult& r) {
  return {{"outer_iters", r.outer_iters},
          {"converged", r.converged},
          {"final_rel_change", r.final_rel_change},
          {"history", r.history},
          {"mu", r.mu},
          {"inner_iterations", r.inner_iterations}};
}

json to_json(const StageTimings& t) {
  return {{"load", t.load},
          {"selection", t.selection},
          {"extraction", t.extraction},
          {"detection", t.detection},
          {"output", t.output}};
}

json mask_metrics(const std::vector<ForegroundMask>& predicted, const std::vector<ForegroundMask>& truth,
                  const std::vector<std::string>& names) {
  json frames = json::array();
  ConfusionCounts total;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const ConfusionCounts c = confusion(predicted[i], truth[i]);
    const FMeasure m = f_measure(c);
    total += c;
    frames.push_back({{"frame", i < names.size() ? names[i] : std::to_string(i)},
                      {"tp", c.tp},
                      {"fp", c.fp},
                      {"tn", c.tn},
                      {"fn", c.fn},
                      {"precision", m.precision},
                      {"recall", m.recall},
                      {"f_measure", m.f}});
  }
  const FMeasure agg = f_measure(total);
  return {{"frames", frames},
          {"aggregate",
           {{"tp", total.tp},
            {"fp", total.fp},
            {"tn", total.tn},
            {"fn", total.fn},
            {"precision", agg.precision},
            {"recall", agg.recall},
            {"f_measure", agg.f}}}};
}

void write_json(const json& j, const fs::path& path) {
  const std::string text = j.dump(2) + "\n";
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  write_file_atomic(path, std::vector<char>(text.begin(), text.end()));
}

}  // namespace bgx
