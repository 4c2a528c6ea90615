#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bgx/background_engine.hpp"
#include "bgx/evaluation.hpp"
#include "bgx/foreground_mrf.hpp"
#include "bgx/frame_io.hpp"
#include "bgx/frame_selection.hpp"
#include "bgx/synthetic.hpp"
#include "json.hpp"

namespace bgx {

/// Process exit codes of the command-line tool.
enum class ExitCode : int {
  kOk = 0,
  kFailure = 1,            // unexpected internal error
  kUsage = 2,              // invalid flags or configuration; nothing written
  kInput = 3,              // input missing, undecodable or inconsistent
  kMissingBackground = 4,  // detect without a usable background
  kDivergence = 5,         // non-finite ADM iterates
  kNotConverged = 6,       // outer loop hit its cap; artifacts still written
  kOutput = 7,             // an artifact could not be written
};

/// Wall-clock seconds per pipeline stage.
struct StageTimings {
  double load = 0.0;
  double selection = 0.0;
  double extraction = 0.0;
  double detection = 0.0;
  double output = 0.0;
};

struct ExtractOutcome {
  SelectionResult selection;
  BackgroundResult background;
  StageTimings timings;
};

/// Selection followed by background extraction on an in-memory video.
ExtractOutcome extract_from_video(const Tensor& video, const SelectionParams& selection, const EngineConfig& engine);

struct ExtractOptions {
  FrameSequenceSpec input;
  std::filesystem::path out_dir;
  SelectionParams selection;
  EngineConfig engine;
};

/// Writes background.png, background.bgt and report.json into out_dir.
ExtractOutcome run_extract(const ExtractOptions& options, nlohmann::json* report_out = nullptr);

struct DetectOptions {
  FrameSequenceSpec input;
  std::optional<std::filesystem::path> background;  // .bgt tensor or image
  bool extract_first = false;
  SelectionParams selection;
  EngineConfig engine;
  std::optional<MrfParams> mrf;  // unset: estimated per frame
  std::optional<std::filesystem::path> mask_out;
  std::optional<std::filesystem::path> truth_dir;
  std::optional<std::filesystem::path> report;
};

/// Thrown when detect has no background to work with.
class MissingBackground : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json run_detect(const DetectOptions& options);

struct EvalOptions {
  std::filesystem::path pred_dir;
  std::filesystem::path truth_dir;
  std::optional<std::filesystem::path> report;
};

nlohmann::json run_eval(const EvalOptions& options);

struct SweepOptions {
  FrameSequenceSpec input;
  std::vector<std::size_t> n_values;
  std::size_t standard_n = 40;
  SelectionParams selection;
  EngineConfig engine;
  std::optional<std::filesystem::path> report;
};

nlohmann::json run_sweep(const SweepOptions& options);

struct SynthOptions {
  SynthConfig scene;
  std::filesystem::path out_dir;
};

/// Writes frames/, masks/, background.png, background.bgt and scene.json.
void run_synth(const SynthOptions& options);

/// Parses "1..30", "5,10,25" or mixtures such as "1..5,10".
std::vector<std::size_t> parse_frame_counts(const std::string& text);

nlohmann::json to_json(const SelectionParams& p);
nlohmann::json to_json(const EngineConfig& c);
nlohmann::json to_json(const SelectionResult& r);
nlohmann::json to_json(const BackgroundResult& r);
nlohmann::json to_json(const StageTimings& t);

/// Per-frame and aggregate precision/recall/F for mask lists of equal length.
nlohmann::json mask_metrics(const std::vector<ForegroundMask>& predicted, const std::vector<ForegroundMask>& truth,
                            const std::vector<std::string>& names);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace bgx
