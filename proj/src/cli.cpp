#include "bgx/cli.hpp"

#include <iostream>
#include <map>
#include <memory>

#include "CLI11.hpp"
#include "bgx/errors.hpp"
#include "bgx/parallel.hpp"
#include "bgx/pipeline.hpp"

namespace bgx::cli {

namespace {

namespace fs = std::filesystem;

struct Common {
  int threads = 0;
  int verbose = 0;
};

struct InputFlags {
  std::string source;
  std::size_t max_frames = 0;

  FrameSequenceSpec spec() const {
    FrameSequenceSpec s{source, std::nullopt};
    if (max_frames > 0) s.max_frames = max_frames;
    return s;
  }
};

struct MrfFlags {
  std::optional<double> lambda_a;
  std::optional<double> lambda_b;

  std::optional<MrfParams> params() const {
    if (!lambda_a && !lambda_b) return std::nullopt;
    if (!lambda_a || !lambda_b) throw InvalidArgument("--lambda-a and --lambda-b must be given together");
    return MrfParams{*lambda_a, *lambda_b};
  }
};

// INI reader that files top-level keys under the subcommand being run, so a
// plain `key = value` file works with `bgx <command> --config file`.
class SubcommandIni : public CLI::ConfigINI {
 public:
  explicit SubcommandIni(const CLI::App& app) : app_(app) {}

  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::vector<CLI::ConfigItem> items = CLI::ConfigINI::from_config(input);
    const auto active = app_.get_subcommands();
    if (active.empty()) return items;
    for (CLI::ConfigItem& item : items)
      if (item.parents.empty()) item.parents = {active.front()->get_name()};
    return items;
  }

 private:
  const CLI::App& app_;
};

void add_common(CLI::App* sub, Common& c) {
  sub->fallthrough();
  sub->add_option("--threads", c.threads, "worker threads, 0 = runtime default")->check(CLI::NonNegativeNumber);
  sub->add_flag("-v,--verbose", c.verbose, "progress messages on stderr");
}

void add_input(CLI::App* sub, InputFlags& in) {
  sub->add_option("-i,--input", in.source, "frame directory or manifest file")->required();
  sub->add_option("--max-frames", in.max_frames, "read at most this many frames, 0 = all")
      ->check(CLI::NonNegativeNumber);
}

void add_selection(CLI::App* sub, SelectionParams& p) {
  sub->add_option("--n-select", p.n_select, "number of frames handed to the background engine")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--lambda-rel", p.lambda_rel, "relative sparse-coding penalty")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--tau-rel", p.tau_rel, "relative threshold for useful frames")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  const std::map<std::string, SelectionDirection> dirs{{"most-distinct", SelectionDirection::kMostDistinct},
                                                       {"least-distinct", SelectionDirection::kLeastDistinct}};
  sub->add_option("--direction", p.direction, "distance ranking order")
      ->transform(CLI::CheckedTransformer(dirs, CLI::ignore_case).description(""))
      ->option_text("most-distinct|least-distinct [most-distinct]");
}

void add_engine(CLI::App* sub, EngineConfig& e) {
  sub->add_option("--mu", e.mu, "ADM penalty, default 1/std of the data")->check(CLI::PositiveNumber);
  sub->add_option("--inner-tol", e.inner_tol, "ADM relative change tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--inner-max-iter", e.inner_max_iter, "ADM iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--outer-tol", e.outer_tol, "outer loop relative change tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_option("--outer-max-iter", e.outer_max_iter, "outer loop iteration cap")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  const std::map<std::string, AdmMode> modes{{"solve", AdmMode::kSolve}, {"single-step", AdmMode::kSingleStep}};
  sub->add_option("--adm-mode", e.adm_mode, "solve the ADM per outer cycle or take one step")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case).description(""))
      ->option_text("solve|single-step [solve]");
  sub->add_flag("--warm-start-lambda", e.warm_start_lambda, "carry the multiplier across outer cycles");
  const std::map<std::string, Projection> projections{{"mean", Projection::kMean}, {"median", Projection::kMedian}};
  sub->add_option("--projection", e.projection, "collapse of the frame mode")
      ->transform(CLI::CheckedTransformer(projections, CLI::ignore_case).description(""))
      ->option_text("mean|median [mean]");
}

void add_mrf(CLI::App* sub, MrfFlags& m) {
  sub->add_option("--lambda-a", m.lambda_a, "foreground cost per pixel, default estimated")
      ->check(CLI::NonNegativeNumber);
  sub->add_option("--lambda-b", m.lambda_b, "label disagreement cost per neighbour pair, default estimated")
      ->check(CLI::NonNegativeNumber);
}

ExitCode convergence_code(const BackgroundResult& r, std::ostream& err) {
  if (r.converged) return ExitCode::kOk;
  err << "bgx: outer loop stopped after " << r.outer_iters << " iterations (relative change " << r.final_rel_change
      << "); artifacts were written\n";
  return ExitCode::kNotConverged;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Video background extraction, foreground detection and evaluation", "bgx"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value file; flags on the command line take precedence");
  app.config_formatter(std::make_shared<SubcommandIni>(app));
  app.allow_config_extras(CLI::config_extras_mode::error);

  Common common;
  InputFlags input;
  MrfFlags mrf;

  ExtractOptions extract;
  std::string extract_out;
  CLI::App* extract_cmd = app.add_subcommand("extract", "select frames and extract the background");
  add_common(extract_cmd, common);
  add_input(extract_cmd, input);
  extract_cmd->add_option("-o,--out", extract_out, "output directory")->required();
  add_selection(extract_cmd, extract.selection);
  add_engine(extract_cmd, extract.engine);

  DetectOptions detect;
  std::string detect_background, detect_masks, detect_truth, detect_report;
  CLI::App* detect_cmd = app.add_subcommand("detect", "segment per-frame foreground masks");
  add_common(detect_cmd, common);
  add_input(detect_cmd, input);
  detect_cmd->add_option("--background", detect_background, "background as .bgt tensor or image");
  detect_cmd->add_flag("--extract-first", detect.extract_first, "extract the background from the input first");
  detect_cmd->add_option("--mask-out", detect_masks, "directory for black/white masks");
  detect_cmd->add_option("--truth-dir", detect_truth, "ground-truth masks for per-frame metrics");
  detect_cmd->add_option("--report", detect_report, "JSON report path");
  add_mrf(detect_cmd, mrf);
  add_selection(detect_cmd, detect.selection);
  add_engine(detect_cmd, detect.engine);

  EvalOptions eval;
  std::string eval_report;
  CLI::App* eval_cmd = app.add_subcommand("eval", "precision, recall and F-measure of predicted masks");
  add_common(eval_cmd, common);
  eval_cmd->add_option("--pred-dir", eval.pred_dir, "predicted masks")->required();
  eval_cmd->add_option("--truth-dir", eval.truth_dir, "ground-truth masks")->required();
  eval_cmd->add_option("--report", eval_report, "JSON report path");

  SweepOptions sweep;
  std::string sweep_n = "1..30", sweep_report;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "distance ratio against the number of selected frames");
  add_common(sweep_cmd, common);
  add_input(sweep_cmd, input);
  sweep_cmd->add_option("--n", sweep_n, "frame counts, e.g. 1..30 or 5,10,25")->capture_default_str();
  sweep_cmd->add_option("--standard-n", sweep.standard_n, "frame count of the reference background")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sweep_cmd->add_option("--report", sweep_report, "JSON report path");
  add_selection(sweep_cmd, sweep.selection);
  add_engine(sweep_cmd, sweep.engine);

  SynthOptions synth;
  std::string synth_out;
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic moving-square sequence");
  add_common(synth_cmd, common);
  synth_cmd->add_option("-o,--out", synth_out, "output directory")->required();
  synth_cmd->add_option("--seed", synth.scene.seed, "generator seed")->required();
  synth_cmd->add_option("--frames", synth.scene.frames)->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--width", synth.scene.width)->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--height", synth.scene.height)->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--square", synth.scene.square, "square side, 0 for a static scene")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  synth_cmd->add_option("--vx", synth.scene.vx, "horizontal speed in pixels per frame")->capture_default_str();
  synth_cmd->add_option("--vy", synth.scene.vy, "vertical speed in pixels per frame")->capture_default_str();
  synth_cmd->add_option("--noise", synth.scene.noise, "Gaussian noise standard deviation")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kUsage);
  }

  const auto log = [&](const std::string& msg) {
    if (common.verbose > 0) err << "bgx: " << msg << "\n";
  };
  parallel::set_threads(common.threads);
  log("using " + std::to_string(parallel::max_threads()) + " threads");

  ExitCode code = ExitCode::kOk;
  try {
    if (extract_cmd->parsed()) {
      extract.input = input.spec();
      extract.out_dir = extract_out;
      log("extracting background from " + input.source);
      const ExtractOutcome outcome = run_extract(extract);
      log("selected " + std::to_string(outcome.selection.selected_indices.size()) + " frames, " +
          std::to_string(outcome.background.outer_iters) + " outer iterations");
      code = convergence_code(outcome.background, err);
    } else if (detect_cmd->parsed()) {
      detect.input = input.spec();
      if (!detect_background.empty()) detect.background = detect_background;
      if (!detect_masks.empty()) detect.mask_out = detect_masks;
      if (!detect_truth.empty()) detect.truth_dir = detect_truth;
      if (!detect_report.empty()) detect.report = detect_report;
      detect.mrf = mrf.params();
      log("detecting foreground in " + input.source);
      const nlohmann::json report = run_detect(detect);
      if (report.contains("metrics"))
        log("aggregate F-measure " + std::to_string(report["metrics"]["aggregate"]["f_measure"].get<double>()));
      if (!detect.report && !detect.mask_out) out << report.dump(2) << "\n";
    } else if (eval_cmd->parsed()) {
      if (!eval_report.empty()) eval.report = eval_report;
      const nlohmann::json report = run_eval(eval);
      if (!eval.report) out << report.dump(2) << "\n";
    } else if (sweep_cmd->parsed()) {
      sweep.input = input.spec();
      sweep.n_values = parse_frame_counts(sweep_n);
      if (!sweep_report.empty()) sweep.report = sweep_report;
      log("sweeping " + std::to_string(sweep.n_values.size()) + " frame counts");
      const nlohmann::json report = run_sweep(sweep);
      if (!sweep.report) out << report.dump(2) << "\n";
    } else if (synth_cmd->parsed()) {
      synth.out_dir = synth_out;
      log("writing synthetic scene to " + synth_out);
      run_synth(synth);
    }
  } catch (const InvalidArgument& e) {
    err << "bgx: " << e.what() << "\n";
    code = ExitCode::kUsage;
  } catch (const IngestError& e) {
    err << "bgx: input error: " << e.what() << "\n";
    code = ExitCode::kInput;
  } catch (const DataError& e) {
    err << "bgx: input error: " << e.what() << "\n";
    code = ExitCode::kInput;
  } catch (const MissingBackground& e) {
    err << "bgx: " << e.what() << "\n";
    code = ExitCode::kMissingBackground;
  } catch (const DivergenceError& e) {
    err << "bgx: " << e.what() << "\n";
    code = ExitCode::kDivergence;
  } catch (const IoError& e) {
    err << "bgx: output error: " << e.what() << "\n";
    code = ExitCode::kOutput;
  } catch (const std::exception& e) {
    err << "bgx: internal error: " << e.what() << "\n";
    code = ExitCode::kFailure;
  }
  parallel::set_threads(0);
  return static_cast<int>(code);
}

}  // namespace bgx::cli
