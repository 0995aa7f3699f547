// tissuegmm: synth | train | predict | eval
//
// Exit codes: 0 success, 2 usage or input error, 3 numerical failure. On
// failure a single line "error: <Class>: <message>" goes to stderr.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "tissuegmm/error.hpp"
#include "tissuegmm/pipeline.hpp"

namespace fs = std::filesystem;
using namespace tissuegmm;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string tracks;
  std::string model;
  std::string times;
  std::string split;
};

PipelineConfig resolve(const Options& opt) {
  PipelineConfig config = opt.config.empty() ? PipelineConfig{} : load_config(opt.config);
  if (!opt.tracks.empty()) config.tracks = opt.tracks;
  if (!opt.model.empty()) config.model = opt.model;
  if (!opt.out.empty()) config.out = opt.out;
  return config;
}

fs::path require(const std::optional<fs::path>& p, const char* flag) {
  if (!p) fail(ErrorKind::UsageError, std::string("missing required ") + flag);
  return *p;
}

int report(ErrorKind kind, const std::string& message) {
  std::cerr << "error: " << to_string(kind) << ": " << message << '\n';
  return exit_code(kind);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tool-tissue pose modelling from sparse keypoint tracks"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config, "JSON config file");
    cmd->add_option("--seed", opt.seed, "Seed override");
    cmd->add_option("--out", opt.out, "Output path");
  };

  auto* synth = app.add_subcommand("synth", "Generate a synthetic track CSV");
  add_common(synth);

  auto* train = app.add_subcommand("train", "Train a mixture model on a track CSV");
  add_common(train);
  train->add_option("--tracks", opt.tracks, "Track CSV");
  train->add_option("--split", opt.split, "TRAIN/TEST head/tail split; trains on the head");

  auto* predict = app.add_subcommand("predict", "Predict tool poses at given times");
  add_common(predict);
  predict->add_option("--model", opt.model, "Model file");
  predict->add_option("--tracks", opt.tracks, "Track CSV supplying tissue landmarks");
  predict->add_option("--times", opt.times, "\"a,b,c\" or grid:N")->required();

  auto* eval = app.add_subcommand("eval", "Evaluate a model on a train/test split");
  add_common(eval);
  eval->add_option("--model", opt.model, "Model file");
  eval->add_option("--tracks", opt.tracks, "Track CSV");
  eval->add_option("--split", opt.split, "TRAIN/TEST");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report(ErrorKind::UsageError, e.what());
  }

  try {
    PipelineConfig config = resolve(opt);
    if (synth->parsed()) {
      if (opt.seed) config.synth.seed = *opt.seed;
      run_synth(config, require(config.out, "--out"));
    } else if (train->parsed()) {
      if (opt.seed) {
        config.gmm.seed = *opt.seed;
        config.cluster.seed = *opt.seed;
      }
      if (!opt.split.empty()) {
        const SplitSpec s = parse_split(opt.split);
        config.split_train = s.train_count();
        config.split_test = s.test_count();
      }
      const fs::path out = require(config.out, "--out");
      const TrainSummary summary =
          run_train(config, require(config.tracks, "--tracks"), out, log_path(out));
      std::cout << "selected_N=" << summary.selection.components
                << " train_pos_px=" << summary.train_pos_px
                << " train_angle_deg=" << summary.train_angle_deg << '\n';
    } else if (predict->parsed()) {
      if (opt.seed) config.cluster.seed = *opt.seed;
      run_predict(config, require(config.model, "--model"), require(config.tracks, "--tracks"),
                  parse_times(opt.times), require(config.out, "--out"));
    } else if (eval->parsed()) {
      if (opt.seed) config.cluster.seed = *opt.seed;
      std::optional<SplitSpec> spec;
      if (!opt.split.empty()) {
        spec = parse_split(opt.split);
      } else if (config.split_train && config.split_test) {
        spec = SplitSpec(*config.split_train, *config.split_test);
      } else {
        fail(ErrorKind::UsageError, "missing required --split");
      }
      const EvalReport r = run_eval(config, require(config.model, "--model"),
                                    require(config.tracks, "--tracks"), *spec,
                                    require(config.out, "--out"));
      std::cout << "mean_train_pos_px=" << r.mean_train_pos_px
                << " mean_test_pos_px=" << r.mean_test_pos_px
                << " mean_train_angle_deg=" << r.mean_train_angle_deg
                << " mean_test_angle_deg=" << r.mean_test_angle_deg << '\n';
    }
  } catch (const Error& e) {
    return report(e.kind(), e.what());
  } catch (const std::exception& e) {
    std::cerr << "error: InternalError: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
