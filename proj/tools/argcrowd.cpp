// Command line front end for the argcrowd pipeline.
//
// Exit codes: 0 success, 1 runtime failure (input, I/O, missing stage or
// gold), 2 invalid configuration or command line.

#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "argcrowd/errors.hpp"
#include "argcrowd/pipeline.hpp"

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::optional<double> easy_threshold;
  std::optional<double> sentence_threshold;
  std::optional<std::string> input;
  std::optional<std::string> output;
  std::vector<std::string> settings;
};

argcrowd::PipelineConfig make_config(const Options& o) {
  argcrowd::PipelineConfig cfg;
  if (!o.config.empty()) cfg = argcrowd::PipelineConfig::load(o.config);
  for (const auto& s : o.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw argcrowd::ConfigError("--set expects key=value, got '" + s + "'");
    cfg.set(argcrowd::pipeline_detail::trim(std::string_view(s).substr(0, eq)), std::string_view(s).substr(eq + 1));
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) cfg.threads = *o.threads;
  if (o.easy_threshold) cfg.thresholds.easy = *o.easy_threshold;
  if (o.sentence_threshold) cfg.thresholds.sentence = *o.sentence_threshold;
  if (o.input) cfg.input_root = *o.input;
  if (o.output) cfg.output_root = *o.output;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crowdsourced argument annotation: agreement, quality control and corpus construction"};
  app.require_subcommand(1);
  Options o;
  app.add_option("-c,--config", o.config, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--set", o.settings, "override one configuration key (key=value)");
  app.add_option("--seed", o.seed, "seed for resampling and simulation");
  app.add_option("--threads", o.threads, "worker threads; 0 uses every core");
  app.add_option("--easy-threshold", o.easy_threshold, "document alpha_U needed for the easy corpus");
  app.add_option("--sentence-threshold", o.sentence_threshold, "sentence alpha_U needed for the sentence corpus");
  app.add_option("-i,--input", o.input, "campaign root directory");
  app.add_option("-o,--output", o.output, "artifact directory");

  using Stage = void (argcrowd::Pipeline::*)();
  const std::vector<std::tuple<const char*, const char*, Stage>> stages = {
      {"validate", "load the campaign, apply structural rules, write the validation report",
       &argcrowd::Pipeline::validate},
      {"agreement", "score every document and sentence", &argcrowd::Pipeline::agreement},
      {"filter", "score annotators on gold documents and remove low-quality ones", &argcrowd::Pipeline::filter},
      {"aggregate", "aggregate the filtered campaign into consensus annotations", &argcrowd::Pipeline::aggregate},
      {"build", "build the easy and sentence corpora with statistics", &argcrowd::Pipeline::build},
      {"cpm", "confusion probability matrices over both corpora", &argcrowd::Pipeline::cpm},
      {"report", "summary of every stage", &argcrowd::Pipeline::report},
      {"simulate", "write a synthetic campaign with ground truth into the input root",
       &argcrowd::Pipeline::simulate},
      {"all", "validate, agreement, filter, aggregate, build, cpm and report", &argcrowd::Pipeline::run_all},
  };
  Stage chosen = nullptr;
  for (const auto& [name, help, stage] : stages) {
    auto* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->callback([&chosen, stage = stage] { chosen = stage; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    argcrowd::Pipeline pipeline(make_config(o));
    (pipeline.*chosen)();
  } catch (const argcrowd::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const argcrowd::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
