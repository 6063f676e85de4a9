// orthosim: run, validate and inspect orthogonal-state protocol experiments.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "orthosim/config_io.hpp"
#include "orthosim/error.hpp"
#include "orthosim/experiment.hpp"

namespace fs = std::filesystem;
using namespace orthosim;

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kRuntime = 2;

struct Source {
  std::string label;
  std::string text;
};

// Exactly one of --config / --builtin must be given.
std::optional<Source> load_source(const std::string& config, const std::string& builtin) {
  if (config.empty() == builtin.empty()) {
    std::cerr << "error: give exactly one of --config or --builtin\n";
    return std::nullopt;
  }
  if (!builtin.empty()) {
    const auto* b = experiment::find_builtin(builtin);
    if (!b) {
      std::cerr << "error: unknown builtin '" << builtin << "' (see list-builtins)\n";
      return std::nullopt;
    }
    return Source{"builtin:" + b->name, b->ini};
  }
  try {
    return Source{config, config_io::read_file(config)};
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return std::nullopt;
  }
}

void print_issues(const std::string& label, const std::vector<config_io::ConfigIssue>& issues) {
  for (const auto& i : issues) {
    std::cerr << label;
    if (i.line) std::cerr << ':' << i.line;
    std::cerr << ": ";
    if (!i.field.empty()) std::cerr << i.field << ": ";
    std::cerr << i.message << '\n';
  }
}

int cmd_validate(const std::string& config, const std::string& builtin) {
  auto src = load_source(config, builtin);
  if (!src) return kValidation;
  const auto loaded = config_io::parse_config(src->text);
  if (!loaded.ok()) {
    print_issues(src->label, loaded.issues);
    return kValidation;
  }
  std::cout << src->label << ": ok (" << loaded.spec.points().size() << " point(s), " << loaded.spec.trials
            << " trial(s) each)\n";
  return kOk;
}

struct RunArgs {
  std::string config;
  std::string builtin;
  std::string out = "results";
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::size_t transcripts = 0;
  bool verbose = false;
};

int cmd_run(const RunArgs& args) {
  auto src = load_source(args.config, args.builtin);
  if (!src) return kValidation;
  auto loaded = config_io::parse_config(src->text);
  if (!loaded.ok()) {
    print_issues(src->label, loaded.issues);
    return kValidation;
  }
  auto& spec = loaded.spec;
  if (args.trials) {
    if (*args.trials == 0) {
      std::cerr << "error: --trials must be at least 1\n";
      return kValidation;
    }
    spec.trials = *args.trials;
  }
  if (args.seed) spec.seed_base = *args.seed;
  if (const auto d = spec.validate(); !d.empty()) {
    for (const auto& x : d) std::cerr << src->label << ": " << x.field << ": " << x.message << '\n';
    return kValidation;
  }

  const fs::path out_dir(args.out);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    std::cerr << "error: cannot create output directory " << out_dir << '\n';
    return kRuntime;
  }

  experiment::RunOptions options;
  bool write_failed = false;
  if (args.transcripts > 0) {
    options.on_trial = [&](std::size_t point, std::size_t trial, const protocols::RunResult& r) {
      if (trial >= args.transcripts) return;
      const std::string stem = "point" + std::to_string(point) + "_trial" + std::to_string(trial);
      std::ofstream doc(out_dir / (stem + ".json"));
      doc << config_io::to_json(r).dump(2) << '\n';
      std::ofstream jsonl(out_dir / (stem + ".jsonl"));
      r.transcript.write_jsonl(jsonl);
      write_failed |= !doc || !jsonl;
    };
  }

  std::vector<experiment::PointSummary> rows;
  try {
    rows = experiment::run_experiment(spec, options);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }

  std::ofstream csv(out_dir / "results.csv");
  experiment::write_csv(csv, rows);
  std::ofstream meta(out_dir / "metadata.json");
  meta << config_io::metadata_json(spec, src->text, rows.size()).dump(2) << '\n';
  if (!csv || !meta || write_failed) {
    std::cerr << "error: failed writing results to " << out_dir << '\n';
    return kRuntime;
  }
  if (args.verbose) {
    for (const auto& r : rows)
      std::cerr << "point " << r.point << ": " << protocols::to_string(r.config.kind) << " completed " << r.completed
                << '/' << r.trials << ", mean e " << r.mean_error_rate << '\n';
  }
  std::cout << "wrote " << rows.size() << " row(s) to " << (out_dir / "results.csv").string() << '\n';
  return kOk;
}

int cmd_metrics(const std::string& path, std::optional<double> threshold) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "error: cannot read " << path << '\n';
    return kValidation;
  }
  transport::Transcript transcript;
  try {
    transcript = transport::Transcript::read_jsonl(in);
  } catch (const std::exception& e) {
    std::cerr << path << ": " << e.what() << '\n';
    return kValidation;
  }
  const auto m = experiment::evaluate_transcript(transcript);
  nlohmann::ordered_json j;
  j["records"] = m.records;
  j["carriers"] = m.carriers;
  j["tampered"] = m.tampered;
  j["checked"] = m.checked_bits;
  j["errors"] = m.bit_errors;
  j["error_rate"] = m.error_rate ? nlohmann::ordered_json(*m.error_rate) : nullptr;
  j["check_information"] = m.check_information ? nlohmann::ordered_json(*m.check_information) : nullptr;
  if (threshold) {
    j["threshold"] = *threshold;
    j["within_threshold"] = m.error_rate ? nlohmann::ordered_json(*m.error_rate <= *threshold) : nullptr;
  }
  std::cout << j.dump(2) << '\n';
  return kOk;
}

int cmd_list(bool verbose) {
  for (const auto& b : experiment::builtins()) {
    std::cout << b.name << "\t" << b.description << '\n';
    if (verbose) std::cout << b.ini << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulate orthogonal-state cryptographic protocols"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Print per-point progress")->configurable(false);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run an experiment and write results.csv plus metadata.json");
  run->add_option("-c,--config", run_args.config, "INI experiment config");
  run->add_option("-b,--builtin", run_args.builtin, "Name of a built-in experiment");
  run->add_option("-o,--out", run_args.out, "Output directory")->capture_default_str();
  run->add_option("-s,--seed", run_args.seed, "Override the seed base");
  run->add_option("-t,--trials", run_args.trials, "Override the trial count");
  run->add_option("--transcripts", run_args.transcripts,
                  "Also write run documents and JSONL transcripts for the first N trials of each point");
  run->add_flag("-v,--verbose", run_args.verbose, "Print per-point progress");

  std::string v_config, v_builtin;
  auto* validate = app.add_subcommand("validate", "Check a config against every invariant");
  validate->add_option("path", v_config, "INI experiment config");
  validate->add_option("-c,--config", v_config, "INI experiment config");
  validate->add_option("-b,--builtin", v_builtin, "Name of a built-in experiment");

  std::string transcript_path;
  std::optional<double> threshold;
  auto* metrics = app.add_subcommand("metrics", "Error rate and check information of a saved JSONL transcript");
  metrics->add_option("transcript", transcript_path, "Transcript written by run --transcripts")->required();
  metrics->add_option("-e,--threshold", threshold, "Abort threshold e0 to compare against");

  bool list_verbose = false;
  auto* list = app.add_subcommand("list-builtins", "List built-in experiments");
  list->add_flag("-v,--verbose", list_verbose, "Also print each config");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  run_args.verbose |= verbose;
  if (*run) return cmd_run(run_args);
  if (*validate) return cmd_validate(v_config, v_builtin);
  if (*metrics) return cmd_metrics(transcript_path, threshold);
  if (*list) return cmd_list(list_verbose || verbose);
  return kValidation;
}
