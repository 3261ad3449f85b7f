#include "amplab/cli/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "amplab/core/error.hpp"
#include "amplab/core/random.hpp"
#include "amplab/data/generators.hpp"
#include "amplab/data/transforms.hpp"
#include "amplab/harness/amplification.hpp"
#include "amplab/harness/config.hpp"
#include "amplab/harness/mitigation.hpp"
#include "amplab/harness/pairwise.hpp"
#include "amplab/harness/protocols.hpp"
#include "amplab/harness/report.hpp"
#include "amplab/nn/checkpoint.hpp"

namespace amplab::cli {

namespace {

namespace fs = std::filesystem;
using harness::ExperimentConfig;

struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  std::optional<int> tasks;
  std::optional<std::size_t> n;
  std::optional<int> jobs;
  bool quick = false;
  std::string out;
  bool json = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "Config file ([task] [model] [train] [protocol] [output])");
  cmd->add_option("--set", c.sets, "Override a config key: section.key=value (repeatable)");
  cmd->add_option("--seed", c.seed, "Protocol seed (protocol.seed)");
  cmd->add_option("--runs", c.runs, "Runs per condition (protocol.runs)");
  cmd->add_option("--tasks", c.tasks, "Sampled tasks for amplify/sweep (protocol.tasks)");
  cmd->add_option("--n", c.n, "Teaser task size (task.n)");
  cmd->add_option("--jobs", c.jobs, "Parallel training jobs (protocol.jobs)");
  cmd->add_flag("--quick", c.quick, "Small smoke-test preset");
  cmd->add_option("--out", c.out, "Output root directory (default: $AMPLAB_OUTPUT_ROOT or output.dir)");
  cmd->add_flag("--json", c.json, "Print the JSON report to standard output");
}

// defaults < --quick < config file < --set < explicit flags
ExperimentConfig resolve_config(const Common& c, std::vector<fs::path>& inputs) {
  harness::KeyValues kv;
  if (!c.config_path.empty()) {
    kv = harness::read_config_file(c.config_path);
    inputs.emplace_back(c.config_path);
  }
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorKind::usage, "cli", "--set expects section.key=value, got '" + s + "'");
    }
    kv[s.substr(0, eq)] = s.substr(eq + 1);
  }
  ExperimentConfig base;
  if (c.quick) harness::apply_quick_preset(base);
  harness::KeyValues merged = harness::config_to_keys(base);
  for (const auto& [k, v] : kv) {
    if (!merged.count(k)) throw ConfigError("unknown config key '" + k + "'");
    merged[k] = v;
  }
  ExperimentConfig cfg = harness::config_from_keys(merged);
  if (c.seed) cfg.seed = *c.seed;
  if (c.runs) cfg.n_runs = *c.runs;
  if (c.tasks) cfg.tasks = *c.tasks;
  if (c.n) cfg.task.teaser.n = *c.n;
  if (c.jobs) cfg.jobs = *c.jobs;
  cfg.validate();
  return cfg;
}

fs::path output_root(const Common& c, const ExperimentConfig& cfg) {
  if (!c.out.empty()) return c.out;
  if (const char* env = std::getenv("AMPLAB_OUTPUT_ROOT"); env && *env) return env;
  return cfg.output_dir;
}

std::vector<fs::path> task_inputs(const ExperimentConfig& cfg) {
  switch (cfg.task.kind) {
    case harness::TaskSource::Kind::csv: return {cfg.task.path};
    case harness::TaskSource::Kind::idx: return {cfg.task.images, cfg.task.labels};
    default: return {};
  }
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  Common common;
};

void finish(Context& ctx, const std::string& subcommand, const ExperimentConfig& cfg,
            const harness::ReportBundle& bundle, std::vector<fs::path> inputs,
            std::vector<std::string> extra_artifacts = {}, const fs::path* dir_override = nullptr) {
  const std::string hash = harness::config_hash(cfg);
  const std::string run_id = subcommand + "-" + hash;
  const fs::path dir = dir_override ? *dir_override : output_root(ctx.common, cfg) / run_id;
  auto artifacts = harness::emit_report(bundle, dir);
  artifacts.insert(artifacts.end(), extra_artifacts.begin(), extra_artifacts.end());
  harness::write_manifest(dir, {run_id, subcommand, hash, harness::canonical_text(cfg), inputs, artifacts});
  ctx.err << "wrote " << dir.string() << "\n";
  if (ctx.common.json) ctx.out << harness::to_json(bundle).dump(2) << "\n";
}

void print_view(std::ostream& os, const metrics::DisparityReport& r) {
  const auto& v = r.early_stopped;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%s vs %s: d_tilde=%.4f d=%.4f k=%s pooled_se=%s amplified=%s\n", r.name_a.c_str(),
                r.name_b.c_str(), v.d_tilde, v.d,
                v.k_ratio ? std::to_string(*v.k_ratio).c_str() : "undefined",
                v.pooled_stderr ? std::to_string(*v.pooled_stderr).c_str() : "undefined",
                v.amplified ? "yes" : "no");
  os << buf;
}

harness::ExperimentConfig with_observer(ExperimentConfig cfg, std::ostream& err) {
  cfg.on_train = [&err](const harness::TrainJobInfo& info) {
    if (info.run == 0) err << "training " << info.condition << "\n";
  };
  return cfg;
}

// ---- subcommands ----------------------------------------------------------

struct GenerateOpts {
  std::string task = "teaser";
  std::string file;
};

void cmd_generate(Context& ctx, const GenerateOpts& g) {
  std::vector<fs::path> inputs;
  Common c = ctx.common;
  if (g.task == "teaser" || g.task == "blobs" || g.task == "csv" || g.task == "idx") {
    c.sets.insert(c.sets.begin(), "task.kind=" + g.task);
  } else {
    throw Error(ErrorKind::usage, "cli", "--task must be teaser, blobs, csv or idx");
  }
  if (c.seed) c.sets.push_back("task.seed=" + std::to_string(*c.seed));
  const auto cfg = resolve_config(c, inputs);
  ctx.err << "config_hash=" << harness::config_hash(cfg) << "\n";
  if (g.file.empty()) throw Error(ErrorKind::usage, "cli", "generate needs --out <file.csv>");
  const auto ds = harness::load_task(cfg.task);
  data::write_csv(ds, g.file);
  ctx.err << "wrote " << g.file << " (" << ds.size() << " rows)\n";
  if (ctx.common.json) {
    nlohmann::json j = {{"rows", ds.size()}, {"dim", ds.dim()}, {"path", g.file},
                        {"checksum", harness::file_checksum(g.file)}};
    ctx.out << j.dump(2) << "\n";
  }
}

void cmd_train(Context& ctx) {
  std::vector<fs::path> inputs;
  const auto cfg = with_observer(resolve_config(ctx.common, inputs), ctx.err);
  ctx.err << "config_hash=" << harness::config_hash(cfg) << "\n";
  const auto ds = harness::load_task(cfg.task);
  for (const auto& p : task_inputs(cfg)) inputs.push_back(p);
  const auto splits = harness::make_splits(ds, cfg);
  const auto result = harness::train_run(cfg, "train", 0, splits.front().train, splits.front().test);

  const std::string hash = harness::config_hash(cfg);
  const fs::path dir = output_root(ctx.common, cfg) / ("train-" + hash);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  nn::save_mlp(result.model, dir / "model.txt");
  nn::write_curve_csv(result.curve, dir / "curve.csv");
  harness::write_manifest(dir, {"train-" + hash, "train", hash, harness::canonical_text(cfg), inputs,
                                {"model.txt", "curve.csv"}});
  const auto& best = result.curve.best();
  ctx.err << "best step " << best.step << " test accuracy " << best.test_acc_overall << "; final "
          << result.curve.final().test_acc_overall << "\nwrote " << dir.string() << "\n";
  if (ctx.common.json) {
    nlohmann::json j = {{"best_step", best.step},
                        {"best_test_accuracy", best.test_acc_overall},
                        {"final_test_accuracy", result.curve.final().test_acc_overall},
                        {"dir", dir.string()}};
    ctx.out << j.dump(2) << "\n";
  }
}

void cmd_audit(Context& ctx) {
  std::vector<fs::path> inputs;
  const auto cfg = with_observer(resolve_config(ctx.common, inputs), ctx.err);
  ctx.err << "config_hash=" << harness::config_hash(cfg) << "\n";
  const auto ds = harness::load_task(cfg.task);
  for (const auto& p : task_inputs(cfg)) inputs.push_back(p);
  const auto result = harness::audit(ds, cfg);
  for (const auto& r : result.reports) print_view(ctx.err, r);
  harness::ReportBundle bundle;
  bundle.subcommand = "audit";
  bundle.config_hash = harness::config_hash(cfg);
  bundle.audit = harness::AuditSummary::from(result);
  finish(ctx, "audit", cfg, bundle, inputs);
}

harness::TaskSampler sampler_for(const ExperimentConfig& cfg) {
  if (cfg.task.kind != harness::TaskSource::Kind::teaser) {
    throw ConfigError("amplify/sweep sample teaser tasks; set task.kind=teaser");
  }
  return harness::teaser_task_sampler(cfg.task.teaser, cfg.frequency_grid);
}

void cmd_amplify(Context& ctx) {
  std::vector<fs::path> inputs;
  const auto cfg = with_observer(resolve_config(ctx.common, inputs), ctx.err);
  ctx.err << "config_hash=" << harness::config_hash(cfg) << "\n";
  auto report = harness::amplification_sweep(sampler_for(cfg), static_cast<std::size_t>(cfg.tasks), cfg);
  ctx.err << "k=" << report.fit.k << " +/- " << report.fit.k_stderr << " R^2=" << report.fit.r_squared << "\n";
  harness::ReportBundle bundle;
  bundle.subcommand = "amplify";
  bundle.config_hash = harness::config_hash(cfg);
  bundle.amplification = std::move(report);
  finish(ctx, "amplify", cfg, bundle, inputs);
}

struct SweepOpts {
  std::string variable;
  std::vector<double> grid;
};

void cmd_sweep(Context& ctx, const SweepOpts& s) {
  std::vector<fs::path> inputs;
  auto cfg = resolve_config(ctx.common, inputs);
  if (!s.variable.empty()) cfg.sweep_variable = s.variable;
  if (!s.grid.empty()) cfg.sweep_grid = s.grid;
  cfg = with_observer(cfg, ctx.err);
  ctx.err << "config_hash=" << harness::config_hash(cfg) << "\n";
  auto result = harness::design_sweep(cfg.sweep_variable, cfg.sweep_grid, sampler_for(cfg),
                                      static_cast<std::size_t>(cfg.tasks), cfg);
  for (const auto& p : result.points) {
    ctx.err << cfg.sweep_variable << "=" << p.value << ": k=" << p.k << " +/- " << p.k_stderr << "\n";
  }
  harness::ReportBundle bundle;
  bundle.subcommand = "sweep";
  bundle.config_hash = harness::config_hash(cfg);
  bundle.sweep = std::move(result);
  finish(ctx, "sweep", cfg, bundle, inputs);
}

void cmd_mitigate(Context& ctx, const std::string& reserve_path) {
  std::vector<fs::path> inputs;
  const auto cfg = with_observer(resolve_config(ctx.common, inputs), ctx.err);
  ctx.err << "config_hash=" << harness::config_hash(cfg) << "\n";
  const auto ds = harness::load_task(cfg.task);
  for (const auto& p : task_inputs(cfg)) inputs.push_back(p);
  const auto strategy = harness::MitigationStrategy::from_config(cfg);
  std::optional<data::GroupedDataset> reserve;
  if (strategy.kind == harness::MitigationStrategy::Kind::add_data) {
    if (!reserve_path.empty()) {
      if (!fs::exists(reserve_path)) throw ConfigError("reserve file not found: " + reserve_path);
      reserve = data::restrict_to_group(data::read_csv(reserve_path), strategy.target_group);
      inputs.emplace_back(reserve_path);
    } else if (cfg.task.kind == harness::TaskSource::Kind::teaser) {
      auto p = cfg.task.teaser;
      p.seed = derive_seed(p.seed, "reserve");
      reserve = data::restrict_to_group(data::gen_teaser_task(p), strategy.target_group);
    } else {
      throw ConfigError("add_data on a file-backed task needs --reserve <csv>");
    }
  }
  auto result = harness::mitigation_experiment(ds, reserve, strategy, cfg);
  for (const auto& d : result.deltas) {
    ctx.err << strategy.name() << " groups " << d.group_a << "/" << d.group_b << ": d " << d.mean_before
            << " -> " << d.mean_after << "\n";
  }
  harness::ReportBundle bundle;
  bundle.subcommand = "mitigate";
  bundle.config_hash = harness::config_hash(cfg);
  bundle.mitigation = std::move(result);
  finish(ctx, "mitigate", cfg, bundle, inputs);
}

void cmd_pairwise(Context& ctx) {
  std::vector<fs::path> inputs;
  const auto cfg = with_observer(resolve_config(ctx.common, inputs), ctx.err);
  ctx.err << "config_hash=" << harness::config_hash(cfg) << "\n";
  const auto ds = harness::load_task(cfg.task);
  for (const auto& p : task_inputs(cfg)) inputs.push_back(p);
  auto result = harness::pairwise_difficulty_experiment(ds, harness::pairwise_specs(cfg), cfg);
  ctx.err << "pls R^2=" << result.analysis.r_squared << "\n";
  harness::ReportBundle bundle;
  bundle.subcommand = "pairwise";
  bundle.config_hash = harness::config_hash(cfg);
  bundle.pairwise = std::move(result);
  finish(ctx, "pairwise", cfg, bundle, inputs);
}

void cmd_report(Context& ctx, const std::string& from) {
  if (from.empty()) throw Error(ErrorKind::usage, "cli", "report needs --from <run dir or report.json>");
  if (!fs::exists(from)) throw ConfigError("report input not found: " + from);
  std::vector<fs::path> inputs;
  const auto cfg = resolve_config(ctx.common, inputs);
  const auto bundle = harness::read_report(from);
  const fs::path src = fs::is_directory(from) ? fs::path(from) / "report.json" : fs::path(from);
  inputs.push_back(src);
  ctx.err << "config_hash=" << bundle.config_hash << "\n";
  const std::string run_id = "report-" + harness::file_checksum(src);
  const fs::path dir = output_root(ctx.common, cfg) / run_id;
  auto artifacts = harness::emit_report(bundle, dir);
  harness::write_manifest(dir, {run_id, "report", bundle.config_hash, "", inputs, artifacts});
  ctx.err << "wrote " << dir.string() << "\n";
  if (ctx.common.json) ctx.out << harness::to_json(bundle).dump(2) << "\n";
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::usage: return kExitUsage;
    case ErrorKind::data: return kExitData;
    case ErrorKind::numeric: return kExitNumeric;
  }
  return kExitData;
}

const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::usage: return "usage";
    case ErrorKind::data: return "data";
    case ErrorKind::numeric: return "numeric";
  }
  return "data";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"amplab: difficulty amplification lab"};
  app.name("amplab");
  app.require_subcommand(1);
  app.fallthrough(false);

  Context ctx{out, err, {}};
  GenerateOpts gen;
  SweepOpts sweep;
  std::string reserve;
  std::string from;

  auto* g = app.add_subcommand("generate", "Write a task to CSV");
  add_common(g, ctx.common);
  g->add_option("--task", gen.task, "teaser | blobs | csv | idx (csv/idx stitch via task.pair_a/pair_b)");
  g->add_option("--file", gen.file, "Output CSV path (alias for --out)");
  auto* t = app.add_subcommand("train", "Train one model and save it with its curve");
  add_common(t, ctx.common);
  auto* a = app.add_subcommand("audit", "Two-stage disparity audit");
  add_common(a, ctx.common);
  auto* am = app.add_subcommand("amplify", "Amplification regression over sampled tasks");
  add_common(am, ctx.common);
  auto* s = app.add_subcommand("sweep", "Amplification factor across a design grid");
  add_common(s, ctx.common);
  s->add_option("--variable", sweep.variable, "width | step | weight_decay | grad_penalty_c");
  s->add_option("--grid", sweep.grid, "Grid values (strictly increasing)")->delimiter(',');
  auto* m = app.add_subcommand("mitigate", "Baseline vs mitigated audit");
  add_common(m, ctx.common);
  m->add_option("--reserve", reserve, "CSV with extra target-group rows for add_data");
  auto* p = app.add_subcommand("pairwise", "Pairwise class difficulty across models");
  add_common(p, ctx.common);
  auto* r = app.add_subcommand("report", "Re-emit tables from a saved report.json");
  add_common(r, ctx.common);
  r->add_option("--from", from, "Run directory or report.json");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error:usage:cli: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (g->parsed()) {
      if (gen.file.empty()) gen.file = ctx.common.out;
      cmd_generate(ctx, gen);
    } else if (t->parsed()) {
      cmd_train(ctx);
    } else if (a->parsed()) {
      cmd_audit(ctx);
    } else if (am->parsed()) {
      cmd_amplify(ctx);
    } else if (s->parsed()) {
      cmd_sweep(ctx, sweep);
    } else if (m->parsed()) {
      cmd_mitigate(ctx, reserve);
    } else if (p->parsed()) {
      cmd_pairwise(ctx);
    } else if (r->parsed()) {
      cmd_report(ctx, from);
    }
  } catch (const Error& e) {
    err << "error:" << kind_name(e.kind()) << ":" << e.tag() << ": " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error:data:internal: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace amplab::cli
