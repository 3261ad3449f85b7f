#include "amplab/harness/config.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "amplab/core/error.hpp"
#include "amplab/core/random.hpp"
#include "amplab/data/generators.hpp"
#include "amplab/data/idx.hpp"

namespace amplab::harness {

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  const auto e = s.find_last_not_of(" \t\r\n");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0') throw ConfigError(key + ": expected a number, got '" + v + "'");
  return d;
}

long long to_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(key + ": expected an unsigned integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split(v, ',')) out.push_back(to_double(key, s));
  return out;
}

std::vector<int> to_ints(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const auto& s : split(v, ',')) out.push_back(static_cast<int>(to_int(key, s)));
  return out;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& v, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    if constexpr (std::is_floating_point_v<T>) {
      out += fmt(v[i]);
    } else {
      out += std::to_string(v[i]);
    }
  }
  return out;
}

std::string kind_name(TaskSource::Kind k) {
  switch (k) {
    case TaskSource::Kind::teaser: return "teaser";
    case TaskSource::Kind::csv: return "csv";
    case TaskSource::Kind::idx: return "idx";
    case TaskSource::Kind::blobs: return "blobs";
  }
  return "teaser";
}

TaskSource::Kind parse_kind(const std::string& v) {
  if (v == "teaser") return TaskSource::Kind::teaser;
  if (v == "csv") return TaskSource::Kind::csv;
  if (v == "idx") return TaskSource::Kind::idx;
  if (v == "blobs") return TaskSource::Kind::blobs;
  throw ConfigError("task.kind: unknown task kind '" + v + "'");
}

struct Field {
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

const std::map<std::string, Field>& fields() {
  using C = ExperimentConfig;
  static const std::map<std::string, Field> table = {
      {"task.kind", {[](C& c, const std::string& v) { c.task.kind = parse_kind(v); },
                     [](const C& c) { return kind_name(c.task.kind); }}},
      {"task.n", {[](C& c, const std::string& v) { c.task.teaser.n = static_cast<std::size_t>(to_u64("task.n", v)); },
                  [](const C& c) { return std::to_string(c.task.teaser.n); }}},
      {"task.margin", {[](C& c, const std::string& v) { c.task.teaser.margin = to_double("task.margin", v); },
                       [](const C& c) { return fmt(c.task.teaser.margin); }}},
      {"task.frequency", {[](C& c, const std::string& v) { c.task.teaser.frequency = to_double("task.frequency", v); },
                          [](const C& c) { return fmt(c.task.teaser.frequency); }}},
      {"task.easy_frequency", {[](C& c, const std::string& v) { c.task.teaser.easy_frequency = to_double("task.easy_frequency", v); },
                               [](const C& c) { return fmt(c.task.teaser.easy_frequency); }}},
      {"task.noise", {[](C& c, const std::string& v) { c.task.teaser.noise = to_double("task.noise", v); },
                      [](const C& c) { return fmt(c.task.teaser.noise); }}},
      {"task.amplitude", {[](C& c, const std::string& v) { c.task.teaser.amplitude = to_double("task.amplitude", v); },
                          [](const C& c) { return fmt(c.task.teaser.amplitude); }}},
      {"task.seed", {[](C& c, const std::string& v) { c.task.teaser.seed = to_u64("task.seed", v); },
                     [](const C& c) { return std::to_string(c.task.teaser.seed); }}},
      {"task.path", {[](C& c, const std::string& v) { c.task.path = v; },
                     [](const C& c) { return c.task.path.string(); }}},
      {"task.images", {[](C& c, const std::string& v) { c.task.images = v; },
                       [](const C& c) { return c.task.images.string(); }}},
      {"task.labels", {[](C& c, const std::string& v) { c.task.labels = v; },
                       [](const C& c) { return c.task.labels.string(); }}},
      {"task.pair_a", {[](C& c, const std::string& v) { c.task.pair_a = to_ints("task.pair_a", v); },
                       [](const C& c) { return join(c.task.pair_a); }}},
      {"task.pair_b", {[](C& c, const std::string& v) { c.task.pair_b = to_ints("task.pair_b", v); },
                       [](const C& c) { return join(c.task.pair_b); }}},
      {"task.classes", {[](C& c, const std::string& v) { c.task.blob_classes = static_cast<int>(to_int("task.classes", v)); },
                        [](const C& c) { return std::to_string(c.task.blob_classes); }}},
      {"task.dim", {[](C& c, const std::string& v) { c.task.blob_dim = static_cast<int>(to_int("task.dim", v)); },
                    [](const C& c) { return std::to_string(c.task.blob_dim); }}},
      {"task.per_class", {[](C& c, const std::string& v) { c.task.blob_per_class = static_cast<std::size_t>(to_u64("task.per_class", v)); },
                          [](const C& c) { return std::to_string(c.task.blob_per_class); }}},
      {"task.separation", {[](C& c, const std::string& v) { c.task.blob_separation = to_double("task.separation", v); },
                           [](const C& c) { return fmt(c.task.blob_separation); }}},
      {"task.spread", {[](C& c, const std::string& v) { c.task.blob_spread = to_double("task.spread", v); },
                       [](const C& c) { return fmt(c.task.blob_spread); }}},
      {"model.hidden", {[](C& c, const std::string& v) { c.model.hidden_widths = to_ints("model.hidden", v); },
                        [](const C& c) { return join(c.model.hidden_widths); }}},
      {"model.activation", {[](C& c, const std::string& v) { c.model.activation = nn::parse_activation(v); },
                            [](const C& c) { return std::string(nn::to_string(c.model.activation)); }}},
      {"model.input_batchnorm", {[](C& c, const std::string& v) { c.model.input_batchnorm = to_bool("model.input_batchnorm", v); },
                                 [](const C& c) { return std::string(c.model.input_batchnorm ? "true" : "false"); }}},
      {"train.learning_rate", {[](C& c, const std::string& v) { c.train.learning_rate = to_double("train.learning_rate", v); },
                               [](const C& c) { return fmt(c.train.learning_rate); }}},
      {"train.momentum", {[](C& c, const std::string& v) { c.train.momentum = to_double("train.momentum", v); },
                          [](const C& c) { return fmt(c.train.momentum); }}},
      {"train.weight_decay", {[](C& c, const std::string& v) { c.train.weight_decay = to_double("train.weight_decay", v); },
                              [](const C& c) { return fmt(c.train.weight_decay); }}},
      {"train.epochs", {[](C& c, const std::string& v) { c.train.epochs = static_cast<int>(to_int("train.epochs", v)); },
                        [](const C& c) { return std::to_string(c.train.epochs); }}},
      {"train.batch_size", {[](C& c, const std::string& v) { c.train.batch_size = static_cast<int>(to_int("train.batch_size", v)); },
                            [](const C& c) { return std::to_string(c.train.batch_size); }}},
      {"train.eval_every", {[](C& c, const std::string& v) { c.train.eval_every = static_cast<int>(to_int("train.eval_every", v)); },
                            [](const C& c) { return std::to_string(c.train.eval_every); }}},
      {"train.grad_penalty", {[](C& c, const std::string& v) {
                                if (to_bool("train.grad_penalty", v)) {
                                  if (!c.train.grad_penalty) c.train.grad_penalty = nn::GradPenalty{};
                                } else {
                                  c.train.grad_penalty.reset();
                                }
                              },
                              [](const C& c) { return std::string(c.train.grad_penalty ? "true" : "false"); }}},
      {"train.penalty_lambda", {[](C& c, const std::string& v) {
                                  if (!c.train.grad_penalty) c.train.grad_penalty = nn::GradPenalty{};
                                  c.train.grad_penalty->lambda = to_double("train.penalty_lambda", v);
                                },
                                [](const C& c) { return fmt(c.train.grad_penalty ? c.train.grad_penalty->lambda : nn::GradPenalty{}.lambda); }}},
      {"train.penalty_c", {[](C& c, const std::string& v) {
                             if (!c.train.grad_penalty) c.train.grad_penalty = nn::GradPenalty{};
                             c.train.grad_penalty->c = to_double("train.penalty_c", v);
                           },
                           [](const C& c) { return fmt(c.train.grad_penalty ? c.train.grad_penalty->c : nn::GradPenalty{}.c); }}},
      {"train.penalty_mode", {[](C& c, const std::string& v) {
                                if (!c.train.grad_penalty) c.train.grad_penalty = nn::GradPenalty{};
                                if (v == "exact") {
                                  c.train.grad_penalty->mode = nn::PenaltyMode::exact;
                                } else if (v == "finite_difference") {
                                  c.train.grad_penalty->mode = nn::PenaltyMode::finite_difference;
                                } else {
                                  throw ConfigError("train.penalty_mode: expected exact or finite_difference");
                                }
                              },
                              [](const C& c) {
                                return std::string(c.train.grad_penalty && c.train.grad_penalty->mode == nn::PenaltyMode::finite_difference
                                                       ? "finite_difference"
                                                       : "exact");
                              }}},
      {"protocol.runs", {[](C& c, const std::string& v) { c.n_runs = static_cast<int>(to_int("protocol.runs", v)); },
                         [](const C& c) { return std::to_string(c.n_runs); }}},
      {"protocol.test_fraction", {[](C& c, const std::string& v) { c.test_fraction = to_double("protocol.test_fraction", v); },
                                  [](const C& c) { return fmt(c.test_fraction); }}},
      {"protocol.seed", {[](C& c, const std::string& v) { c.seed = to_u64("protocol.seed", v); },
                         [](const C& c) { return std::to_string(c.seed); }}},
      {"protocol.jobs", {[](C& c, const std::string& v) { c.jobs = static_cast<int>(to_int("protocol.jobs", v)); },
                         [](const C& c) { return std::to_string(c.jobs); }}},
      {"protocol.checkpoint", {[](C& c, const std::string& v) {
                                 if (v == "early_stopped") {
                                   c.checkpoint = CheckpointChoice::early_stopped;
                                 } else if (v == "final") {
                                   c.checkpoint = CheckpointChoice::final;
                                 } else {
                                   throw ConfigError("protocol.checkpoint: expected early_stopped or final");
                                 }
                               },
                               [](const C& c) {
                                 return std::string(c.checkpoint == CheckpointChoice::final ? "final" : "early_stopped");
                               }}},
      {"protocol.tasks", {[](C& c, const std::string& v) { c.tasks = static_cast<int>(to_int("protocol.tasks", v)); },
                          [](const C& c) { return std::to_string(c.tasks); }}},
      {"protocol.frequencies", {[](C& c, const std::string& v) { c.frequency_grid = to_doubles("protocol.frequencies", v); },
                                [](const C& c) { return join(c.frequency_grid); }}},
      {"protocol.sweep_variable", {[](C& c, const std::string& v) { c.sweep_variable = v; },
                                   [](const C& c) { return c.sweep_variable; }}},
      {"protocol.sweep_grid", {[](C& c, const std::string& v) { c.sweep_grid = to_doubles("protocol.sweep_grid", v); },
                               [](const C& c) { return join(c.sweep_grid); }}},
      {"protocol.strategy", {[](C& c, const std::string& v) { c.strategy = v; },
                             [](const C& c) { return c.strategy; }}},
      {"protocol.factor", {[](C& c, const std::string& v) { c.factor = to_double("protocol.factor", v); },
                           [](const C& c) { return fmt(c.factor); }}},
      {"protocol.weight", {[](C& c, const std::string& v) { c.weight = to_double("protocol.weight", v); },
                           [](const C& c) { return fmt(c.weight); }}},
      {"protocol.target_group", {[](C& c, const std::string& v) { c.target_group = static_cast<int>(to_int("protocol.target_group", v)); },
                                 [](const C& c) { return std::to_string(c.target_group); }}},
      {"protocol.models", {[](C& c, const std::string& v) {
                             c.pairwise_models.clear();
                             for (const auto& m : split(v, ';')) c.pairwise_models.push_back(to_ints("protocol.models", m));
                           },
                           [](const C& c) {
                             std::string out;
                             for (std::size_t i = 0; i < c.pairwise_models.size(); ++i) {
                               if (i) out += ";";
                               out += join(c.pairwise_models[i]);
                             }
                             return out;
                           }}},
      {"output.dir", {[](C& c, const std::string& v) { c.output_dir = v; },
                      [](const C& c) { return c.output_dir.string(); }}},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, field] : fields()) k.push_back(name);
    return k;
  }();
  return keys;
}

void ExperimentConfig::validate() const {
  if (n_runs < 1) throw ConfigError("protocol.runs must be >= 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("protocol.test_fraction must be in (0,1)");
  if (jobs < 1) throw ConfigError("protocol.jobs must be >= 1");
  if (tasks < 1) throw ConfigError("protocol.tasks must be >= 1");
  if (frequency_grid.empty()) throw ConfigError("protocol.frequencies must not be empty");
  if (strategy != "oversample" && strategy != "add_data") {
    throw ConfigError("protocol.strategy must be oversample or add_data");
  }
  try {
    train.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("train: ") + e.what());
  }
  if (train.grad_penalty && train.grad_penalty->mode == nn::PenaltyMode::exact &&
      model.activation == nn::Activation::relu) {
    throw ConfigError(
        "exact gradient penalty needs model.activation = tanh or softplus "
        "(or train.penalty_mode = finite_difference)");
  }
}

KeyValues read_config_file(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("cannot parse config " + path.string() + ": " + e.message() + " (line " +
                      std::to_string(e.line()) + ")");
  }
  KeyValues kv;
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError(path.string() + ": key '" + section + "' is outside any section");
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      if (!fields().count(full)) throw ConfigError(path.string() + ": unknown key '" + full + "'");
      kv[full] = trim(value.get_value<std::string>());
    }
  }
  return kv;
}

ExperimentConfig config_from_keys(const KeyValues& kv) {
  ExperimentConfig c;
  // Penalty keys imply a penalty; apply the on/off switch last so "false" wins.
  for (const auto& [key, value] : kv) {
    const auto it = fields().find(key);
    if (it == fields().end()) throw ConfigError("unknown config key '" + key + "'");
    if (key == "train.grad_penalty") continue;
    it->second.set(c, value);
  }
  if (const auto it = kv.find("train.grad_penalty"); it != kv.end()) {
    fields().at("train.grad_penalty").set(c, it->second);
  }
  return c;
}

KeyValues config_to_keys(const ExperimentConfig& config) {
  KeyValues kv;
  for (const auto& [name, field] : fields()) kv[name] = field.get(config);
  return kv;
}

std::string canonical_text(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [k, v] : config_to_keys(config)) out += k + " = " + v + "\n";
  return out;
}

std::string config_hash(const ExperimentConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(canonical_text(config))));
  return buf;
}

void apply_quick_preset(ExperimentConfig& config) {
  config.n_runs = 2;
  config.train.epochs = 40;
  config.train.eval_every = 10;
  config.tasks = 8;
  config.task.teaser.n = std::min<std::size_t>(config.task.teaser.n, 400);
  config.task.blob_per_class = std::min<std::size_t>(config.task.blob_per_class, 60);
}

data::GroupedDataset load_task(const TaskSource& task) {
  auto maybe_stitch = [&](data::GroupedDataset ds) {
    if (task.pair_a.empty() && task.pair_b.empty()) return ds;
    if (task.pair_a.size() != 2 || task.pair_b.size() != 2) {
      throw ConfigError("task.pair_a and task.pair_b must each list two class ids");
    }
    return data::stitch_binary_task(ds, {task.pair_a[0], task.pair_a[1]},
                                    {task.pair_b[0], task.pair_b[1]}, task.teaser.seed);
  };
  switch (task.kind) {
    case TaskSource::Kind::teaser: return data::gen_teaser_task(task.teaser);
    case TaskSource::Kind::csv:
      if (!std::filesystem::exists(task.path)) throw ConfigError("task file not found: " + task.path.string());
      return maybe_stitch(data::read_csv(task.path));
    case TaskSource::Kind::idx:
      for (const auto& p : {task.images, task.labels}) {
        if (!std::filesystem::exists(p)) throw ConfigError("IDX file not found: " + p.string());
      }
      return maybe_stitch(data::load_idx(task.images, task.labels));
    case TaskSource::Kind::blobs:
      return data::gen_class_blobs(task.blob_classes, task.blob_dim, task.blob_per_class,
                                   task.blob_separation, task.blob_spread, task.teaser.seed);
  }
  throw ConfigError("unknown task kind");
}

nn::MlpSpec resolve_spec(const nn::MlpSpec& spec, const data::GroupedDataset& ds) {
  nn::MlpSpec out = spec;
  out.input_dim = static_cast<int>(ds.dim());
  out.output_dim = std::max(2, ds.num_classes());
  out.validate();
  return out;
}

}  // namespace amplab::harness
