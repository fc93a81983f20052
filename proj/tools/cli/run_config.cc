// Copyright 2026 The DiADEM Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli/run_config.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <sstream>
#include <vector>

#include "diadem/error.h"

namespace diadem::cli {

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw Error(ErrorCode::kConfigError,
              key + ": cannot parse '" + value + "' as " + expected);
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "a non-negative integer");
  return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "an unsigned integer");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "a number");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  bad_value(key, v, "true/false");
}

std::string fmt(double v) {
  char buffer[32];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
  return std::string(buffer, ptr);
}

std::string fmt(bool v) { return v ? "true" : "false"; }

template <class Enum, class Parse>
Enum parse_enum(const std::string& key, const std::string& value, Parse parse) {
  try {
    return parse(value);
  } catch (const Error&) {
    bad_value(key, value, "a known option");
  }
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Field {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define SIZE_FIELD(name, member)                                                      \
  Field {                                                                             \
    name, [](RunConfig& c, const std::string& v) { c.member = to_size(name, v); },    \
        [](const RunConfig& c) { return std::to_string(c.member); }                   \
  }
#define DOUBLE_FIELD(name, member)                                                    \
  Field {                                                                             \
    name, [](RunConfig& c, const std::string& v) { c.member = to_double(name, v); },  \
        [](const RunConfig& c) { return fmt(c.member); }                              \
  }
#define BOOL_FIELD(name, member)                                                      \
  Field {                                                                             \
    name, [](RunConfig& c, const std::string& v) { c.member = to_bool(name, v); },    \
        [](const RunConfig& c) { return fmt(c.member); }                              \
  }
#define PATH_FIELD(name, member)                                                      \
  Field {                                                                             \
    name, [](RunConfig& c, const std::string& v) { c.member = v; },                   \
        [](const RunConfig& c) { return c.member.string(); }                          \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table{
      Field{"seed", [](RunConfig& c, const std::string& v) { c.seed = to_u64("seed", v); },
            [](const RunConfig& c) { return std::to_string(c.seed); }},
      PATH_FIELD("data.items", items),
      PATH_FIELD("data.annotators", annotators),
      PATH_FIELD("data.annotations", annotations),
      SIZE_FIELD("data.num_classes", num_classes),
      Field{"features.mode",
            [](RunConfig& c, const std::string& v) {
              c.features.mode = parse_enum<FeatureMode>("features.mode", v, feature_mode_from_string);
            },
            [](const RunConfig& c) { return std::string(to_string(c.features.mode)); }},
      SIZE_FIELD("features.dim", features.dim),
      SIZE_FIELD("model.d_a", model.annotator_dim),
      SIZE_FIELD("model.d_I", model.item_dim),
      SIZE_FIELD("model.d_int", model.interaction_dim),
      SIZE_FIELD("model.d_P", model.transform_dim),
      Field{"model.activation",
            [](RunConfig& c, const std::string& v) {
              c.model.activation = parse_enum<Activation>("model.activation", v, activation_from_string);
            },
            [](const RunConfig& c) { return std::string(to_string(c.model.activation)); }},
      Field{"model.fusion",
            [](RunConfig& c, const std::string& v) {
              c.model.fusion = parse_enum<Fusion>("model.fusion", v, fusion_from_string);
            },
            [](const RunConfig& c) { return std::string(to_string(c.model.fusion)); }},
      DOUBLE_FIELD("model.dropout", model.dropout_rate),
      SIZE_FIELD("train.epochs", train.epochs),
      SIZE_FIELD("train.items_per_batch", train.items_per_batch),
      DOUBLE_FIELD("train.learning_rate", train.learning_rate),
      Field{"train.optimizer",
            [](RunConfig& c, const std::string& v) {
              c.train.optimizer.kind = parse_enum<OptimizerKind>("train.optimizer", v, optimizer_from_string);
            },
            [](const RunConfig& c) { return std::string(to_string(c.train.optimizer.kind)); }},
      DOUBLE_FIELD("train.beta1", train.optimizer.beta1),
      DOUBLE_FIELD("train.beta2", train.optimizer.beta2),
      DOUBLE_FIELD("train.eps", train.optimizer.eps),
      DOUBLE_FIELD("train.gamma_i", train.loss_weights.gamma_i),
      DOUBLE_FIELD("train.gamma_a", train.loss_weights.gamma_a),
      DOUBLE_FIELD("train.lambda_dis", train.loss_weights.lambda_dis),
      DOUBLE_FIELD("train.l1", train.loss_weights.l1),
      DOUBLE_FIELD("train.l2", train.loss_weights.l2),
      BOOL_FIELD("train.grad_check", train.grad_check),
      BOOL_FIELD("train.dis_surrogate", train.dis_surrogate),
      Field{"split.mode",
            [](RunConfig& c, const std::string& v) {
              if (v == "none") {
                c.split_mode.reset();
              } else {
                c.split_mode = parse_enum<SplitMode>("split.mode", v, split_mode_from_string);
              }
            },
            [](const RunConfig& c) {
              return c.split_mode ? std::string(to_string(*c.split_mode)) : std::string("none");
            }},
      DOUBLE_FIELD("split.test_fraction", test_fraction),
      SIZE_FIELD("eval.n_bins", eval.n_bins),
      SIZE_FIELD("synth.items", synth.n_items),
      SIZE_FIELD("synth.annotators", synth.n_annotators),
      SIZE_FIELD("synth.axes", synth_axes),
      SIZE_FIELD("synth.categories", synth_categories),
      SIZE_FIELD("synth.planted_axis", synth.planted_axis),
      DOUBLE_FIELD("synth.noise", synth.noise),
      SIZE_FIELD("synth.classes", synth.num_classes),
      SIZE_FIELD("synth.dim", synth.feature_dim),
      SIZE_FIELD("synth.annotators_per_item", synth.annotators_per_item),
      BOOL_FIELD("synth.mix", synth.mix_planted),
      PATH_FIELD("output.dir", output_dir),
  };
  return table;
}

#undef SIZE_FIELD
#undef DOUBLE_FIELD
#undef BOOL_FIELD
#undef PATH_FIELD

}  // namespace

SplitSpec RunConfig::split_spec() const {
  return {split_mode.value_or(SplitMode::kByAnnotator), test_fraction, seed};
}

void RunConfig::set_seed(std::uint64_t value) {
  seed = value;
  train.seed = value;
  synth.seed = value;
}

void RunConfig::validate(bool need_data) const {
  if (model.fusion == Fusion::kSum && model.annotator_dim != model.item_dim) {
    throw Error(ErrorCode::kConfigError,
                "model.fusion=sum requires model.d_a == model.d_I (model.d_a=" +
                    std::to_string(model.annotator_dim) +
                    ", model.d_I=" + std::to_string(model.item_dim) + ")");
  }
  if (model.annotator_dim == 0 || model.item_dim == 0 || model.interaction_dim == 0) {
    throw Error(ErrorCode::kConfigError, "model.d_a, model.d_I and model.d_int must be >= 1");
  }
  if (!(model.dropout_rate >= 0.0 && model.dropout_rate < 1.0)) {
    throw Error(ErrorCode::kConfigError, "model.dropout must lie in [0, 1)");
  }
  if (features.mode == FeatureMode::kHashedBow && features.dim == 0) {
    throw Error(ErrorCode::kConfigError, "features.dim must be >= 1 for hashed_bow");
  }
  if (split_mode && !(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::kConfigError, "split.test_fraction must lie in (0, 1)");
  }
  if (eval.n_bins == 0) throw Error(ErrorCode::kConfigError, "eval.n_bins must be >= 1");
  try {
    train.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, e.what());
  }
  if (need_data) {
    for (const auto& [key, path] : {std::pair{"data.items", items},
                                    std::pair{"data.annotators", annotators},
                                    std::pair{"data.annotations", annotations}}) {
      if (path.empty()) throw Error(ErrorCode::kConfigError, std::string(key) + " is not set");
      if (!std::filesystem::is_regular_file(path)) {
        throw Error(ErrorCode::kConfigError,
                    std::string(key) + ": no such file '" + path.string() + "'");
      }
    }
  }
}

RunConfig parse_run_config(const std::string& text, const std::filesystem::path& base_dir) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kConfigError,
                  "line " + std::to_string(number) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const Field& f) { return f.key == key; });
    if (it == table.end()) throw Error(ErrorCode::kConfigError, key + ": unknown key");
    if (!seen.insert(key).second) throw Error(ErrorCode::kConfigError, key + ": set twice");
    it->set(config, value);
  }
  for (auto* path : {&config.items, &config.annotators, &config.annotations}) {
    if (!path->empty() && path->is_relative() && !base_dir.empty()) {
      *path = std::filesystem::absolute(base_dir / *path).lexically_normal();
    }
  }
  config.set_seed(config.seed);
  return config;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfigError, "cannot read config " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_run_config(text, path.parent_path());
}

std::string resolved_config_text(const RunConfig& config) {
  std::string out;
  for (const auto& field : fields()) {
    out += field.key + "=" + field.get(config) + "\n";
  }
  return out;
}

}  // namespace diadem::cli
