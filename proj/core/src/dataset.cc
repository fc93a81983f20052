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

#include "diadem/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>

#include "diadem/csv.h"
#include "diadem/error.h"
#include "diadem/rng.h"

namespace diadem {

namespace {

std::string at_line(std::size_t line) { return " (line " + std::to_string(line) + ")"; }

std::size_t require_column(const csv::Table& table, std::string_view name,
                           const std::filesystem::path& path) {
  const std::size_t index = table.column(name);
  if (index == std::string::npos) {
    throw Error(ErrorCode::kMissingColumn,
                path.string() + " has no '" + std::string(name) + "' column");
  }
  return index;
}

std::optional<double> parse_double(std::string_view text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::optional<long long> parse_int(std::string_view text) {
  long long value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

std::string format_double(double value) {
  char buffer[32];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

}  // namespace

std::optional<std::size_t> DemographicAxis::find(std::string_view category) const {
  for (std::size_t i = 0; i < categories.size(); ++i) {
    if (categories[i] == category) return i;
  }
  return std::nullopt;
}

std::vector<std::string> DemographicSchema::axis_names() const {
  std::vector<std::string> names;
  names.reserve(axes.size());
  for (const auto& axis : axes) names.push_back(axis.name);
  return names;
}

void DemographicSchema::validate() const {
  if (axes.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "schema has no demographic axes");
  }
  std::set<std::string> names;
  for (const auto& axis : axes) {
    if (!names.insert(axis.name).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate axis '" + axis.name + "'");
    }
    if (axis.categories.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "axis '" + axis.name + "' has no categories");
    }
    std::set<std::string> seen(axis.categories.begin(), axis.categories.end());
    if (seen.size() != axis.categories.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "axis '" + axis.name + "' has duplicate categories");
    }
  }
}

std::uint64_t DemographicSchema::fingerprint() const {
  std::string joined;
  for (const auto& axis : axes) {
    joined += axis.name;
    joined.push_back('\x1f');
  }
  return stable_hash(joined);
}

std::size_t Corpus::feature_dim() const {
  return items.empty() ? 0 : static_cast<std::size_t>(items.front().features.size());
}

std::vector<Histogram> Corpus::item_histograms() const {
  std::vector<Histogram> hist(items.size(), Histogram(num_classes, 0));
  for (const auto& a : annotations) ++hist[a.item][static_cast<std::size_t>(a.label)];
  return hist;
}

std::vector<Histogram> Corpus::annotator_histograms() const {
  std::vector<Histogram> hist(annotators.size(), Histogram(num_classes, 0));
  for (const auto& a : annotations) ++hist[a.annotator][static_cast<std::size_t>(a.label)];
  return hist;
}

std::vector<std::vector<std::size_t>> Corpus::annotations_by_item() const {
  std::vector<std::vector<std::size_t>> groups(items.size());
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    groups[annotations[i].item].push_back(i);
  }
  return groups;
}

void Corpus::validate() const {
  schema.validate();
  if (items.empty() || annotators.empty() || annotations.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "corpus needs items, annotators and annotations");
  }
  const std::size_t width = feature_dim();
  for (const auto& item : items) {
    if (static_cast<std::size_t>(item.features.size()) != width) {
      throw Error(ErrorCode::kInconsistentWidth,
                  "item '" + item.item_id + "' has " + std::to_string(item.features.size()) +
                      " features, expected " + std::to_string(width));
    }
    if (!item.features.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "item '" + item.item_id + "' has non-finite features");
    }
  }
  for (const auto& profile : annotators) {
    if (profile.values.size() != schema.size()) {
      throw Error(ErrorCode::kAxisMismatch,
                  "annotator '" + profile.annotator_id + "' has wrong axis count");
    }
    for (std::size_t d = 0; d < schema.size(); ++d) {
      if (profile.values[d] > schema.axes[d].unk_index()) {
        throw Error(ErrorCode::kUnknownCategory,
                    "annotator '" + profile.annotator_id + "' axis '" + schema.axes[d].name +
                        "' index out of range");
      }
    }
  }
  std::set<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& a : annotations) {
    if (a.item >= items.size() || a.annotator >= annotators.size()) {
      throw Error(ErrorCode::kUnknownReference, "annotation references a missing id");
    }
    if (a.label < 0 || static_cast<std::size_t>(a.label) >= num_classes) {
      throw Error(ErrorCode::kLabelOutOfRange,
                  "label " + std::to_string(a.label) + " not in [0, " +
                      std::to_string(num_classes) + ")");
    }
    if (!pairs.emplace(a.item, a.annotator).second) {
      throw Error(ErrorCode::kDuplicateAnnotation,
                  "(" + items[a.item].item_id + ", " + annotators[a.annotator].annotator_id + ")");
    }
  }
}

Corpus load_corpus(const std::filesystem::path& items_path,
                   const std::filesystem::path& annotators_path,
                   const std::filesystem::path& annotations_path,
                   const LoadOptions& options) {
  Corpus corpus;

  // Annotators: the header defines the axis order.
  const csv::Table annotator_table = csv::read_file(annotators_path);
  const std::size_t id_column = require_column(annotator_table, "annotator_id", annotators_path);
  std::vector<std::size_t> axis_columns;
  for (std::size_t c = 0; c < annotator_table.header.size(); ++c) {
    if (c == id_column) continue;
    axis_columns.push_back(c);
    std::set<std::string> values;
    for (const auto& row : annotator_table.rows) values.insert(row[c]);
    corpus.schema.axes.push_back(
        {annotator_table.header[c], std::vector<std::string>(values.begin(), values.end())});
  }
  if (axis_columns.empty()) {
    throw Error(ErrorCode::kMissingColumn,
                annotators_path.string() + " has no demographic columns");
  }
  std::unordered_map<std::string, std::size_t> annotator_index;
  for (std::size_t r = 0; r < annotator_table.rows.size(); ++r) {
    const auto& row = annotator_table.rows[r];
    const std::size_t line = annotator_table.line_numbers[r];
    AnnotatorProfile profile{row[id_column], {}};
    for (std::size_t d = 0; d < axis_columns.size(); ++d) {
      const std::string& value = row[axis_columns[d]];
      if (value.empty()) {
        throw Error(ErrorCode::kUnknownCategory,
                    "axis '" + corpus.schema.axes[d].name + "' value '' " + at_line(line));
      }
      profile.values.push_back(*corpus.schema.axes[d].find(value));
    }
    if (!annotator_index.emplace(profile.annotator_id, corpus.annotators.size()).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate annotator_id '" + profile.annotator_id + "'" + at_line(line));
    }
    corpus.annotators.push_back(std::move(profile));
  }
  for (auto& axis : corpus.schema.axes) {
    // An axis whose every value was blank never gets here, so categories are
    // non-empty unless there are no annotators at all.
    if (axis.categories.empty()) {
      throw Error(ErrorCode::kEmptyCorpus, annotators_path.string() + " has no annotators");
    }
  }

  // Items: either free text or precomputed f_* columns.
  const csv::Table item_table = csv::read_file(items_path);
  const std::size_t item_id_column = require_column(item_table, "item_id", items_path);
  const std::size_t text_column = item_table.column("text");
  std::vector<std::size_t> feature_columns;
  if (text_column == std::string::npos) {
    for (std::size_t c = 0; c < item_table.header.size(); ++c) {
      if (c == item_id_column) continue;
      if (item_table.header[c] != "f_" + std::to_string(feature_columns.size())) {
        throw Error(ErrorCode::kMissingColumn,
                    items_path.string() + ": expected column f_" +
                        std::to_string(feature_columns.size()) + " or a 'text' column, got '" +
                        item_table.header[c] + "'");
      }
      feature_columns.push_back(c);
    }
    if (feature_columns.empty()) {
      throw Error(ErrorCode::kMissingColumn,
                  items_path.string() + " needs a 'text' column or f_0..f_{J-1} columns");
    }
  }
  std::unordered_map<std::string, std::size_t> item_index;
  for (std::size_t r = 0; r < item_table.rows.size(); ++r) {
    const auto& row = item_table.rows[r];
    const std::size_t line = item_table.line_numbers[r];
    Item item{row[item_id_column], Eigen::VectorXd(), std::nullopt};
    if (text_column != std::string::npos) {
      item.raw_text = row[text_column];
    } else {
      item.features.resize(static_cast<Eigen::Index>(feature_columns.size()));
      for (std::size_t j = 0; j < feature_columns.size(); ++j) {
        const auto value = parse_double(row[feature_columns[j]]);
        if (!value || !std::isfinite(*value)) {
          throw Error(ErrorCode::kInvalidArgument,
                      "feature '" + row[feature_columns[j]] + "' is not a finite number" +
                          at_line(line));
        }
        item.features[static_cast<Eigen::Index>(j)] = *value;
      }
    }
    if (!item_index.emplace(item.item_id, corpus.items.size()).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate item_id '" + item.item_id + "'" + at_line(line));
    }
    corpus.items.push_back(std::move(item));
  }

  // Annotations.
  const csv::Table annotation_table = csv::read_file(annotations_path);
  const std::size_t a_item = require_column(annotation_table, "item_id", annotations_path);
  const std::size_t a_annotator = require_column(annotation_table, "annotator_id", annotations_path);
  const std::size_t a_label = require_column(annotation_table, "label", annotations_path);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  int max_label = -1;
  for (std::size_t r = 0; r < annotation_table.rows.size(); ++r) {
    const auto& row = annotation_table.rows[r];
    const std::size_t line = annotation_table.line_numbers[r];
    const auto item_it = item_index.find(row[a_item]);
    if (item_it == item_index.end()) {
      throw Error(ErrorCode::kUnknownReference, "unknown item_id '" + row[a_item] + "'" + at_line(line));
    }
    const auto annotator_it = annotator_index.find(row[a_annotator]);
    if (annotator_it == annotator_index.end()) {
      throw Error(ErrorCode::kUnknownReference,
                  "unknown annotator_id '" + row[a_annotator] + "'" + at_line(line));
    }
    const auto label = parse_int(row[a_label]);
    if (!label || *label < 0 || *label > 1'000'000) {
      throw Error(ErrorCode::kInvalidLabel,
                  "label '" + row[a_label] + "' is not a non-negative integer" + at_line(line));
    }
    if (!seen.emplace(item_it->second, annotator_it->second).second) {
      throw Error(ErrorCode::kDuplicateAnnotation,
                  "(" + row[a_item] + ", " + row[a_annotator] + ")" + at_line(line));
    }
    corpus.annotations.push_back(
        {item_it->second, annotator_it->second, static_cast<int>(*label)});
    max_label = std::max(max_label, static_cast<int>(*label));
  }
  if (corpus.items.empty() || corpus.annotators.empty() || corpus.annotations.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "no items, annotators or annotations loaded");
  }
  const auto inferred = static_cast<std::size_t>(max_label + 1);
  if (options.num_classes != 0 && options.num_classes < inferred) {
    throw Error(ErrorCode::kLabelOutOfRange,
                "configured class count " + std::to_string(options.num_classes) +
                    " is below observed label " + std::to_string(max_label));
  }
  corpus.num_classes = options.num_classes != 0 ? options.num_classes : inferred;
  if (corpus.feature_dim() > 0) corpus.validate();
  return corpus;
}

Corpus align_to_schema(const Corpus& corpus, const DemographicSchema& target) {
  if (corpus.schema.axis_names() != target.axis_names()) {
    throw Error(ErrorCode::kSchemaMismatch, "demographic axes differ from the model schema");
  }
  Corpus aligned = corpus;
  aligned.schema = target;
  for (auto& profile : aligned.annotators) {
    for (std::size_t d = 0; d < target.size(); ++d) {
      const auto& source_axis = corpus.schema.axes[d];
      const std::size_t source = profile.values[d];
      std::optional<std::size_t> mapped;
      if (source < source_axis.categories.size()) {
        mapped = target.axes[d].find(source_axis.categories[source]);
      }
      profile.values[d] = mapped.value_or(target.axes[d].unk_index());
    }
  }
  return aligned;
}

std::string_view to_string(FeatureMode mode) {
  return mode == FeatureMode::kHashedBow ? "hashed_bow" : "precomputed";
}

FeatureMode feature_mode_from_string(std::string_view name) {
  if (name == "hashed_bow") return FeatureMode::kHashedBow;
  if (name == "precomputed") return FeatureMode::kPrecomputed;
  throw Error(ErrorCode::kConfigError, "unknown feature mode '" + std::string(name) + "'");
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (const char ch : text) {
    const auto byte = static_cast<unsigned char>(ch);
    const bool word = (byte >= '0' && byte <= '9') || (byte >= 'a' && byte <= 'z') ||
                      (byte >= 'A' && byte <= 'Z') || byte >= 0x80;
    if (word) {
      current.push_back(byte >= 'A' && byte <= 'Z' ? static_cast<char>(byte + ('a' - 'A')) : ch);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::uint64_t stable_hash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

Eigen::VectorXd hashed_bow(std::string_view text, std::size_t dim) {
  if (dim == 0) throw Error(ErrorCode::kInvalidArgument, "hashed_bow needs dim >= 1");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  for (const auto& token : tokenize(text)) {
    const std::uint64_t h = stable_hash(token);
    v[static_cast<Eigen::Index>(h % dim)] += (h >> 63) ? -1.0 : 1.0;
  }
  const double norm = v.norm();
  if (norm > 0.0) v /= norm;
  return v;
}

Corpus featurize_items(Corpus corpus, const FeatureSpec& spec) {
  if (spec.mode == FeatureMode::kHashedBow) {
    for (auto& item : corpus.items) {
      if (!item.raw_text) {
        throw Error(ErrorCode::kNoTextAvailable, "item '" + item.item_id + "' has no text");
      }
      item.features = hashed_bow(*item.raw_text, spec.dim);
    }
  } else {
    const std::size_t width = corpus.feature_dim();
    for (const auto& item : corpus.items) {
      if (static_cast<std::size_t>(item.features.size()) != width || width == 0) {
        throw Error(ErrorCode::kInconsistentWidth,
                    "item '" + item.item_id + "' has no precomputed features of width " +
                        std::to_string(width));
      }
    }
    if (spec.dim != 0 && spec.dim != width) {
      throw Error(ErrorCode::kInconsistentWidth,
                  "precomputed features have width " + std::to_string(width) + ", configured " +
                      std::to_string(spec.dim));
    }
  }
  corpus.validate();
  return corpus;
}

std::string_view to_string(SplitMode mode) {
  return mode == SplitMode::kByAnnotator ? "by_annotator" : "by_item";
}

SplitMode split_mode_from_string(std::string_view name) {
  if (name == "by_annotator") return SplitMode::kByAnnotator;
  if (name == "by_item") return SplitMode::kByItem;
  throw Error(ErrorCode::kConfigError, "unknown split mode '" + std::string(name) + "'");
}

namespace {

// Keeps the annotations whose unit is selected and reindexes the subset side.
Corpus subset(const Corpus& corpus, SplitMode mode, const std::vector<std::size_t>& keep) {
  Corpus view;
  view.schema = corpus.schema;
  view.num_classes = corpus.num_classes;
  const std::size_t units =
      mode == SplitMode::kByAnnotator ? corpus.annotators.size() : corpus.items.size();
  std::vector<std::size_t> remap(units, SIZE_MAX);
  for (std::size_t i = 0; i < keep.size(); ++i) remap[keep[i]] = i;

  if (mode == SplitMode::kByAnnotator) {
    view.items = corpus.items;
    for (const std::size_t n : keep) view.annotators.push_back(corpus.annotators[n]);
  } else {
    view.annotators = corpus.annotators;
    for (const std::size_t m : keep) view.items.push_back(corpus.items[m]);
  }
  for (Annotation a : corpus.annotations) {
    std::size_t& unit = mode == SplitMode::kByAnnotator ? a.annotator : a.item;
    if (remap[unit] == SIZE_MAX) continue;
    unit = remap[unit];
    view.annotations.push_back(a);
  }
  return view;
}

}  // namespace

CorpusSplit split_corpus(const Corpus& corpus, const SplitSpec& spec) {
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    throw Error(ErrorCode::kDegenerateSplit, "test_fraction must lie in (0, 1)");
  }
  const std::size_t units =
      spec.mode == SplitMode::kByAnnotator ? corpus.annotators.size() : corpus.items.size();
  const auto n_test =
      static_cast<std::size_t>(std::llround(spec.test_fraction * static_cast<double>(units)));
  if (n_test == 0 || n_test >= units) {
    throw Error(ErrorCode::kDegenerateSplit,
                std::to_string(units) + " units at fraction " + std::to_string(spec.test_fraction) +
                    " leaves one side empty");
  }
  std::vector<std::size_t> order(units);
  for (std::size_t i = 0; i < units; ++i) order[i] = i;
  Rng rng(spec.seed, kSplitSeedOffset);
  rng.shuffle(std::span<std::size_t>(order));

  std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {subset(corpus, spec.mode, train), subset(corpus, spec.mode, test)};
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + (dir / name).string());
    return out;
  };

  {
    auto out = open("annotators.csv");
    std::vector<std::string> header{"annotator_id"};
    for (const auto& axis : corpus.schema.axes) header.push_back(axis.name);
    csv::write_row(out, header);
    for (const auto& profile : corpus.annotators) {
      std::vector<std::string> row{profile.annotator_id};
      for (std::size_t d = 0; d < profile.values.size(); ++d) {
        const auto& axis = corpus.schema.axes[d];
        row.push_back(profile.values[d] < axis.categories.size()
                          ? axis.categories[profile.values[d]]
                          : std::string("UNK"));
      }
      csv::write_row(out, row);
    }
  }
  {
    auto out = open("items.csv");
    const std::size_t width = corpus.feature_dim();
    std::vector<std::string> header{"item_id"};
    if (width == 0) {
      header.push_back("text");
    } else {
      for (std::size_t j = 0; j < width; ++j) header.push_back("f_" + std::to_string(j));
    }
    csv::write_row(out, header);
    for (const auto& item : corpus.items) {
      std::vector<std::string> row{item.item_id};
      if (width == 0) {
        row.push_back(item.raw_text.value_or(""));
      } else {
        for (Eigen::Index j = 0; j < item.features.size(); ++j) {
          row.push_back(format_double(item.features[j]));
        }
      }
      csv::write_row(out, row);
    }
  }
  {
    auto out = open("annotations.csv");
    csv::write_row(out, {"item_id", "annotator_id", "label"});
    for (const auto& a : corpus.annotations) {
      csv::write_row(out, {corpus.items[a.item].item_id, corpus.annotators[a.annotator].annotator_id,
                           std::to_string(a.label)});
    }
  }
}

}  // namespace diadem
