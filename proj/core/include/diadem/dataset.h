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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace diadem {

/// One categorical demographic attribute. Category indices run over
/// [0, categories.size()); index categories.size() is the reserved UNK slot.
struct DemographicAxis {
  std::string name;
  std::vector<std::string> categories;

  std::size_t unk_index() const { return categories.size(); }
  /// Number of rows the axis needs in its projection matrix (categories + UNK).
  std::size_t num_rows() const { return categories.size() + 1; }
  std::optional<std::size_t> find(std::string_view category) const;
};

struct DemographicSchema {
  std::vector<DemographicAxis> axes;

  std::size_t size() const { return axes.size(); }
  std::vector<std::string> axis_names() const;

  /// Throws Error(kInvalidArgument) when axes are missing, duplicated or have
  /// empty/duplicated category lists.
  void validate() const;

  /// Stable 64-bit fingerprint of the ordered axis names. Category lists are
  /// deliberately excluded so unseen categories map to UNK instead of
  /// invalidating a checkpoint.
  std::uint64_t fingerprint() const;
};

struct AnnotatorProfile {
  std::string annotator_id;
  /// Category index per schema axis.
  std::vector<std::size_t> values;
};

struct Item {
  std::string item_id;
  Eigen::VectorXd features;
  std::optional<std::string> raw_text;
};

/// One label; item and annotator are indices into the owning Corpus.
struct Annotation {
  std::size_t item = 0;
  std::size_t annotator = 0;
  int label = 0;
};

using Histogram = std::vector<std::size_t>;

/// Immutable once built. Views produced by split_corpus are themselves
/// Corpus values sharing the schema and class count of their parent.
struct Corpus {
  DemographicSchema schema;
  std::vector<Item> items;
  std::vector<AnnotatorProfile> annotators;
  std::vector<Annotation> annotations;
  std::size_t num_classes = 0;

  /// Feature width J (0 when items are not featurized yet).
  std::size_t feature_dim() const;

  /// #y_{.,m}: label counts per item.
  std::vector<Histogram> item_histograms() const;
  /// #y_{n,.}: label counts per annotator.
  std::vector<Histogram> annotator_histograms() const;
  /// Annotation indices grouped by item, in corpus order.
  std::vector<std::vector<std::size_t>> annotations_by_item() const;

  /// Full referential and range validation; throws diadem::Error.
  void validate() const;
};

struct LoadOptions {
  /// 0 infers K as 1 + max label.
  std::size_t num_classes = 0;
};

/// Reads the annotators/items/annotations CSV triple. Rejected rows are
/// reported with their line number.
Corpus load_corpus(const std::filesystem::path& items_path,
                   const std::filesystem::path& annotators_path,
                   const std::filesystem::path& annotations_path,
                   const LoadOptions& options = {});

/// Rewrites every annotator profile into the category indexing of `target`.
/// Axis names and order must match (kSchemaMismatch); categories unknown to
/// `target` map to the UNK index of their axis.
Corpus align_to_schema(const Corpus& corpus, const DemographicSchema& target);

enum class FeatureMode { kPrecomputed, kHashedBow };

struct FeatureSpec {
  FeatureMode mode = FeatureMode::kHashedBow;
  std::size_t dim = 64;
};

std::string_view to_string(FeatureMode mode);
FeatureMode feature_mode_from_string(std::string_view name);

/// Lowercased ASCII alphanumeric tokens; bytes >= 0x80 are kept inside
/// tokens so UTF-8 words are not shredded.
std::vector<std::string> tokenize(std::string_view text);

/// FNV-1a 64-bit.
std::uint64_t stable_hash(std::string_view bytes);

/// Signed hashed bag of words, scaled to unit L2 norm (zero stays zero).
/// Bucket is hash % dim; the top hash bit selects the sign.
Eigen::VectorXd hashed_bow(std::string_view text, std::size_t dim);

Corpus featurize_items(Corpus corpus, const FeatureSpec& spec);

enum class SplitMode { kByAnnotator, kByItem };

std::string_view to_string(SplitMode mode);
SplitMode split_mode_from_string(std::string_view name);

struct SplitSpec {
  SplitMode mode = SplitMode::kByAnnotator;
  double test_fraction = 0.25;
  std::uint64_t seed = 0;
};

struct CorpusSplit {
  Corpus train;
  Corpus test;
};

/// Deterministic given spec.seed. The test side receives
/// round(test_fraction * units) units.
CorpusSplit split_corpus(const Corpus& corpus, const SplitSpec& spec);

/// Synthetic corpus with a planted demographic effect:
/// label = (base(item) + offset(category on planted axis)) mod K, with
/// offset(c) = c mod K, then flipped to a uniformly random other class with
/// probability `noise`.
struct SynthSpec {
  std::size_t n_items = 200;
  std::size_t n_annotators = 40;
  DemographicSchema schema;
  std::size_t planted_axis = 0;
  double noise = 0.05;
  std::size_t num_classes = 2;
  std::size_t feature_dim = 8;
  std::uint64_t seed = 0;
  /// 0 means every annotator labels every item.
  std::size_t annotators_per_item = 0;
  /// When set (and annotators_per_item > 0), each item draws a mixing weight
  /// w ~ U(0,1) and favors planted category 0 with weight w, the remaining
  /// categories with 1 - w, giving heterogeneous per-item disagreement.
  bool mix_planted = false;
  double feature_jitter = 0.1;
};

/// Schema with `axes` axes named axis_0.. each holding `categories`
/// categories named c0...
DemographicSchema make_uniform_schema(std::size_t axes, std::size_t categories);

Corpus synth_generate(const SynthSpec& spec);

/// Writes the corpus as items.csv (item_id,f_0..f_{J-1}), annotators.csv and
/// annotations.csv under `dir`. Features are written in shortest round-trip
/// form, so reloading reproduces them exactly.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

}  // namespace diadem
