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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "diadem/dataset.h"
#include "diadem/error.h"
#include "diadem/rng.h"

namespace diadem {

namespace {

std::string padded(const char* prefix, std::size_t value, int width) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%s%0*zu", prefix, width, value);
  return buffer;
}

}  // namespace

DemographicSchema make_uniform_schema(std::size_t axes, std::size_t categories) {
  DemographicSchema schema;
  for (std::size_t d = 0; d < axes; ++d) {
    DemographicAxis axis{"axis_" + std::to_string(d), {}};
    for (std::size_t c = 0; c < categories; ++c) axis.categories.push_back("c" + std::to_string(c));
    schema.axes.push_back(std::move(axis));
  }
  return schema;
}

Corpus synth_generate(const SynthSpec& spec) {
  spec.schema.validate();
  if (spec.planted_axis >= spec.schema.size()) {
    throw Error(ErrorCode::kInvalidAxis, "planted axis " + std::to_string(spec.planted_axis) +
                                             " >= axis count " + std::to_string(spec.schema.size()));
  }
  if (!(spec.noise >= 0.0 && spec.noise < 0.5)) {
    throw Error(ErrorCode::kInvalidNoise, "noise must lie in [0, 0.5)");
  }
  if (spec.num_classes < 2) throw Error(ErrorCode::kInvalidArgument, "synthetic corpus needs K >= 2");
  if (spec.feature_dim < spec.num_classes) {
    throw Error(ErrorCode::kInvalidArgument, "feature dim must be >= K to encode the base label");
  }
  if (spec.n_items == 0 || spec.n_annotators == 0) {
    throw Error(ErrorCode::kEmptyCorpus, "synthetic corpus needs items and annotators");
  }

  Rng rng(spec.seed);
  Corpus corpus;
  corpus.schema = spec.schema;
  corpus.num_classes = spec.num_classes;
  const int width = spec.n_annotators > 999 ? 6 : 3;
  const int item_width = spec.n_items > 9999 ? 7 : 4;

  for (std::size_t n = 0; n < spec.n_annotators; ++n) {
    AnnotatorProfile profile{padded("a", n, width), {}};
    for (std::size_t d = 0; d < spec.schema.size(); ++d) {
      const std::size_t c = spec.schema.axes[d].categories.size();
      // The planted axis is populated round-robin so its categories are even.
      profile.values.push_back(d == spec.planted_axis ? n % c : rng.uniform_index(c));
    }
    corpus.annotators.push_back(std::move(profile));
  }

  const std::size_t per_item =
      spec.annotators_per_item == 0 ? spec.n_annotators
                                    : std::min(spec.annotators_per_item, spec.n_annotators);
  std::vector<std::size_t> chosen;
  std::vector<std::pair<double, std::size_t>> keys(spec.n_annotators);

  for (std::size_t m = 0; m < spec.n_items; ++m) {
    const std::size_t base = rng.uniform_index(spec.num_classes);
    Item item{padded("i", m, item_width),
              Eigen::VectorXd::Zero(static_cast<Eigen::Index>(spec.feature_dim)), std::nullopt};
    for (std::size_t j = 0; j < spec.feature_dim; ++j) {
      item.features[static_cast<Eigen::Index>(j)] =
          (j == base ? 1.0 : 0.0) + spec.feature_jitter * rng.normal();
    }
    corpus.items.push_back(std::move(item));

    chosen.clear();
    if (per_item == spec.n_annotators) {
      for (std::size_t n = 0; n < spec.n_annotators; ++n) chosen.push_back(n);
    } else {
      // Weighted sampling without replacement (Efraimidis-Spirakis keys).
      const double mix = spec.mix_planted ? rng.uniform() : 0.5;
      for (std::size_t n = 0; n < spec.n_annotators; ++n) {
        double weight = 1.0;
        if (spec.mix_planted) {
          const bool first = corpus.annotators[n].values[spec.planted_axis] == 0;
          weight = std::max(first ? mix : 1.0 - mix, 1e-6);
        }
        double u = rng.uniform();
        while (u <= 0.0) u = rng.uniform();
        keys[n] = {std::log(u) / weight, n};
      }
      std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(per_item),
                        keys.end(), [](const auto& a, const auto& b) {
                          return a.first > b.first || (a.first == b.first && a.second < b.second);
                        });
      for (std::size_t i = 0; i < per_item; ++i) chosen.push_back(keys[i].second);
      std::sort(chosen.begin(), chosen.end());
    }

    for (const std::size_t n : chosen) {
      const std::size_t offset = corpus.annotators[n].values[spec.planted_axis] % spec.num_classes;
      std::size_t label = (base + offset) % spec.num_classes;
      if (rng.bernoulli(spec.noise)) {
        label = (label + 1 + rng.uniform_index(spec.num_classes - 1)) % spec.num_classes;
      }
      corpus.annotations.push_back({m, n, static_cast<int>(label)});
    }
  }
  corpus.validate();
  return corpus;
}

}  // namespace diadem
