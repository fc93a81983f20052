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

#include "diadem/checkpoint.h"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "diadem/error.h"

namespace diadem {

namespace {

using nlohmann::json;

constexpr std::size_t kMagicSize = 10;  // "diadem-v1\n"

void put_u64(std::string& out, std::uint64_t value) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
}

std::uint64_t get_u64(std::string_view bytes, std::size_t at) {
  std::uint64_t value = 0;
  for (int i = 0; i < 8; ++i) {
    value |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[at + i])) << (8 * i);
  }
  return value;
}

std::size_t align8(std::size_t n) { return (n + 7) & ~std::size_t{7}; }

[[noreturn]] void corrupt(const std::string& why) {
  throw Error(ErrorCode::kCheckpointCorrupt, why);
}

json model_to_json(const ModelConfig& m) {
  return json{{"d_a", m.annotator_dim},
              {"d_I", m.item_dim},
              {"d_int", m.interaction_dim},
              {"d_P", m.resolved_transform_dim()},
              {"num_classes", m.num_classes},
              {"num_axes", m.num_axes},
              {"feature_dim", m.feature_dim},
              {"activation", std::string(to_string(m.activation))},
              {"fusion", std::string(to_string(m.fusion))},
              {"dropout", m.dropout_rate},
              {"num_annotators", m.num_annotators}};
}

ModelConfig model_from_json(const json& j) {
  ModelConfig m;
  m.annotator_dim = j.at("d_a").get<std::size_t>();
  m.item_dim = j.at("d_I").get<std::size_t>();
  m.interaction_dim = j.at("d_int").get<std::size_t>();
  m.transform_dim = j.at("d_P").get<std::size_t>();
  m.num_classes = j.at("num_classes").get<std::size_t>();
  m.num_axes = j.at("num_axes").get<std::size_t>();
  m.feature_dim = j.at("feature_dim").get<std::size_t>();
  m.activation = activation_from_string(j.at("activation").get<std::string>());
  m.fusion = fusion_from_string(j.at("fusion").get<std::string>());
  m.dropout_rate = j.at("dropout").get<double>();
  m.num_annotators = j.at("num_annotators").get<std::size_t>();
  return m;
}

}  // namespace

std::string schema_hash(const DemographicSchema& schema) {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx",
                static_cast<unsigned long long>(schema.fingerprint()));
  return buffer;
}

std::string serialize_checkpoint(const Checkpoint& checkpoint) {
  checkpoint.params.check_shapes(checkpoint.model, checkpoint.schema);

  std::string data;
  json tensors = json::array();
  checkpoint.params.for_each([&](const std::string& name, const auto& tensor) {
    tensors.push_back({{"name", name},
                       {"rows", tensor.rows()},
                       {"cols", tensor.cols()},
                       {"offset", data.size()}});
    for (Eigen::Index r = 0; r < tensor.rows(); ++r) {
      for (Eigen::Index c = 0; c < tensor.cols(); ++c) {
        std::uint64_t bits = 0;
        const double value = tensor(r, c);
        std::memcpy(&bits, &value, sizeof(bits));
        put_u64(data, bits);
      }
    }
  });

  json axes = json::array();
  for (const auto& axis : checkpoint.schema.axes) {
    axes.push_back({{"name", axis.name}, {"categories", axis.categories}});
  }
  char checksum[17];
  std::snprintf(checksum, sizeof(checksum), "%016llx",
                static_cast<unsigned long long>(stable_hash(data)));
  const json header{{"version", std::string(kCheckpointVersion)},
                    {"model", model_to_json(checkpoint.model)},
                    {"schema", {{"axes", axes}}},
                    {"schema_hash", schema_hash(checkpoint.schema)},
                    {"features",
                     {{"mode", std::string(to_string(checkpoint.features.mode))},
                      {"dim", checkpoint.features.dim}}},
                    {"tensors", tensors},
                    {"data_bytes", data.size()},
                    {"checksum", checksum}};
  const std::string header_text = header.dump();

  std::string out(kCheckpointVersion);
  out.push_back('\n');
  put_u64(out, header_text.size());
  out += header_text;
  out.resize(align8(out.size()), '\0');
  out += data;
  return out;
}

Checkpoint parse_checkpoint(std::string_view bytes) {
  if (bytes.size() < kMagicSize + 8 || bytes.substr(0, kCheckpointVersion.size()) != kCheckpointVersion ||
      bytes[kCheckpointVersion.size()] != '\n') {
    corrupt("missing diadem-v1 magic");
  }
  const std::uint64_t header_size = get_u64(bytes, kMagicSize);
  const std::size_t header_start = kMagicSize + 8;
  if (header_size > bytes.size() - header_start) corrupt("header length exceeds file size");
  const std::size_t data_start = align8(header_start + header_size);

  Checkpoint checkpoint;
  try {
    const json header = json::parse(bytes.substr(header_start, header_size));
    if (header.at("version").get<std::string>() != kCheckpointVersion) corrupt("unsupported version");
    checkpoint.model = model_from_json(header.at("model"));
    for (const auto& axis : header.at("schema").at("axes")) {
      checkpoint.schema.axes.push_back(
          {axis.at("name").get<std::string>(), axis.at("categories").get<std::vector<std::string>>()});
    }
    if (header.at("schema_hash").get<std::string>() != schema_hash(checkpoint.schema)) {
      corrupt("schema hash does not match the stored axes");
    }
    checkpoint.features.mode = feature_mode_from_string(header.at("features").at("mode").get<std::string>());
    checkpoint.features.dim = header.at("features").at("dim").get<std::size_t>();

    const auto data_bytes = header.at("data_bytes").get<std::size_t>();
    if (data_start > bytes.size() || bytes.size() - data_start != data_bytes) {
      corrupt("data section has the wrong size");
    }
    const std::string_view data = bytes.substr(data_start, data_bytes);
    char checksum[17];
    std::snprintf(checksum, sizeof(checksum), "%016llx",
                  static_cast<unsigned long long>(stable_hash(data)));
    if (header.at("checksum").get<std::string>() != checksum) corrupt("checksum mismatch");

    // Rebuild shapes from config + schema, then fill from the tensor table.
    Rng unused(0);
    checkpoint.params = init_params(checkpoint.model, checkpoint.schema, unused);
    const auto& tensors = header.at("tensors");
    std::size_t index = 0;
    checkpoint.params.for_each([&](const std::string& name, auto& tensor) {
      if (index >= tensors.size()) corrupt("tensor table is too short");
      const auto& entry = tensors[index++];
      if (entry.at("name").get<std::string>() != name ||
          entry.at("rows").get<Eigen::Index>() != tensor.rows() ||
          entry.at("cols").get<Eigen::Index>() != tensor.cols()) {
        corrupt("tensor '" + name + "' has an unexpected name or shape");
      }
      std::size_t offset = entry.at("offset").get<std::size_t>();
      const auto count = static_cast<std::size_t>(tensor.size());
      if (offset > data.size() || (data.size() - offset) / 8 < count) {
        corrupt("tensor '" + name + "' overruns the data section");
      }
      for (Eigen::Index r = 0; r < tensor.rows(); ++r) {
        for (Eigen::Index c = 0; c < tensor.cols(); ++c) {
          const std::uint64_t bits = get_u64(data, offset);
          double value = 0.0;
          std::memcpy(&value, &bits, sizeof(value));
          tensor(r, c) = value;
          offset += 8;
        }
      }
    });
    if (index != tensors.size()) corrupt("tensor table has extra entries");
  } catch (const json::exception& e) {
    corrupt(std::string("malformed header: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCheckpointCorrupt) throw;
    corrupt(e.what());
  }
  if (!checkpoint.params.all_finite()) corrupt("non-finite parameter values");
  return checkpoint;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  const std::string bytes = serialize_checkpoint(checkpoint);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_checkpoint(bytes);
}

}  // namespace diadem
