// Copyright 2026 The Lawforge Authors.
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

#include <array>
#include <cstring>
#include <fstream>

#include "../common/json_util.hpp"
#include "lawforge/generator.hpp"

namespace lawforge::gen {

namespace {

// Layout: 8-byte magic, uint64 header length, JSON header, raw IEEE-754
// doubles in host byte order.
constexpr std::array<char, 8> kMagic = {'L', 'F', 'C', 'K', 'P', 'T', '0', '1'};
constexpr int kSchemaVersion = 1;

using detail::json;

void write_blob(const std::filesystem::path& path, const json& header,
                const std::vector<double>& params) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  const std::string text = header.dump();
  const std::uint64_t len = text.size();
  out.write(kMagic.data(), kMagic.size());
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.write(reinterpret_cast<const char*>(params.data()),
            static_cast<std::streamsize>(params.size() * sizeof(double)));
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

json read_blob(const std::filesystem::path& path, std::vector<double>& params,
               const std::string& kind, std::uint64_t vocab_hash) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::array<char, 8> magic{};
  std::uint64_t len = 0;
  in.read(magic.data(), magic.size());
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  if (!in || magic != kMagic || len > (1u << 24)) {
    throw SchemaError("", "'" + path.string() + "' is not a checkpoint");
  }
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  json header;
  try {
    header = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("checkpoint header is not valid JSON: ") + e.what());
  }
  detail::check_schema_version(header, kSchemaVersion);
  if (detail::require_string(header, "kind", "") != kind) {
    throw SchemaError("/kind", "expected a " + kind + " checkpoint");
  }
  const auto& h = detail::require(header, "vocab_hash", "");
  if (!h.is_number_unsigned() || h.get<std::uint64_t>() != vocab_hash) {
    throw InputError("checkpoint '" + path.string() + "' was trained on a different vocabulary");
  }
  const auto& count = detail::require(header, "parameter_count", "");
  if (!count.is_number_unsigned()) throw SchemaError("/parameter_count", "expected a count");
  params.resize(count.get<std::size_t>());
  in.read(reinterpret_cast<char*>(params.data()),
          static_cast<std::streamsize>(params.size() * sizeof(double)));
  if (!in) throw SchemaError("", "checkpoint '" + path.string() + "' is truncated");
  return header;
}

std::size_t get_size(const json& obj, const std::string& key) {
  const auto& v = detail::require(obj, key, "/config");
  if (!v.is_number_unsigned()) throw SchemaError("/config/" + key, "expected a count");
  return v.get<std::size_t>();
}

}  // namespace

void save_model(const AttentionModel& model, std::uint64_t vocab_hash,
                const std::filesystem::path& path) {
  const auto& c = model.config();
  json header = {{"schema_version", kSchemaVersion},
                 {"kind", "generator"},
                 {"vocab_hash", vocab_hash},
                 {"config",
                  {{"vocab_size", c.vocab_size},
                   {"d_model", c.d_model},
                   {"heads", c.heads},
                   {"layers", c.layers},
                   {"d_ff", c.d_ff},
                   {"context", c.context}}},
                 {"parameter_count", model.parameters().size()}};
  write_blob(path, header, model.parameters());
}

AttentionModel load_model(const std::filesystem::path& path, std::uint64_t vocab_hash) {
  std::vector<double> params;
  const json header = read_blob(path, params, "generator", vocab_hash);
  const auto& jc = detail::require(header, "config", "");
  ModelConfig c;
  c.vocab_size = get_size(jc, "vocab_size");
  c.d_model = get_size(jc, "d_model");
  c.heads = get_size(jc, "heads");
  c.layers = get_size(jc, "layers");
  c.d_ff = get_size(jc, "d_ff");
  c.context = get_size(jc, "context");
  AttentionModel model(c, 0);
  if (params.size() != model.parameters().size()) {
    throw SchemaError("/parameter_count", "does not match the model configuration");
  }
  model.parameters() = std::move(params);
  return model;
}

void save_proxy(const ProxyModel& model, std::uint64_t vocab_hash,
                const std::filesystem::path& path) {
  const auto& c = model.config();
  json header = {{"schema_version", kSchemaVersion},
                 {"kind", "proxy"},
                 {"vocab_hash", vocab_hash},
                 {"config",
                  {{"vocab_size", model.vocab_size()},
                   {"embed_dim", c.embed_dim},
                   {"hidden", c.hidden}}},
                 {"scale", model.scale()},
                 {"parameter_count", model.parameters().size()}};
  write_blob(path, header, model.parameters());
}

ProxyModel load_proxy(const std::filesystem::path& path, std::uint64_t vocab_hash) {
  std::vector<double> params;
  const json header = read_blob(path, params, "proxy", vocab_hash);
  const auto& jc = detail::require(header, "config", "");
  ProxyConfig c;
  c.embed_dim = get_size(jc, "embed_dim");
  const auto& hidden = detail::require_array(jc, "hidden", "/config");
  c.hidden.clear();
  for (const auto& h : hidden) {
    if (!h.is_number_unsigned()) throw SchemaError("/config/hidden", "expected counts");
    c.hidden.push_back(h.get<std::size_t>());
  }
  ProxyModel model(get_size(jc, "vocab_size"), c, 0);
  if (params.size() != model.parameters().size()) {
    throw SchemaError("/parameter_count", "does not match the proxy configuration");
  }
  model.parameters() = std::move(params);
  model.set_scale(detail::require_number(header, "scale", ""));
  return model;
}

}  // namespace lawforge::gen
