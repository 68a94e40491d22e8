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

#include <cstdlib>

#include <httplib.h>

#include "../common/json_util.hpp"
#include "lawforge/weighting.hpp"

namespace lawforge::weighting {

namespace {

using detail::json;

}  // namespace

std::string RemoteScorer::rubric() {
  return "Score the traffic-law clause on two scales from 0.0 to 4.0. "
         "severity: harm caused when the clause is violated (0 none, 1 minor property damage, "
         "2 serious property damage or minor injury, 3 serious injury, 4 fatality likely). "
         "occurrence: how often violations happen in ordinary traffic (0 never, 1 rare, "
         "2 occasional, 3 frequent, 4 very frequent). "
         "Reply with a JSON object {\"severity\": number, \"occurrence\": number, "
         "\"justification\": string}.";
}

RemoteConfig apply_env_overrides(RemoteConfig cfg) {
  if (const char* url = std::getenv("LAWFORGE_SCORER_URL"); url && *url) cfg.url = url;
  if (const char* key = std::getenv("LAWFORGE_SCORER_KEY"); key && *key) cfg.api_key = key;
  return cfg;
}

RemoteConfig load_remote_config(const std::filesystem::path& path) {
  const json doc = detail::read_json_file(path);
  RemoteConfig cfg;
  cfg.url = doc.value("url", std::string());
  cfg.api_key = doc.value("api_key", std::string());
  cfg.model = doc.value("model", std::string());
  cfg.timeout_seconds = doc.value("timeout_seconds", cfg.timeout_seconds);
  return apply_env_overrides(std::move(cfg));
}

RemoteScorer::RemoteScorer(RemoteConfig cfg) : cfg_(std::move(cfg)) {
  const std::string scheme = "http://";
  if (cfg_.url.rfind("https://", 0) == 0) {
    throw ConfigError("https scorer endpoints are not supported by this build; use http");
  }
  if (cfg_.url.rfind(scheme, 0) != 0) throw ConfigError("scorer url must start with http://");
  auto slash = cfg_.url.find('/', scheme.size());
  origin_ = cfg_.url.substr(0, slash);
  path_ = slash == std::string::npos ? "/" : cfg_.url.substr(slash);
  if (origin_.size() == scheme.size()) throw ConfigError("scorer url has no host");
  if (!(cfg_.timeout_seconds > 0.0)) throw ConfigError("scorer timeout must be positive");
}

std::string RemoteScorer::id() const {
  return cfg_.model.empty() ? "remote:" + origin_ : "remote:" + cfg_.model;
}

RawScore RemoteScorer::score(const stl::LawSpec& law) const {
  json req = {{"schema_version", 1},
              {"law_id", law.id},
              {"article", law.article},
              {"description", law.description},
              {"formula", stl::to_string(law.formula)},
              {"rubric", rubric()}};
  req["penalty_points"] = law.penalty_points;
  if (!cfg_.model.empty()) req["model"] = cfg_.model;

  httplib::Client cli(origin_);
  auto secs = static_cast<time_t>(cfg_.timeout_seconds);
  auto usecs = static_cast<time_t>((cfg_.timeout_seconds - static_cast<double>(secs)) * 1e6);
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  httplib::Headers headers;
  if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);
  auto res = cli.Post(path_, headers, req.dump(), "application/json");
  if (!res) throw TransportError(httplib::to_string(res.error()));
  if (res->status != 200) throw TransportError("HTTP status " + std::to_string(res->status));

  json body;
  try {
    body = json::parse(res->body);
  } catch (const json::parse_error&) {
    throw MalformedResponse("response body is not JSON");
  }
  auto number = [&](const char* key) {
    auto it = body.find(key);
    if (it == body.end() || !it->is_number()) {
      throw MalformedResponse(std::string("response lacks numeric '") + key + "'");
    }
    return it->get<double>();
  };
  if (!body.is_object()) throw MalformedResponse("response is not an object");
  RawScore out;
  out.severity = number("severity");
  out.occurrence = number("occurrence");
  auto j = body.find("justification");
  if (j == body.end() || !j->is_string()) throw MalformedResponse("response lacks 'justification'");
  out.justification = j->get<std::string>();
  if (auto u = body.find("usage"); u != body.end() && u->is_object()) {
    out.usage = TokenUsage{u->value("prompt_tokens", 0L), u->value("completion_tokens", 0L)};
  }
  return out;
}

}  // namespace lawforge::weighting
