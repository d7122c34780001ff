// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#include "vic/backend.hpp"

#include <algorithm>
#include <cmath>

#include <httplib.h>

#include "vic/reranker.hpp"

namespace vic::reranker {

using nlohmann::json;

void BackendConfig::validate() const {
  if (timeout.count() <= 0) throw ValidationError("backend timeout must be > 0");
  if (max_retries < 0) throw ValidationError("max_retries must be >= 0");
  if (!std::isfinite(temperature) || temperature < 0) {
    throw ValidationError("temperature must be >= 0");
  }
}

Relevance relevance_from_gold(const std::map<QueryId, std::set<ItemId>>& gold) {
  Relevance relevance;
  for (const auto& [query, items] : gold) {
    for (const auto& item : items) relevance.emplace(std::pair{query, item}, 1.0);
  }
  return relevance;
}

std::string mock_oracle(const PromptBundle& bundle, const Relevance& relevance) {
  struct Ranked {
    double relevance;
    std::size_t first_label;
    std::size_t label;
  };
  std::map<ItemId, std::size_t> first_label;
  std::vector<Ranked> ranked;
  for (const auto& part : bundle.candidates) {
    first_label.try_emplace(part.item, part.label);
    auto it = relevance.find({bundle.query, part.item});
    ranked.push_back({it == relevance.end() ? 0.0 : it->second, first_label.at(part.item), part.label});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.relevance != b.relevance) return a.relevance > b.relevance;
    if (a.first_label != b.first_label) return a.first_label < b.first_label;
    return a.label < b.label;
  });
  std::string out = "[";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(ranked[i].label);
  }
  return out + "]";
}

std::string MockOracleBackend::complete(const PromptBundle& bundle, const BackendConfig&) {
  return mock_oracle(bundle, relevance_);
}

std::string IdentityBackend::complete(const PromptBundle& bundle, const BackendConfig&) {
  return render_permutation(Permutation::identity(bundle.size()));
}

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ValidationError("endpoint '" + url + "' lacks a scheme");
  }
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw ValidationError("unsupported endpoint scheme '" + scheme + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string reply_content(std::string_view response_body) {
  json doc;
  try {
    doc = json::parse(response_body);
    const auto& content = doc.at("choices").at(0).at("message").at("content");
    if (content.is_string()) return content.get<std::string>();
    // Some servers return content as a list of typed parts.
    std::string text;
    for (const auto& part : content) {
      if (part.value("type", "") == "text") text += part.at("text").get<std::string>();
    }
    return text;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed chat-completion response: ") + e.what());
  }
}

std::string HttpChatBackend::request_body(const PromptBundle& bundle, const BackendConfig& cfg) const {
  json body = {
      {"model", cfg.model_id},
      {"temperature", cfg.temperature},
      {"messages", render_messages(bundle, template_, cfg.jpeg_quality)},
  };
  return body.dump();
}

std::string HttpChatBackend::complete(const PromptBundle& bundle, const BackendConfig& cfg) {
  if (cfg.endpoint_url.empty()) {
    throw TransportError("no endpoint URL configured", false);
  }
  const auto endpoint = split_endpoint(cfg.endpoint_url);
  httplib::Client client(endpoint.scheme_host_port);
  const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(cfg.timeout - seconds);
  client.set_connection_timeout(seconds.count(), micros.count());
  client.set_read_timeout(seconds.count(), micros.count());
  client.set_write_timeout(seconds.count(), micros.count());

  httplib::Headers headers;
  if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);

  auto res = client.Post(endpoint.path, headers, request_body(bundle, cfg), "application/json");
  if (!res) {
    throw TransportError("request to " + cfg.endpoint_url + " failed: " + httplib::to_string(res.error()),
                         true);
  }
  if (res->status >= 500) {
    throw TransportError("server error " + std::to_string(res->status), true, res->status);
  }
  if (res->status >= 400) {
    throw TransportError("request rejected with " + std::to_string(res->status) + ": " + res->body,
                         false, res->status);
  }
  return reply_content(res->body);
}

}  // namespace vic::reranker
