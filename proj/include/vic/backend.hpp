// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <utility>

#include "vic/prompt.hpp"

namespace vic::reranker {

struct BackendConfig {
  std::string endpoint_url;
  std::string model_id;
  std::string api_key;
  std::chrono::milliseconds timeout{120'000};
  int max_retries = 2;
  double temperature = 0.0;
  /// First retry delay; doubles on every further retry.
  std::chrono::milliseconds backoff{1'000};
  int jpeg_quality = 90;

  void validate() const;
};

/// Failure to obtain a reply. Connection problems and HTTP 5xx are
/// retryable; HTTP 4xx is not.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, bool retryable, int http_status = 0)
      : Error(what), retryable_(retryable), http_status_(http_status) {}
  bool retryable() const noexcept { return retryable_; }
  int http_status() const noexcept { return http_status_; }

 private:
  bool retryable_;
  int http_status_;
};

/// A list-wise ranking model. Implementations must tolerate concurrent
/// calls.
class Backend {
 public:
  virtual ~Backend() = default;
  /// The raw text reply for one bundle.
  virtual std::string complete(const PromptBundle& bundle, const BackendConfig& cfg) = 0;
  virtual std::string tag() const = 0;
};

using Relevance = std::map<std::pair<QueryId, ItemId>, double>;

/// Relevance 1 for every gold (query, item) pair.
Relevance relevance_from_gold(const std::map<QueryId, std::set<ItemId>>& gold);

/// Bracketed label list ordered by descending relevance of each label's
/// item (missing pairs count 0). Equal relevance falls back to the item's
/// first label, then the label, so duplicate slots stay adjacent.
std::string mock_oracle(const PromptBundle& bundle, const Relevance& relevance);

class MockOracleBackend final : public Backend {
 public:
  explicit MockOracleBackend(Relevance relevance) : relevance_(std::move(relevance)) {}
  std::string complete(const PromptBundle& bundle, const BackendConfig& cfg) override;
  std::string tag() const override { return "mock"; }

 private:
  Relevance relevance_;
};

/// Always answers with the candidates in their given order.
class IdentityBackend final : public Backend {
 public:
  std::string complete(const PromptBundle& bundle, const BackendConfig& cfg) override;
  std::string tag() const override { return "identity"; }
};

/// Chat-completion endpoint speaking the common JSON wire format
/// (`model`, `temperature`, `messages`; reply in
/// `choices[0].message.content`).
class HttpChatBackend final : public Backend {
 public:
  explicit HttpChatBackend(PromptTemplate tpl) : template_(std::move(tpl)) {}
  std::string complete(const PromptBundle& bundle, const BackendConfig& cfg) override;
  std::string tag() const override { return "http"; }

  std::string request_body(const PromptBundle& bundle, const BackendConfig& cfg) const;

 private:
  PromptTemplate template_;
};

/// Content of the first choice of a chat-completion response body.
std::string reply_content(std::string_view response_body);

struct Endpoint {
  std::string scheme_host_port;  // "http://host:port"
  std::string path;              // "/v1/chat/completions"
};
Endpoint split_endpoint(const std::string& url);

}  // namespace vic::reranker
