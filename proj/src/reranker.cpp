// Copyright 2026 The ViC Authors
// SPDX-License-Identifier: Apache-2.0

#include "vic/reranker.hpp"

#include <cctype>
#include <limits>
#include <optional>
#include <thread>

#include <json.hpp>

namespace vic::reranker {

namespace {

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Saturates instead of overflowing; anything that large is out of range.
std::size_t to_index(std::string_view digits) {
  std::size_t value = 0;
  for (char c : digits) {
    const auto d = static_cast<std::size_t>(c - '0');
    if (value > (std::numeric_limits<std::size_t>::max() - d) / 10) {
      return std::numeric_limits<std::size_t>::max();
    }
    value = value * 10 + d;
  }
  return value;
}

// A signed value: negatives are kept only so they can be counted as
// invalid.
struct Token {
  bool negative;
  std::size_t value;
};

// "[" ints separated by commas/whitespace "]", starting at `open`.
std::optional<std::vector<Token>> bracketed_list_at(std::string_view s, std::size_t open) {
  std::vector<Token> tokens;
  std::size_t i = open + 1;
  bool expect_value = true;
  while (i < s.size()) {
    const char c = s[i];
    if (c == ']') {
      if (tokens.empty()) return std::nullopt;
      return tokens;
    }
    if (is_space(c)) {
      ++i;
    } else if (c == ',') {
      if (expect_value) return std::nullopt;
      expect_value = true;
      ++i;
    } else if (is_digit(c) || (c == '-' && i + 1 < s.size() && is_digit(s[i + 1]))) {
      const bool negative = c == '-';
      std::size_t j = negative ? i + 1 : i;
      const std::size_t start = j;
      while (j < s.size() && is_digit(s[j])) ++j;
      tokens.push_back({negative, to_index(s.substr(start, j - start))});
      expect_value = false;
      i = j;
    } else {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

std::optional<std::vector<Token>> first_bracketed_list(std::string_view s) {
  for (auto open = s.find('['); open != std::string_view::npos; open = s.find('[', open + 1)) {
    if (auto tokens = bracketed_list_at(s, open)) return tokens;
  }
  return std::nullopt;
}

std::vector<Token> all_integers(std::string_view s) {
  std::vector<Token> tokens;
  for (std::size_t i = 0; i < s.size();) {
    if (!is_digit(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && is_digit(s[j])) ++j;
    tokens.push_back({false, to_index(s.substr(i, j - i))});
    i = j;
  }
  return tokens;
}

bool in_range(const Token& t, std::size_t k) { return !t.negative && t.value >= 1 && t.value <= k; }

bool any_in_range(const std::vector<Token>& tokens, std::size_t k) {
  for (const auto& t : tokens) {
    if (in_range(t, k)) return true;
  }
  return false;
}

}  // namespace

Permutation parse_permutation(std::string_view reply, std::size_t k) {
  if (k == 0) {
    throw ValidationError("parse_permutation needs k >= 1");
  }
  bool from_brackets = true;
  auto tokens = first_bracketed_list(reply).value_or(std::vector<Token>{});
  if (!any_in_range(tokens, k)) {
    from_brackets = false;
    tokens = all_integers(reply);
  }
  if (!any_in_range(tokens, k)) {
    return Permutation::identity(k, PermutationStatus::identity_fallback);
  }

  bool repaired = !from_brackets || tokens.size() != k;
  std::vector<bool> seen(k + 1, false);
  std::vector<std::size_t> order;
  order.reserve(k);
  for (const auto& t : tokens) {
    if (!in_range(t, k) || seen[t.value]) {
      repaired = true;
      continue;
    }
    seen[t.value] = true;
    order.push_back(t.value);
  }
  for (std::size_t label = 1; label <= k; ++label) {
    if (!seen[label]) order.push_back(label);
  }
  return Permutation(std::move(order),
                     repaired ? PermutationStatus::repaired : PermutationStatus::clean);
}

std::string render_permutation(const Permutation& perm) {
  std::string out = "[";
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(perm.order()[i]);
  }
  return out + "]";
}

std::vector<CandidateSlot> apply(const CandidateSequence& seq, const Permutation& perm) {
  if (seq.size() != perm.size()) {
    throw ValidationError("permutation of size " + std::to_string(perm.size()) +
                          " applied to " + std::to_string(seq.size()) + " candidates");
  }
  std::vector<CandidateSlot> out;
  out.reserve(seq.size());
  for (auto index : perm.order()) out.push_back(seq[index - 1]);
  return out;
}

RerankResult rerank(const PromptBundle& bundle, Backend& backend, const BackendConfig& cfg) {
  const auto k = bundle.size();
  RerankResult result{Permutation::identity(k), "", {}, backend.tag(), false};
  if (k <= 1) return result;

  const auto start = std::chrono::steady_clock::now();
  std::string last_error;
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    try {
      result.raw_reply = backend.complete(bundle, cfg);
      result.permutation = parse_permutation(result.raw_reply, k);
      result.latency = std::chrono::steady_clock::now() - start;
      return result;
    } catch (const TransportError& e) {
      last_error = e.what();
      if (!e.retryable()) break;
      if (attempt < cfg.max_retries) std::this_thread::sleep_for(cfg.backoff * (1 << attempt));
    } catch (const std::exception& e) {
      last_error = e.what();
      break;
    }
  }
  result.permutation = Permutation::identity(k, PermutationStatus::identity_fallback);
  result.raw_reply = "error: " + last_error;
  result.backend_failed = true;
  result.latency = std::chrono::steady_clock::now() - start;
  return result;
}

TranscriptLog::TranscriptLog(const std::filesystem::path& path, bool timestamps)
    : out_(path), timestamps_(timestamps) {
  if (!out_) {
    throw Error("cannot open transcript log '" + path.string() + "'");
  }
}

void TranscriptLog::record(const PromptBundle& bundle, const RerankResult& result) {
  nlohmann::json line = {
      {"query", bundle.query.str()},
      {"direction", to_string(bundle.direction)},
      {"template", bundle.template_id},
      {"backend", result.backend_tag},
      {"reply", result.raw_reply},
      {"permutation", std::vector<std::size_t>(result.permutation.order().begin(),
                                               result.permutation.order().end())},
      {"status", to_string(result.permutation.status())},
      {"backend_failed", result.backend_failed},
  };
  if (bundle.query_text) line["query_text"] = *bundle.query_text;
  auto& candidates = line["candidates"] = nlohmann::json::array();
  for (const auto& part : bundle.candidates) {
    candidates.push_back({{"label", part.label}, {"item", part.item.str()}});
  }
  if (timestamps_) line["latency_ms"] = result.latency.count();

  std::lock_guard lock(mutex_);
  out_ << line.dump() << '\n';
  out_.flush();
}

}  // namespace vic::reranker
