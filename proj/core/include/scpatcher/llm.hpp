#pragma once

// Chat-completion backends: an OpenAI-compatible HTTP client and a scripted
// mock for hermetic runs.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scpatcher/error.hpp"
#include "scpatcher/model.hpp"
#include "scpatcher/prompt.hpp"

namespace scpatcher::repair {

enum class LlmErrorKind { Timeout, HttpStatus, EmptyResponse, ScriptMiss, Transport, BadResponse };
using LlmError = KindedError<LlmErrorKind>;

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

struct LlmRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  std::uint32_t max_tokens = 4096;
};

struct LlmResponse {
  std::string text;
  std::uint64_t prompt_tokens = 0;
  std::uint64_t completion_tokens = 0;
  double latency_ms = 0.0;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string name() const = 0;
  /// Must be safe to call from several threads.
  virtual LlmResponse complete(const LlmRequest& request) const = 0;
};

struct RemoteChatConfig {
  std::string url;  // full endpoint, e.g. https://api.example.com/v1/chat/completions
  std::string api_key;
  std::string model = "gpt-4o-mini";
  std::chrono::milliseconds timeout{std::chrono::seconds(120)};
  std::size_t max_in_flight = 4;

  /// Reads SCPATCHER_LLM_URL, SCPATCHER_LLM_KEY and SCPATCHER_LLM_MODEL.
  static RemoteChatConfig from_env();
};

class RemoteChatBackend final : public ChatBackend {
 public:
  explicit RemoteChatBackend(RemoteChatConfig cfg);
  std::string name() const override { return "remote:" + cfg_.model; }
  LlmResponse complete(const LlmRequest& request) const override;

 private:
  RemoteChatConfig cfg_;
  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  mutable std::size_t in_flight_ = 0;
};

/// One scripted reply. A rule matches when every present condition holds:
/// the prompt digest equals `digest`, the user text contains every string in
/// `contains`, and the backend seed equals `seed`.
struct MockRule {
  std::optional<std::string> digest;
  std::vector<std::string> contains;
  std::optional<std::uint64_t> seed;
  std::string response;
};

/// First matching rule wins; no match raises LlmError{ScriptMiss}.
class MockChatBackend final : public ChatBackend {
 public:
  explicit MockChatBackend(std::vector<MockRule> rules, std::uint64_t seed = 0);

  /// JSON script; see docs/mock-script.md. `response_file` entries are
  /// resolved against `base_dir`.
  static MockChatBackend parse(std::string_view json_text, const std::filesystem::path& base_dir = {},
                               std::uint64_t seed = 0);
  static MockChatBackend load(const std::filesystem::path& path, std::uint64_t seed = 0);

  std::string name() const override { return "mock"; }
  LlmResponse complete(const LlmRequest& request) const override;

  const std::vector<MockRule>& rules() const noexcept { return rules_; }

 private:
  std::vector<MockRule> rules_;
  std::uint64_t seed_;
};

struct GenerateOptions {
  std::string model;
  double temperature = 0.0;
  std::uint32_t max_tokens = 4096;
};

/// Contents of the first ``` fenced block, or the whole text when there is
/// none; surrounding whitespace trimmed.
std::string extract_patch(std::string_view response);

/// Sends the prompt and wraps the extracted source as a candidate of the
/// prompt's stage. Empty extractions raise LlmError{EmptyResponse}.
PatchCandidate generate(const Prompt& prompt, const ChatBackend& backend, const GenerateOptions& opts = {});

}  // namespace scpatcher::repair
