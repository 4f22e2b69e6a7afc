#include "scpatcher/llm.hpp"

#include <nlohmann/json.hpp>

#include <cstdlib>

#include "scpatcher/http.hpp"
#include "scpatcher/kb.hpp"

namespace scpatcher::repair {

using nlohmann::json;

RemoteChatConfig RemoteChatConfig::from_env() {
  RemoteChatConfig cfg;
  if (const char* u = std::getenv("SCPATCHER_LLM_URL")) cfg.url = u;
  if (const char* k = std::getenv("SCPATCHER_LLM_KEY")) cfg.api_key = k;
  if (const char* m = std::getenv("SCPATCHER_LLM_MODEL")) cfg.model = m;
  return cfg;
}

RemoteChatBackend::RemoteChatBackend(RemoteChatConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.max_in_flight == 0) cfg_.max_in_flight = 1;
}

LlmResponse RemoteChatBackend::complete(const LlmRequest& request) const {
  if (cfg_.url.empty()) throw LlmError(LlmErrorKind::Transport, "SCPATCHER_LLM_URL is not set");
  json messages = json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  const json body = {{"model", request.model.empty() ? cfg_.model : request.model},
                     {"messages", messages},
                     {"temperature", request.temperature},
                     {"max_tokens", request.max_tokens}};

  {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return in_flight_ < cfg_.max_in_flight; });
    ++in_flight_;
  }
  const auto start = std::chrono::steady_clock::now();
  const net::HttpResult res = net::post_json(cfg_.url, cfg_.api_key, body.dump(), cfg_.timeout);
  const auto elapsed = std::chrono::steady_clock::now() - start;
  {
    std::lock_guard lock(mu_);
    --in_flight_;
  }
  cv_.notify_one();

  if (res.timed_out) throw LlmError(LlmErrorKind::Timeout, "chat request timed out");
  if (res.status == 0) throw LlmError(LlmErrorKind::Transport, "chat request failed: " + res.transport_error);
  if (res.status / 100 != 2) throw LlmError(LlmErrorKind::HttpStatus, "chat endpoint returned HTTP " + std::to_string(res.status));

  LlmResponse out;
  out.latency_ms = std::chrono::duration<double, std::milli>(elapsed).count();
  try {
    const json parsed = json::parse(res.body);
    const json& msg = parsed.at("choices").at(0).at("message");
    out.text = msg.at("content").is_null() ? "" : msg.at("content").get<std::string>();
    if (parsed.contains("usage")) {
      const json& u = parsed.at("usage");
      out.prompt_tokens = u.value("prompt_tokens", std::uint64_t{0});
      out.completion_tokens = u.value("completion_tokens", std::uint64_t{0});
    }
  } catch (const json::exception& e) {
    throw LlmError(LlmErrorKind::BadResponse, std::string("malformed chat response: ") + e.what());
  }
  return out;
}

MockChatBackend::MockChatBackend(std::vector<MockRule> rules, std::uint64_t seed)
    : rules_(std::move(rules)), seed_(seed) {}

MockChatBackend MockChatBackend::parse(std::string_view json_text, const std::filesystem::path& base_dir,
                                       std::uint64_t seed) {
  std::vector<MockRule> rules;
  try {
    const json doc = json::parse(json_text);
    for (const json& r : doc.at("rules")) {
      MockRule rule;
      if (r.contains("digest")) rule.digest = r.at("digest").get<std::string>();
      if (r.contains("contains")) {
        const json& c = r.at("contains");
        if (c.is_string()) {
          rule.contains.push_back(c.get<std::string>());
        } else {
          rule.contains = c.get<std::vector<std::string>>();
        }
      }
      if (r.contains("seed")) rule.seed = r.at("seed").get<std::uint64_t>();
      if (r.contains("response_file")) {
        rule.response = kg::read_file(base_dir / r.at("response_file").get<std::string>());
      } else {
        rule.response = r.at("response").get<std::string>();
      }
      rules.push_back(std::move(rule));
    }
  } catch (const json::exception& e) {
    throw Error(std::string("invalid mock script: ") + e.what());
  }
  return MockChatBackend(std::move(rules), seed);
}

MockChatBackend MockChatBackend::load(const std::filesystem::path& path, std::uint64_t seed) {
  return parse(kg::read_file(path), path.parent_path(), seed);
}

LlmResponse MockChatBackend::complete(const LlmRequest& request) const {
  std::string system, user;
  for (const auto& m : request.messages) {
    if (m.role == "system") system = m.content;
    if (m.role == "user") user = m.content;
  }
  const std::string digest = prompt_digest(system, user);
  for (const MockRule& r : rules_) {
    if (r.digest && *r.digest != digest) continue;
    if (r.seed && *r.seed != seed_) continue;
    bool all = true;
    for (const auto& needle : r.contains) all = all && user.find(needle) != std::string::npos;
    if (!all) continue;
    return LlmResponse{r.response, 0, 0, 0.0};
  }
  throw LlmError(LlmErrorKind::ScriptMiss, "mock script has no rule for prompt " + digest);
}

std::string extract_patch(std::string_view response) {
  std::string_view body = response;
  if (const auto open = response.find("```"); open != std::string_view::npos) {
    const auto line_end = response.find('\n', open);
    if (line_end != std::string_view::npos) {
      const auto close = response.find("```", line_end + 1);
      body = response.substr(line_end + 1, close == std::string_view::npos ? std::string_view::npos
                                                                           : close - line_end - 1);
    }
  }
  const auto first = body.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = body.find_last_not_of(" \t\r\n");
  std::string out(body.substr(first, last - first + 1));
  out += '\n';
  return out;
}

PatchCandidate generate(const Prompt& prompt, const ChatBackend& backend, const GenerateOptions& opts) {
  LlmRequest req;
  req.model = opts.model;
  req.temperature = opts.temperature;
  req.max_tokens = opts.max_tokens;
  req.messages = {{"system", prompt.system_text}, {"user", prompt.user_text}};
  const LlmResponse res = backend.complete(req);
  std::string patched = extract_patch(res.text);
  if (patched.empty()) throw LlmError(LlmErrorKind::EmptyResponse, "model returned no patch text");
  return PatchCandidate{std::move(patched), prompt.slots.stage, prompt.digest()};
}

}  // namespace scpatcher::repair
