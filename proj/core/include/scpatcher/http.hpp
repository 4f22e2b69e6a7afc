#pragma once

// Minimal JSON-over-HTTP(S) POST shared by the remote embedder and LLM client.

#include <chrono>
#include <string>

namespace scpatcher::net {

struct HttpResult {
  int status = 0;            // 0 when the transport failed
  std::string body;
  std::string transport_error;
  bool timed_out = false;
};

HttpResult post_json(const std::string& url, const std::string& bearer_key, const std::string& body,
                     std::chrono::milliseconds timeout);

}  // namespace scpatcher::net
