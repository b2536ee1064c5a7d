#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "thumbside/bridge_session.hpp"

namespace thumbside {

inline constexpr std::uint16_t kDefaultBridgePort = 7341;

struct StaticResponse {
  int status = 404;
  std::string content_type = "text/plain";
  std::string etag;
  std::string body;
};

/// Resolves a request target against `root` and reads the file. Handles
/// "/" as index.html, percent-decoding, traversal (404), and If-None-Match
/// (304). `head` skips reading the body.
StaticResponse serve_static(const std::filesystem::path& root,
                            std::string_view target,
                            std::string_view if_none_match = {},
                            bool head = false);

/// Whether a WebSocket request target asks for fit_debug messages
/// (`?debug=1` or `?debug=true`).
bool wants_debug(std::string_view target);

struct BridgeServerOptions {
  std::string address = "127.0.0.1";
  /// 0 picks a free port; read it back with port() after start().
  std::uint16_t port = kDefaultBridgePort;
  std::optional<std::filesystem::path> static_dir;
  SessionOptions session;
};

/// WebSocket bridge plus static file server on one port. Each WebSocket
/// connection owns a BridgeSession. All I/O runs on one background thread.
class BridgeServer {
 public:
  explicit BridgeServer(BridgeServerOptions opts);
  ~BridgeServer();
  BridgeServer(const BridgeServer&) = delete;
  BridgeServer& operator=(const BridgeServer&) = delete;

  /// Binds and starts serving. Throws std::runtime_error if binding fails.
  void start();
  void stop();
  /// Blocks until SIGINT or SIGTERM, then stops.
  void wait_for_signal();

  std::uint16_t port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace thumbside
