#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "dcl/service_api.hpp"

namespace dcl {

struct ServerOptions {
  std::string address = "127.0.0.1";
  std::uint16_t port = 8080;  ///< 0 picks a free port
  int threads = 2;
  std::size_t max_sessions = 64;
};

/// HTTP and WebSocket front end of the steering service.
class Server {
 public:
  explicit Server(ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts the worker threads; returns immediately.
  void start();
  /// Closes the listener and joins the worker threads.
  void stop();
  /// Blocks until stop() is called from another thread or a signal arrives.
  void wait();

  std::uint16_t port() const;
  SessionManager& sessions();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace dcl
