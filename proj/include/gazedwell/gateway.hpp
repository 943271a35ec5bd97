#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "gazedwell/engine.hpp"
#include "gazedwell/model.hpp"

namespace gazedwell {

inline constexpr std::string_view kProtocolVersion = "gdw/1";
inline constexpr size_t kMaxFrameBytes = 1 << 20;

// Frames are a 4-byte big-endian payload length followed by the payload, one
// JSON record per frame.
std::string encode_frame(std::string_view payload);

class FrameDecoder {
 public:
  // Appends bytes and returns every frame completed by them. Throws
  // std::runtime_error on a frame longer than kMaxFrameBytes.
  std::vector<std::string> feed(std::string_view bytes);
  size_t pending() const { return buffer_.size(); }

 private:
  std::string buffer_;
};

struct GatewayOptions {
  EngineConfig engine;
  bool include_posterior = true;
};

// Protocol state for one client. Transport-agnostic: feed it decoded payloads,
// send back whatever it returns.
class GatewaySession {
 public:
  GatewaySession(std::shared_ptr<const GazeModel> model, GatewayOptions options);

  std::vector<std::string> handle(std::string_view payload);
  bool closed() const { return closed_; }
  const SelectionEngine& engine() const { return engine_; }

 private:
  std::string error(std::string_view code, std::string_view message, bool close);

  std::shared_ptr<const GazeModel> model_;
  GatewayOptions options_;
  SelectionEngine engine_;
  bool greeted_ = false;
  bool closed_ = false;
  std::optional<int64_t> last_t_;
};

// Runs every payload through a fresh session and collects the replies, one
// vector per input message.
std::vector<std::vector<std::string>> replay_transcript(std::shared_ptr<const GazeModel> model,
                                                        const GatewayOptions& options,
                                                        const std::vector<std::string>& messages);

// TCP front end: one thread and one GatewaySession per connection.
class GatewayServer {
 public:
  GatewayServer(std::shared_ptr<const GazeModel> model, GatewayOptions options);
  ~GatewayServer();
  GatewayServer(const GatewayServer&) = delete;
  GatewayServer& operator=(const GatewayServer&) = delete;

  // Binds and listens; port 0 picks a free port. Returns the bound port.
  uint16_t listen(uint16_t port, const std::string& host = "127.0.0.1");
  void start();  // accept loop on a background thread
  void serve();  // accept loop on the calling thread
  void stop();

 private:
  void handle_connection(int fd);

  std::shared_ptr<const GazeModel> model_;
  GatewayOptions options_;
  int listen_fd_ = -1;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  std::mutex mu_;
  std::vector<std::thread> workers_;
  std::vector<int> client_fds_;
};

// Blocking client used by tests and tooling.
class GatewayClient {
 public:
  GatewayClient(const std::string& host, uint16_t port);
  ~GatewayClient();
  GatewayClient(const GatewayClient&) = delete;
  GatewayClient& operator=(const GatewayClient&) = delete;

  void send(std::string_view payload);
  // Next frame, or nothing once the server has closed the connection.
  std::optional<std::string> receive();

 private:
  int fd_ = -1;
  FrameDecoder decoder_;
  std::vector<std::string> ready_;
};

}  // namespace gazedwell
