#include "gazedwell/gateway.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <stdexcept>

#include <json.hpp>

#include "gazedwell/trace_io.hpp"

namespace gazedwell {

using nlohmann::json;

std::string encode_frame(std::string_view payload) {
  if (payload.size() > kMaxFrameBytes) throw std::invalid_argument("frame too large");
  const auto n = static_cast<uint32_t>(payload.size());
  std::string out;
  out.reserve(4 + payload.size());
  out.push_back(static_cast<char>((n >> 24) & 0xff));
  out.push_back(static_cast<char>((n >> 16) & 0xff));
  out.push_back(static_cast<char>((n >> 8) & 0xff));
  out.push_back(static_cast<char>(n & 0xff));
  out.append(payload);
  return out;
}

std::vector<std::string> FrameDecoder::feed(std::string_view bytes) {
  buffer_.append(bytes);
  std::vector<std::string> frames;
  size_t pos = 0;
  while (buffer_.size() - pos >= 4) {
    const auto* p = reinterpret_cast<const unsigned char*>(buffer_.data() + pos);
    const uint32_t n = (uint32_t{p[0]} << 24) | (uint32_t{p[1]} << 16) | (uint32_t{p[2]} << 8) | p[3];
    if (n > kMaxFrameBytes) throw std::runtime_error("incoming frame exceeds size limit");
    if (buffer_.size() - pos - 4 < n) break;
    frames.emplace_back(buffer_, pos + 4, n);
    pos += 4 + n;
  }
  buffer_.erase(0, pos);
  return frames;
}

// ---------------------------------------------------------------------------
// Session

GatewaySession::GatewaySession(std::shared_ptr<const GazeModel> model, GatewayOptions options)
    : model_(model), options_(options), engine_(std::move(model), options.engine) {}

std::string GatewaySession::error(std::string_view code, std::string_view message, bool close) {
  if (close) closed_ = true;
  return json{{"type", "ERROR"}, {"code", code}, {"msg", message}}.dump();
}

std::vector<std::string> GatewaySession::handle(std::string_view payload) {
  std::vector<std::string> out;
  if (closed_) return out;

  json msg;
  try {
    msg = json::parse(payload);
  } catch (const json::parse_error&) {
    out.push_back(error("bad_message", "payload is not valid JSON", false));
    return out;
  }
  if (!msg.is_object() || !msg.contains("type") || !msg["type"].is_string()) {
    out.push_back(error("bad_message", "message needs a string 'type'", false));
    return out;
  }
  const std::string type = msg["type"].get<std::string>();

  if (type == "HELLO") {
    const auto it = msg.find("protocol_version");
    if (it == msg.end() || !it->is_string() || it->get<std::string>() != kProtocolVersion) {
      out.push_back(error("unsupported_version", "server speaks gdw/1", true));
      return out;
    }
    greeted_ = true;
    out.push_back(json{{"type", "ACK"}, {"of", "HELLO"}, {"protocol_version", kProtocolVersion}}.dump());
    return out;
  }
  if (!greeted_) {
    out.push_back(error("no_hello", "HELLO must be the first message", true));
    return out;
  }

  if (type == "PAGE_LAYOUT") {
    if (!msg.contains("layout")) {
      out.push_back(error("bad_message", "PAGE_LAYOUT needs a 'layout' object", false));
      return out;
    }
    try {
      std::vector<ButtonRegion> buttons;
      PageLayout layout = layout_from_json(msg["layout"], &buttons);
      engine_.set_layout(std::move(layout), std::move(buttons));
    } catch (const std::exception& e) {
      out.push_back(error("bad_layout", e.what(), false));
      return out;
    }
    out.push_back(json{{"type", "ACK"}, {"of", "PAGE_LAYOUT"}}.dump());
    return out;
  }

  if (type == "GAZE") {
    const auto t = msg.find("t");
    const auto x = msg.find("x");
    const auto y = msg.find("y");
    if (t == msg.end() || x == msg.end() || y == msg.end() || !t->is_number_integer() ||
        !x->is_number() || !y->is_number()) {
      out.push_back(error("bad_message", "GAZE needs integer t and numeric x, y", false));
      return out;
    }
    if (!engine_.has_layout()) {
      out.push_back(error("no_layout", "GAZE before PAGE_LAYOUT", true));
      return out;
    }
    const int64_t ti = t->get<int64_t>();
    if (last_t_ && ti <= *last_t_) {
      out.push_back(error("out_of_order", "gaze t must increase strictly", true));
      return out;
    }
    last_t_ = ti;
    const auto events = engine_.feed_gaze({ti, {x->get<double>(), y->get<double>()}});
    for (const auto& ev : events) {
      if (const auto* c = std::get_if<CommandActivated>(&ev)) {
        out.push_back(json{{"type", "COMMAND"}, {"name", command_name(c->command)}, {"t", c->t}}.dump());
      } else if (const auto* d = std::get_if<DwellsAssigned>(&ev)) {
        json rows = json::array();
        for (const auto& l : d->dwells.links) {
          json row = {{"id", l.id}, {"n", l.samples}, {"t_ms", l.actual_ms(model_->sample_period_ms)}};
          if (options_.include_posterior) row["p"] = l.posterior;
          rows.push_back(std::move(row));
        }
        out.push_back(json{{"type", "DWELLS"}, {"t", d->t}, {"dwells", std::move(rows)}}.dump());
      } else if (const auto* s = std::get_if<LinkSelected>(&ev)) {
        out.push_back(json{{"type", "SELECTED"},
                           {"id", s->link},
                           {"t", s->t},
                           {"response_time_ms", s->response_time_ms}}
                          .dump());
      } else if (const auto* c2 = std::get_if<SelectionCancelled>(&ev)) {
        json note = {{"type", "CANCELLED"}};
        if (c2->link) note["id"] = *c2->link;
        out.push_back(note.dump());
      }
    }
    return out;
  }

  if (type == "CANCEL") {
    json ack = {{"type", "ACK"}, {"of", "CANCEL"}};
    if (!engine_.has_layout()) {
      ack["cancelled"] = false;
    } else if (const auto ev = engine_.cancel()) {
      ack["cancelled"] = true;
      const auto& c = std::get<SelectionCancelled>(*ev);
      if (c.link) ack["id"] = *c.link;
    } else {
      ack["cancelled"] = false;
    }
    out.push_back(ack.dump());
    return out;
  }

  if (type == "RESET") {
    if (engine_.has_layout()) engine_.reset();
    out.push_back(json{{"type", "ACK"}, {"of", "RESET"}}.dump());
    return out;
  }

  out.push_back(error("bad_message", "unknown message type '" + type + "'", false));
  return out;
}

std::vector<std::vector<std::string>> replay_transcript(std::shared_ptr<const GazeModel> model,
                                                        const GatewayOptions& options,
                                                        const std::vector<std::string>& messages) {
  GatewaySession session(std::move(model), options);
  std::vector<std::vector<std::string>> replies;
  replies.reserve(messages.size());
  for (const auto& m : messages) replies.push_back(session.handle(m));
  return replies;
}

// ---------------------------------------------------------------------------
// TCP transport

namespace {

bool write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<size_t>(n));
  }
  return true;
}

[[noreturn]] void throw_errno(const std::string& what) {
  throw std::runtime_error(what + ": " + std::strerror(errno));
}

}  // namespace

GatewayServer::GatewayServer(std::shared_ptr<const GazeModel> model, GatewayOptions options)
    : model_(std::move(model)), options_(options) {}

GatewayServer::~GatewayServer() { stop(); }

uint16_t GatewayServer::listen(uint16_t port, const std::string& host) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw_errno("socket");
  int yes = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    throw std::invalid_argument("bad listen address " + host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) throw_errno("bind");
  if (::listen(listen_fd_, 16) < 0) throw_errno("listen");
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  running_ = true;
  return ntohs(addr.sin_port);
}

void GatewayServer::start() {
  acceptor_ = std::thread([this] { serve(); });
}

void GatewayServer::serve() {
  while (running_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      break;
    }
    int yes = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &yes, sizeof yes);
    std::lock_guard lock(mu_);
    if (!running_) {
      ::close(fd);
      break;
    }
    client_fds_.push_back(fd);
    workers_.emplace_back([this, fd] { handle_connection(fd); });
  }
}

void GatewayServer::handle_connection(int fd) {
  GatewaySession session(model_, options_);
  FrameDecoder decoder;
  char buf[8192];
  while (!session.closed()) {
    const ssize_t n = ::recv(fd, buf, sizeof buf, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    std::vector<std::string> frames;
    try {
      frames = decoder.feed(std::string_view(buf, static_cast<size_t>(n)));
    } catch (const std::exception& e) {
      write_all(fd, encode_frame(json{{"type", "ERROR"}, {"code", "bad_frame"}, {"msg", e.what()}}.dump()));
      break;
    }
    bool ok = true;
    for (const auto& frame : frames) {
      for (const auto& reply : session.handle(frame)) ok = ok && write_all(fd, encode_frame(reply));
      if (session.closed() || !ok) break;
    }
    if (!ok) break;
  }
  ::shutdown(fd, SHUT_RDWR);
}

void GatewayServer::stop() {
  if (listen_fd_ >= 0) {
    {
      std::lock_guard lock(mu_);
      running_ = false;
      for (int fd : client_fds_) ::shutdown(fd, SHUT_RDWR);
    }
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> workers;
  std::vector<int> fds;
  {
    std::lock_guard lock(mu_);
    workers.swap(workers_);
    fds.swap(client_fds_);
  }
  for (auto& w : workers) w.join();
  for (int fd : fds) ::close(fd);
}

GatewayClient::GatewayClient(const std::string& host, uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw_errno("socket");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    throw std::invalid_argument("bad address " + host);
  }
  if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) throw_errno("connect");
  int yes = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &yes, sizeof yes);
}

GatewayClient::~GatewayClient() {
  if (fd_ >= 0) ::close(fd_);
}

void GatewayClient::send(std::string_view payload) {
  if (!write_all(fd_, encode_frame(payload))) throw_errno("send");
}

std::optional<std::string> GatewayClient::receive() {
  char buf[8192];
  while (ready_.empty()) {
    const ssize_t n = ::recv(fd_, buf, sizeof buf, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return std::nullopt;
    for (auto& f : decoder_.feed(std::string_view(buf, static_cast<size_t>(n)))) {
      ready_.push_back(std::move(f));
    }
  }
  std::string front = std::move(ready_.front());
  ready_.erase(ready_.begin());
  return front;
}

}  // namespace gazedwell
