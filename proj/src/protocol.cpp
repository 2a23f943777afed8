#include "polclust/protocol.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>

#include <json.hpp>

#include "polclust/errors.hpp"

namespace polclust {

using nlohmann::json;

namespace {

std::string error_response(const json& id, const std::string& code, const std::string& detail) {
  return json{{"id", id}, {"ok", false}, {"error", code}, {"detail", detail}}.dump();
}

bool send_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

}  // namespace

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& endpoint) {
  const auto colon = endpoint.rfind(':');
  if (colon == std::string::npos || colon + 1 == endpoint.size())
    throw InvalidArgument("endpoint must look like host:port");
  const std::string host = colon == 0 ? "127.0.0.1" : endpoint.substr(0, colon);
  int port = 0;
  try {
    std::size_t used = 0;
    port = std::stoi(endpoint.substr(colon + 1), &used);
    if (used != endpoint.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw InvalidArgument("invalid port in endpoint '" + endpoint + "'");
  }
  if (port < 0 || port > 65535) throw InvalidArgument("port out of range");
  return {host, static_cast<std::uint16_t>(port)};
}

DeviceServer::DeviceServer(Device& backend, const std::string& host, std::uint16_t port)
    : backend_(backend) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw ConnectionError(std::string("socket: ") + std::strerror(errno));
  int yes = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host == "localhost" ? "127.0.0.1" : host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw ConnectionError("cannot parse bind address '" + host + "'");
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 ||
      ::listen(listen_fd_, 16) < 0) {
    const std::string why = std::strerror(errno);
    ::close(listen_fd_);
    throw ConnectionError("cannot bind " + host + ":" + std::to_string(port) + ": " + why);
  }
  socklen_t len = sizeof addr;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

DeviceServer::~DeviceServer() {
  stop();
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void DeviceServer::start() {
  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
}

void DeviceServer::serve_forever() {
  running_ = true;
  accept_loop();
}

void DeviceServer::stop() {
  const bool was_running = running_.exchange(false);
  if (was_running && listen_fd_ >= 0) ::shutdown(listen_fd_, SHUT_RDWR);
  if (accept_thread_.joinable()) accept_thread_.join();
  std::vector<std::thread> threads;
  {
    std::lock_guard lock(clients_mutex_);
    for (int fd : client_fds_) ::shutdown(fd, SHUT_RDWR);
    threads.swap(client_threads_);
  }
  for (auto& t : threads)
    if (t.joinable()) t.join();
}

void DeviceServer::accept_loop() {
  while (running_) {
    pollfd p{listen_fd_, POLLIN, 0};
    const int ready = ::poll(&p, 1, 100);
    if (ready < 0 && errno != EINTR) break;
    if (ready <= 0) continue;
    if (p.revents & (POLLERR | POLLHUP | POLLNVAL)) break;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    int yes = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &yes, sizeof yes);
    std::lock_guard lock(clients_mutex_);
    client_fds_.push_back(fd);
    client_threads_.emplace_back([this, fd] { serve_client(fd); });
  }
}

void DeviceServer::serve_client(int fd) {
  std::string buffer;
  char chunk[4096];
  bool open = true;
  while (open) {
    const ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      break;
    }
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t nl;
    while ((nl = buffer.find('\n')) != std::string::npos) {
      std::string line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const std::string reply = handle_line(line);
      if (logger_) logger_(line + " -> " + reply);
      if (!send_all(fd, reply + "\n")) {
        open = false;
        break;
      }
    }
  }
  std::lock_guard lock(clients_mutex_);
  std::erase(client_fds_, fd);
  ::close(fd);
}

std::string DeviceServer::handle_line(const std::string& line) {
  json req;
  try {
    req = json::parse(line);
  } catch (const json::exception& e) {
    return error_response(nullptr, "bad-request", std::string("unparseable JSON: ") + e.what());
  }
  if (!req.is_object()) return error_response(nullptr, "bad-request", "request must be a JSON object");
  const json id = req.contains("id") ? req["id"] : json(nullptr);
  if (!id.is_number_integer()) return error_response(nullptr, "bad-request", "missing integer id");
  if (!req.contains("cmd") || !req["cmd"].is_string())
    return error_response(id, "bad-request", "missing string cmd");
  const std::string cmd = req["cmd"].get<std::string>();

  std::lock_guard lock(backend_mutex_);
  try {
    if (cmd == "set") {
      if (!req.contains("angles_deg") || !req["angles_deg"].is_array())
        return error_response(id, "bad-request", "set needs an angles_deg array");
      std::vector<double> angles;
      for (const auto& a : req["angles_deg"]) {
        if (!a.is_number()) return error_response(id, "bad-request", "angles must be numbers");
        angles.push_back(a.get<double>());
      }
      backend_.set_plate_angles(angles);
      return json{{"id", id}, {"ok", true}}.dump();
    }
    if (cmd == "measure") {
      const StokesVector s = backend_.measure();
      return json{{"id", id}, {"ok", true}, {"stokes", {s.s0, s.s1, s.s2, s.s3}}}.dump();
    }
    if (cmd == "info") {
      const DeviceInfo info = backend_.info();
      return json{{"id", id},
                  {"ok", true},
                  {"plates", info.plates},
                  {"angle_quantum", info.angle_quantum},
                  {"motion_time", info.motion_time}}
          .dump();
    }
    return error_response(id, "bad-request", "unknown cmd '" + cmd + "'");
  } catch (const std::invalid_argument& e) {
    return error_response(id, "invalid-argument", e.what());
  } catch (const std::exception& e) {
    return error_response(id, "internal", e.what());
  }
}

RemoteDevice::RemoteDevice(const std::string& host, std::uint16_t port, std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &found) != 0 || !found)
    throw ConnectionError("cannot resolve " + host);
  fd_ = ::socket(found->ai_family, found->ai_socktype, found->ai_protocol);
  if (fd_ < 0) {
    ::freeaddrinfo(found);
    throw ConnectionError(std::string("socket: ") + std::strerror(errno));
  }
  const int rc = ::connect(fd_, found->ai_addr, found->ai_addrlen);
  ::freeaddrinfo(found);
  if (rc < 0) {
    const std::string why = std::strerror(errno);
    ::close(fd_);
    fd_ = -1;
    throw ConnectionError("cannot connect to " + host + ":" + std::to_string(port) + ": " + why);
  }
  int yes = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &yes, sizeof yes);
  plates_ = info().plates;
}

RemoteDevice::~RemoteDevice() {
  if (fd_ >= 0) ::close(fd_);
}

void RemoteDevice::send_line(const std::string& line) {
  if (!send_all(fd_, line + "\n")) throw ConnectionError(std::string("send: ") + std::strerror(errno));
}

std::string RemoteDevice::read_line() {
  const auto deadline = std::chrono::steady_clock::now() + timeout_;
  char chunk[4096];
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return line;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
        deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) throw TimeoutError("no response within " + std::to_string(timeout_.count()) + " ms");
    pollfd p{fd_, POLLIN, 0};
    const int ready = ::poll(&p, 1, static_cast<int>(left.count()));
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw ConnectionError(std::string("poll: ") + std::strerror(errno));
    }
    if (ready == 0) continue;
    const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n == 0) throw ConnectionError("connection closed by device");
    if (n < 0) {
      if (errno == EINTR) continue;
      throw ConnectionError(std::string("recv: ") + std::strerror(errno));
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::string RemoteDevice::round_trip(const std::string& line) {
  send_line(line);
  return read_line();
}

std::string RemoteDevice::call(const std::string& line, std::int64_t id) {
  const std::string reply = round_trip(line);
  json r;
  try {
    r = json::parse(reply);
  } catch (const json::exception&) {
    throw ProtocolError("protocol", "unparseable response: " + reply);
  }
  if (!r.is_object() || !r.contains("id") || r["id"] != id || !r.contains("ok") || !r["ok"].is_boolean())
    throw ProtocolError("protocol", "malformed response: " + reply);
  if (!r["ok"].get<bool>())
    throw ProtocolError(r.value("error", std::string("unknown")), r.value("detail", std::string()));
  return reply;
}

void RemoteDevice::set_plate_angles(std::span<const double> targets_deg) {
  const std::int64_t id = next_id_++;
  json req{{"id", id}, {"cmd", "set"}, {"angles_deg", std::vector<double>(targets_deg.begin(), targets_deg.end())}};
  call(req.dump(), id);
}

StokesVector RemoteDevice::measure() {
  const std::int64_t id = next_id_++;
  const json r = json::parse(call(json{{"id", id}, {"cmd", "measure"}}.dump(), id));
  const auto& s = r.at("stokes");
  if (!s.is_array() || s.size() != 4) throw ProtocolError("protocol", "stokes must hold 4 numbers");
  return {s[0].get<double>(), s[1].get<double>(), s[2].get<double>(), s[3].get<double>()};
}

DeviceInfo RemoteDevice::info() {
  const std::int64_t id = next_id_++;
  const json r = json::parse(call(json{{"id", id}, {"cmd", "info"}}.dump(), id));
  try {
    return {r.at("plates").get<std::size_t>(), r.at("angle_quantum").get<double>(),
            r.at("motion_time").get<double>()};
  } catch (const json::exception& e) {
    throw ProtocolError("protocol", e.what());
  }
}

}  // namespace polclust
