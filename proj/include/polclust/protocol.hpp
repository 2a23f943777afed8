#pragma once

/*
  Newline-delimited JSON device protocol over TCP.

  Requests:
    {"id": 1, "cmd": "set", "angles_deg": [a0, a1, ...]}
    {"id": 2, "cmd": "measure"}
    {"id": 3, "cmd": "info"}

  Responses:
    {"id": 1, "ok": true}
    {"id": 2, "ok": true, "stokes": [s0, s1, s2, s3]}
    {"id": 3, "ok": true, "plates": n, "angle_quantum": q, "motion_time": t}
    {"id": 4, "ok": false, "error": "<code>", "detail": "<text>"}

  Error codes: bad-request (unparseable line, missing fields, unknown cmd),
  invalid-argument (wrong angle count, non-finite angle), internal.
  Requests from all connections are handled one at a time.
*/

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "polclust/hardware.hpp"

namespace polclust {

class DeviceServer {
 public:
  using Logger = std::function<void(const std::string&)>;

  // Binds and listens immediately; port 0 picks an ephemeral port.
  // Throws ConnectionError if the endpoint cannot be bound.
  DeviceServer(Device& backend, const std::string& host = "127.0.0.1", std::uint16_t port = 0);
  ~DeviceServer();
  DeviceServer(const DeviceServer&) = delete;
  DeviceServer& operator=(const DeviceServer&) = delete;

  std::uint16_t port() const { return port_; }
  void set_logger(Logger logger) { logger_ = std::move(logger); }

  // Accept loop on a background thread.
  void start();
  // Blocks until stop() is called from another thread or a signal handler path.
  void serve_forever();
  void stop();

  // One request line in, one response line out (without the newline).
  std::string handle_line(const std::string& line);

 private:
  void accept_loop();
  void serve_client(int fd);

  Device& backend_;
  std::mutex backend_mutex_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread accept_thread_;
  std::mutex clients_mutex_;
  std::vector<int> client_fds_;
  std::vector<std::thread> client_threads_;
  Logger logger_;
};

// Client handle that behaves like an in-process Device.
class RemoteDevice : public Device {
 public:
  // Throws ConnectionError, TimeoutError or ProtocolError.
  RemoteDevice(const std::string& host, std::uint16_t port,
               std::chrono::milliseconds timeout = std::chrono::seconds(5));
  ~RemoteDevice() override;
  RemoteDevice(const RemoteDevice&) = delete;
  RemoteDevice& operator=(const RemoteDevice&) = delete;

  std::size_t plate_count() const override { return plates_; }
  void set_plate_angles(std::span<const double> targets_deg) override;
  StokesVector measure() override;
  DeviceInfo info() override;

  // Sends a raw line and returns the raw response line.
  std::string round_trip(const std::string& line);

 private:
  // Sends `line`, waits for the reply, checks id and ok; returns the reply.
  std::string call(const std::string& line, std::int64_t id);
  void send_line(const std::string& line);
  std::string read_line();

  int fd_ = -1;
  std::chrono::milliseconds timeout_;
  std::int64_t next_id_ = 1;
  std::size_t plates_ = 0;
  std::string buffer_;
};

// "host:port" -> parts. Throws InvalidArgument.
std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& endpoint);

}  // namespace polclust
