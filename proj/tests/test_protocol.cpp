#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <json.hpp>
#include <thread>
#include <vector>

#include "polclust/errors.hpp"
#include "polclust/protocol.hpp"

using namespace polclust;
using nlohmann::json;

namespace {

DeviceConfig noisy() {
  DeviceConfig c;
  c.stokes_noise_sigma = 0.01;
  c.seed = 5;
  return c;
}

// Listening socket that never accepts or replies.
struct SilentListener {
  int fd = -1;
  std::uint16_t port = 0;
  SilentListener() {
    fd = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in a{};
    a.sin_family = AF_INET;
    a.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    ::bind(fd, reinterpret_cast<sockaddr*>(&a), sizeof a);
    ::listen(fd, 4);
    socklen_t len = sizeof a;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&a), &len);
    port = ntohs(a.sin_port);
  }
  ~SilentListener() { ::close(fd); }
};

}  // namespace

TEST_CASE("parse_endpoint") {
  CHECK(parse_endpoint("127.0.0.1:5000") == std::pair<std::string, std::uint16_t>{"127.0.0.1", 5000});
  CHECK(parse_endpoint("localhost:0").second == 0);
  CHECK(parse_endpoint(":7000").first == "127.0.0.1");
  CHECK_THROWS_AS(parse_endpoint("nohost"), InvalidArgument);
  CHECK_THROWS_AS(parse_endpoint("h:"), InvalidArgument);
  CHECK_THROWS_AS(parse_endpoint("h:12x"), InvalidArgument);
  CHECK_THROWS_AS(parse_endpoint("h:70000"), InvalidArgument);
}

TEST_CASE("handle_line responses") {
  SimulatedDevice dev(2, DeviceConfig{});
  DeviceServer server(dev);

  auto r = json::parse(server.handle_line(R"({"id":1,"cmd":"set","angles_deg":[0,22.5]})"));
  CHECK(r["id"] == 1);
  CHECK(r["ok"] == true);

  r = json::parse(server.handle_line(R"({"id":2,"cmd":"measure"})"));
  REQUIRE(r["stokes"].size() == 4);
  CHECK(r["stokes"][0].get<double>() == doctest::Approx(1.0));
  CHECK(r["stokes"][3].get<double>() == doctest::Approx(0.0));

  r = json::parse(server.handle_line(R"({"id":3,"cmd":"info"})"));
  CHECK(r["plates"] == 2);
  CHECK(r["angle_quantum"].get<double>() == 0.08);
  CHECK(r["motion_time"].get<double>() == doctest::Approx(22.48 / 450.0));

  r = json::parse(server.handle_line("not json"));
  CHECK(r["ok"] == false);
  CHECK(r["error"] == "bad-request");
  CHECK(r["id"].is_null());

  r = json::parse(server.handle_line(R"({"id":4,"cmd":"dance"})"));
  CHECK(r["error"] == "bad-request");
  CHECK(r["id"] == 4);

  r = json::parse(server.handle_line(R"({"id":5,"cmd":"set"})"));
  CHECK(r["error"] == "bad-request");

  r = json::parse(server.handle_line(R"({"id":6,"cmd":"set","angles_deg":[1,2,3]})"));
  CHECK(r["error"] == "invalid-argument");

  r = json::parse(server.handle_line(R"({"cmd":"info"})"));
  CHECK(r["error"] == "bad-request");

  r = json::parse(server.handle_line("[1,2]"));
  CHECK(r["error"] == "bad-request");
}

TEST_CASE("loopback matches the in-process device bit for bit") {
  SimulatedDevice served(4, noisy());
  SimulatedDevice local(4, noisy());
  DeviceServer server(served);
  server.start();
  RemoteDevice remote("127.0.0.1", server.port());
  CHECK(remote.plate_count() == 4);

  const std::vector<std::vector<double>> moves{{10, 20, 30, 40}, {0.013, -7.77, 123.456, 1e-3}, {90, 90, 90, 90}};
  for (const auto& m : moves) {
    remote.set_plate_angles(m);
    local.set_plate_angles(m);
    for (int i = 0; i < 5; ++i) {
      const auto a = remote.measure();
      const auto b = local.measure();
      CHECK(a.s0 == b.s0);
      CHECK(a.s1 == b.s1);
      CHECK(a.s2 == b.s2);
      CHECK(a.s3 == b.s3);
    }
  }
  CHECK(remote.info().motion_time == local.info().motion_time);

  const std::vector<double> wrong{1.0};
  try {
    remote.set_plate_angles(wrong);
    FAIL("expected ProtocolError");
  } catch (const ProtocolError& e) {
    CHECK(e.code() == "invalid-argument");
  }
  auto raw = json::parse(remote.round_trip("{bad"));
  CHECK(raw["error"] == "bad-request");
  // The connection survives errors.
  const auto after = remote.info();
  CHECK(after.plates == 4);
  server.stop();
}

TEST_CASE("concurrent clients are all served") {
  SimulatedDevice dev(2, DeviceConfig{});
  DeviceServer server(dev);
  server.start();
  std::vector<std::thread> threads;
  std::vector<int> ok(3, 0);
  for (int c = 0; c < 3; ++c) {
    threads.emplace_back([&, c] {
      RemoteDevice r("127.0.0.1", server.port());
      for (int i = 0; i < 50; ++i) {
        std::vector<double> t{double(c), double(i)};
        r.set_plate_angles(t);
        const auto s = r.measure();
        if (std::abs(s.s0 - 1.0) < 1e-12) ++ok[c];
      }
    });
  }
  for (auto& t : threads) t.join();
  for (int c = 0; c < 3; ++c) CHECK(ok[c] == 50);
  server.stop();
}

TEST_CASE("connection failures") {
  std::uint16_t dead_port;
  {
    SilentListener l;
    dead_port = l.port;
  }
  CHECK_THROWS_AS(RemoteDevice("127.0.0.1", dead_port), ConnectionError);

  SilentListener silent;
  CHECK_THROWS_AS(RemoteDevice("127.0.0.1", silent.port, std::chrono::milliseconds(200)), TimeoutError);

  SimulatedDevice dev(2, DeviceConfig{});
  DeviceServer a(dev);
  CHECK_THROWS_AS(DeviceServer(dev, "127.0.0.1", a.port()), ConnectionError);
  CHECK_THROWS_AS(DeviceServer(dev, "not-an-ip", 0), ConnectionError);
}

TEST_CASE("server stop closes client connections") {
  SimulatedDevice dev(2, DeviceConfig{});
  auto server = std::make_unique<DeviceServer>(dev);
  server->start();
  RemoteDevice r("127.0.0.1", server->port(), std::chrono::milliseconds(1000));
  server->stop();
  CHECK_THROWS_AS(r.info(), ConnectionError);
}
