#include <doctest.h>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <thread>

#include "fixtures.hpp"
#include "reqintel/http.hpp"

using namespace reqintel;

TEST_CASE("bind parsing") {
  CHECK(parse_bind("127.0.0.1:8080") == std::pair<std::string, int>{"127.0.0.1", 8080});
  CHECK(parse_bind("[::1]:9") == std::pair<std::string, int>{"[::1]", 9});
  CHECK_THROWS_AS(parse_bind("localhost"), Error);
  CHECK_THROWS_AS(parse_bind("host:99999"), Error);
  CHECK_THROWS_AS(parse_bind(":80"), Error);
}

TEST_CASE("server round trip and url connector") {
  ServiceDeps deps;
  deps.persistent = false;
  deps.lexicon = testing_support::small_lexicon();
  Service service(testing_support::test_config("/nonexistent"), std::move(deps));
  HttpServer server(service);
  const int port = server.bind_any("127.0.0.1");
  REQUIRE(port > 0);
  std::thread t([&] { server.listen_after_bind(); });

  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/api/v1/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(health->get_header_value("Content-Type") == "application/json");
  CHECK(health->get_header_value("Access-Control-Allow-Origin") == "*");

  auto posted = client.Post("/api/v1/ingest?source_kind=microblog",
                            R"({"id":"h1","text":"crash after update","created_at":"2019-01-01T00:00:00Z"})",
                            "application/x-ndjson");
  REQUIRE(posted);
  CHECK(posted->status == 200);
  CHECK(nlohmann::json::parse(posted->body)["stored"] == 1);

  auto missing = client.Get("/api/v1/nope");
  REQUIRE(missing);
  CHECK(missing->status == 404);

  // A second server stands in for a remote feed.
  httplib::Server feed;
  const std::string body = testing_support::read_file(testing_support::data_dir() / "fixtures" / "microblog.ndjson");
  feed.Get("/feed.ndjson", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content(body, "application/x-ndjson");
  });
  feed.Get("/broken", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
  const int feed_port = feed.bind_to_any_port("127.0.0.1");
  std::thread ft([&] { feed.listen_after_bind(); });
  feed.wait_until_ready();

  const std::string base = "http://127.0.0.1:" + std::to_string(feed_port);
  HttpConnector ok("feed", base + "/feed.ndjson", Source::microblog);
  CHECK(ok.fetch().size() == 80);
  HttpConnector broken("broken", base + "/broken", Source::microblog);
  CHECK_THROWS_AS(broken.fetch(), Error);

  const auto made = make_connector(ConnectorConfig{"u", Source::custom, std::nullopt, base + "/feed.ndjson"});
  CHECK(made->fetch().size() == 80);

  feed.stop();
  ft.join();
  server.stop();
  t.join();

  HttpConnector down("down", "http://127.0.0.1:" + std::to_string(feed_port) + "/feed.ndjson", Source::custom);
  try {
    down.fetch();
    FAIL("fetched from a stopped server");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::connector_failure);
  }
}
