#include <thread>

#include "doctest.h"
#include "gevi/service.hpp"
#include "httplib.h"
#include "support.hpp"

using namespace gevi;
using namespace gevi::testing;

namespace {

/// The 92_1 flow pattern plus the overlap pattern around 92_3.
EvolutionArtifact fixture() {
  auto groups = flow_92_1_scenario();
  groups.push_back({{92, 2}, members({"z1", "y1", "y2"})});
  groups.push_back({{92, 3}, members({"m1000", "m1001", "z1", "s1", "s2"})});
  groups.push_back({{120, 0}, members({"p", "q", "r"})});
  const auto slots = segment_slots(parse_instant("1998-01-05"), parse_instant("2004-02-03"), days(30), days(15));
  std::vector<std::uint64_t> counts(slots.size(), 0);
  counts[92] = 1234;
  return build_artifact(std::move(groups), slots, counts, {});
}

const ApiRouter& router() {
  static const ApiRouter r(fixture());
  return r;
}

}  // namespace

TEST_CASE("hierarchy list") {
  const auto res = router().handle("GET", "/api/hierarchies");
  CHECK(res.status == 200);
  REQUIRE(res.body.is_array());
  CHECK(res.body.size() == router().artifact().hierarchies.size());
  CHECK(res.body[0].at("id") == 0);
  CHECK(res.body[0].at("root") == "91_0");
  CHECK(res.body[0].at("stable_groups") == 6);

  // the 92_2, 92_3 and 120_0 groups are alone and short-lived
  const auto all = res.body.size();
  const auto stable = router().handle("GET", "/api/hierarchies", {{"stable", "1"}});
  REQUIRE(stable.status == 200);
  CHECK(stable.body.size() == 1);
  CHECK(all == 5);
  CHECK(router().handle("GET", "/api/hierarchies", {{"stable", "maybe"}}).status == 400);
}

TEST_CASE("hierarchy graph carries positions, sizes, flows and styles") {
  const auto res = router().handle("GET", "/api/hierarchies/0/graph");
  REQUIRE(res.status == 200);
  bool seen = false;
  for (const auto& n : res.body.at("nodes")) {
    CHECK(n.contains("x"));
    CHECK(n.contains("y"));
    if (n.at("id") == "92_1") {
      seen = true;
      CHECK(n.at("size") == 103);
      CHECK(n.at("flows").at("inflow") == 96);
      CHECK(n.at("flows").at("external_in") == 9);
      CHECK(n.at("flows").at("outflow") == 100);
      CHECK(n.at("flows").at("external_out") == 5);
    }
  }
  CHECK(seen);
  CHECK(res.body.at("edges").size() == 5);
  for (const auto& e : res.body.at("edges")) {
    CHECK(e.at("style") == "solid");
    CHECK(e.contains("kind"));
  }
  CHECK(router().handle("GET", "/api/hierarchies/99/graph").status == 404);
  CHECK(router().handle("GET", "/api/hierarchies/x/graph").status == 400);
}

TEST_CASE("group record and overlaps") {
  const auto g = router().handle("GET", "/api/groups/92_1");
  REQUIRE(g.status == 200);
  CHECK(g.body.at("size") == 103);
  CHECK(g.body.at("members").size() == 103);
  CHECK(g.body.at("incoming").size() == 2);
  CHECK(g.body.at("outgoing").size() == 3);
  CHECK(g.body.at("incoming")[0].contains("stability"));
  CHECK(g.body.at("position").contains("x"));

  const auto o = router().handle("GET", "/api/groups/92_3/overlaps");
  REQUIRE(o.status == 200);
  std::map<std::string, int> counts;
  for (const auto& e : o.body.at("overlaps")) counts[e.at("label")] = e.at("count");
  CHECK(counts == std::map<std::string, int>{{"92_1", 2}, {"92_2", 1}});

  CHECK(router().handle("GET", "/api/groups/999_0").status == 404);
  CHECK(router().handle("GET", "/api/groups/banana").status == 400);
  CHECK(router().handle("GET", "/api/groups/999_0/overlaps").status == 404);
}

TEST_CASE("slot stats") {
  const auto s = router().handle("GET", "/api/slots/92/stats");
  REQUIRE(s.status == 200);
  CHECK(s.body.at("group_count") == 4);
  CHECK(s.body.at("message_count") == 1234);
  CHECK(s.body.at("stability_mean").is_number());
  CHECK(s.body.at("start").is_string());
  CHECK(router().handle("GET", "/api/slots/0/stats").body.at("stability_mean").is_null());
  CHECK(router().handle("GET", "/api/slots/149/stats").status == 404);
  CHECK(router().handle("GET", "/api/slots/-1/stats").status == 400);
}

TEST_CASE("search trims, matches exactly and reports misses") {
  const std::multimap<std::string, std::string> q{{"q", "92_1 "}};
  const auto hit = router().handle("GET", "/api/search", q);
  REQUIRE(hit.status == 200);
  CHECK(hit.body.at("label") == "92_1");
  CHECK(hit.body.at("size") == 103);
  CHECK(hit.body.at("hierarchy") == 0);
  CHECK(hit.body.at("position").at("x").is_number());
  CHECK(router().handle("GET", "/api/search", {{"q", "999_0"}}).status == 404);
  CHECK(router().handle("GET", "/api/search").status == 400);
}

TEST_CASE("read-only and unknown routes") {
  CHECK(router().handle("POST", "/api/hierarchies").status == 405);
  CHECK(router().handle("GET", "/api/nothing").status == 404);
  CHECK(router().handle("GET", "/").status == 404);
}

TEST_CASE("responses are pure functions of the artifact") {
  const auto a = router().handle("GET", "/api/hierarchies/0/graph").body.dump();
  const auto b = router().handle("GET", "/api/hierarchies/0/graph").body.dump();
  CHECK(a == b);
  const ApiRouter twin(fixture());
  CHECK(twin.handle("GET", "/api/hierarchies/0/graph").body.dump() == a);
}

TEST_CASE("listen address parsing") {
  CHECK(parse_listen_address("127.0.0.1:8080") == std::pair<std::string, int>{"127.0.0.1", 8080});
  CHECK(parse_listen_address("localhost:0").second == 0);
  CHECK_THROWS_AS(parse_listen_address("8080"), std::invalid_argument);
  CHECK_THROWS_AS(parse_listen_address("host:99999"), std::invalid_argument);
  CHECK_THROWS_AS(parse_listen_address("host:x"), std::invalid_argument);
}

TEST_CASE("HTTP server answers concurrent requests") {
  ApiServer server(router());
  const int port = server.bind("127.0.0.1", 0);
  REQUIRE(port > 0);
  std::thread runner([&] { server.run(); });
  server.wait_until_ready();

  std::vector<std::thread> clients;
  std::atomic<int> ok{0};
  for (int i = 0; i < 8; ++i) {
    clients.emplace_back([&] {
      httplib::Client client("127.0.0.1", port);
      const auto res = client.Get("/api/search?q=92_1");
      if (res && res->status == 200 && nlohmann::json::parse(res->body).at("size") == 103) ++ok;
    });
  }
  for (auto& c : clients) c.join();
  CHECK(ok == 8);

  httplib::Client client("127.0.0.1", port);
  const auto missing = client.Get("/api/groups/999_0");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  CHECK(missing->get_header_value("Content-Type") == "application/json");
  const auto post = client.Post("/api/hierarchies", "", "application/json");
  REQUIRE(post);
  CHECK(post->status >= 400);

  server.stop();
  runner.join();
}
