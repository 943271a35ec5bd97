#include <doctest.h>

#include <json.hpp>

#include "gazedwell/gateway.hpp"

using namespace gazedwell;
using nlohmann::json;

namespace {

GatewayOptions options() {
  GatewayOptions o;
  o.engine.policy = uniform_policy(500);
  return o;
}

std::shared_ptr<const GazeModel> model() {
  static const auto m = std::make_shared<const GazeModel>();
  return m;
}

std::string hello() { return R"({"type":"HELLO","protocol_version":"gdw/1"})"; }

std::string layout_msg() {
  return R"({"type":"PAGE_LAYOUT","layout":{"screen":[1280,1024],"links":[)"
         R"({"id":1,"left":100,"top":100,"width":120,"height":24},)"
         R"({"id":2,"left":500,"top":400,"width":120,"height":24}]}})";
}

std::string gaze(int64_t t, double x, double y) {
  return json{{"type", "GAZE"}, {"t", t}, {"x", x}, {"y", y}}.dump();
}

const Point kSelectButton{1230, 384};

std::vector<json> parse(const std::vector<std::string>& replies) {
  std::vector<json> out;
  for (const auto& r : replies) out.push_back(json::parse(r));
  return out;
}

// Reading the second link, dwelling on the Select button, then looking back
// at the link.
std::vector<std::string> scripted_messages() {
  std::vector<std::string> msgs{hello(), layout_msg()};
  int64_t t = 0;
  for (int i = 0; i < 40; ++i) msgs.push_back(gaze(t++, 560 + (i % 3), 412));
  for (int i = 0; i < 24; ++i) msgs.push_back(gaze(t++, kSelectButton.x, kSelectButton.y));
  for (int i = 0; i < 40; ++i) msgs.push_back(gaze(t++, 560, 410));
  return msgs;
}

}  // namespace

TEST_CASE("frame codec") {
  const std::string a = encode_frame("hello"), b = encode_frame(std::string(300, 'x'));
  CHECK(a.size() == 9);
  CHECK(static_cast<unsigned char>(a[3]) == 5);
  CHECK(static_cast<unsigned char>(b[2]) == 1);
  CHECK(static_cast<unsigned char>(b[3]) == 44);

  FrameDecoder dec;
  const std::string stream = a + b + encode_frame("");
  std::vector<std::string> got;
  for (char c : stream) {
    for (auto& f : dec.feed(std::string_view(&c, 1))) got.push_back(std::move(f));
  }
  CHECK(got == std::vector<std::string>{"hello", std::string(300, 'x'), ""});
  CHECK(dec.pending() == 0);

  FrameDecoder whole;
  CHECK(whole.feed(stream).size() == 3);

  FrameDecoder big;
  std::string header(4, '\0');
  header[0] = 0x7f;
  CHECK_THROWS_AS(big.feed(header), std::runtime_error);
}

TEST_CASE("a scripted selection") {
  GatewaySession s(model(), options());
  const auto msgs = scripted_messages();
  std::vector<json> all;
  for (const auto& m : msgs) {
    for (auto& r : parse(s.handle(m))) all.push_back(std::move(r));
  }
  REQUIRE(all.size() >= 4);
  CHECK(all[0] == json{{"type", "ACK"}, {"of", "HELLO"}, {"protocol_version", "gdw/1"}});
  CHECK(all[1] == json{{"type", "ACK"}, {"of", "PAGE_LAYOUT"}});
  CHECK(all[2]["type"] == "COMMAND");
  CHECK(all[2]["name"] == "SELECT");
  CHECK(all[2]["t"] == 40 + 23);
  CHECK(all[3]["type"] == "DWELLS");
  CHECK(all[3]["dwells"].size() == 2);
  for (const auto& d : all[3]["dwells"]) {
    CHECK(d["n"] == 30);
    CHECK(d.contains("p"));
  }
  REQUIRE(all.size() == 5);
  CHECK(all[4]["type"] == "SELECTED");
  CHECK(all[4]["id"] == 2);
  CHECK(all[4]["response_time_ms"].get<double>() == doctest::Approx(29 * kSamplePeriodMs));  // counted from the first off-button sample
  CHECK_FALSE(s.closed());
}

TEST_CASE("posterior can be left out of DWELLS") {
  auto o = options();
  o.include_posterior = false;
  GatewaySession s(model(), o);
  for (const auto& m : scripted_messages()) {
    for (const auto& r : parse(s.handle(m))) {
      if (r["type"] == "DWELLS") {
        for (const auto& d : r["dwells"]) CHECK_FALSE(d.contains("p"));
      }
    }
  }
}

TEST_CASE("protocol violations close the session") {
  auto code_of = [](const std::vector<std::string>& replies) {
    REQUIRE(replies.size() == 1);
    const json r = json::parse(replies[0]);
    CHECK(r["type"] == "ERROR");
    return r["code"].get<std::string>();
  };
  SUBCASE("wrong version") {
    GatewaySession s(model(), options());
    CHECK(code_of(s.handle(R"({"type":"HELLO","protocol_version":"gdw/2"})")) == "unsupported_version");
    CHECK(s.closed());
    CHECK(s.handle(hello()).empty());
  }
  SUBCASE("no hello") {
    GatewaySession s(model(), options());
    CHECK(code_of(s.handle(layout_msg())) == "no_hello");
    CHECK(s.closed());
  }
  SUBCASE("gaze before layout") {
    GatewaySession s(model(), options());
    s.handle(hello());
    CHECK(code_of(s.handle(gaze(0, 10, 10))) == "no_layout");
    CHECK(s.closed());
  }
  SUBCASE("time going backwards") {
    GatewaySession s(model(), options());
    s.handle(hello());
    s.handle(layout_msg());
    s.handle(gaze(5, 10, 10));
    CHECK(code_of(s.handle(gaze(5, 10, 10))) == "out_of_order");
    CHECK(s.closed());
  }
}

TEST_CASE("malformed messages keep the session open") {
  GatewaySession s(model(), options());
  s.handle(hello());
  for (const std::string bad : {"{nope", "[1,2]", R"({"type":"WIGGLE"})", R"({"type":"GAZE","t":1.5,"x":1,"y":2})",
                                R"({"type":"PAGE_LAYOUT"})"}) {
    const auto r = parse(s.handle(bad));
    REQUIRE(r.size() == 1);
    CHECK(r[0]["code"] == "bad_message");
    CHECK_FALSE(s.closed());
  }
  const auto r = parse(s.handle(R"({"type":"PAGE_LAYOUT","layout":{"screen":[0,0],"links":[]}})"));
  CHECK(r[0]["code"] == "bad_layout");
  CHECK_FALSE(s.closed());
  CHECK(parse(s.handle(layout_msg()))[0]["of"] == "PAGE_LAYOUT");
}

TEST_CASE("reset and cancel") {
  GatewaySession s(model(), options());
  const auto msgs = scripted_messages();
  for (size_t i = 0; i < 2 + 40 + 24; ++i) s.handle(msgs[i]);
  CHECK(s.engine().phase() == Phase::Selecting);

  SUBCASE("reset returns to browsing") {
    CHECK(parse(s.handle(R"({"type":"RESET"})"))[0] == json{{"type", "ACK"}, {"of", "RESET"}});
    CHECK(s.engine().phase() == Phase::Browsing);
  }
  SUBCASE("cancel reports what it cancelled") {
    const auto r = parse(s.handle(R"({"type":"CANCEL"})"))[0];
    CHECK(r["of"] == "CANCEL");
    CHECK(r["cancelled"] == true);
    CHECK(s.engine().phase() == Phase::Browsing);
    CHECK(parse(s.handle(R"({"type":"CANCEL"})"))[0]["cancelled"] == false);
  }
}

TEST_CASE("transcripts replay identically") {
  const auto msgs = scripted_messages();
  const auto a = replay_transcript(model(), options(), msgs);
  const auto b = replay_transcript(model(), options(), msgs);
  CHECK(a == b);
  CHECK(a.size() == msgs.size());

  // Two sessions fed alternately do not see each other.
  GatewaySession s1(model(), options()), s2(model(), options());
  std::vector<std::vector<std::string>> r1, r2;
  for (const auto& m : msgs) {
    r1.push_back(s1.handle(m));
    r2.push_back(s2.handle(m));
  }
  CHECK(r1 == a);
  CHECK(r2 == a);
}

TEST_CASE("tcp round trip") {
  GatewayServer server(model(), options());
  const uint16_t port = server.listen(0);
  REQUIRE(port != 0);
  server.start();

  const auto msgs = scripted_messages();
  const auto want = replay_transcript(model(), options(), msgs);
  size_t expected = 0;
  for (const auto& r : want) expected += r.size();

  {
    GatewayClient c1("127.0.0.1", port), c2("127.0.0.1", port);
    for (const auto& m : msgs) {
      c1.send(m);
      c2.send(m);
    }
    for (auto* c : {&c1, &c2}) {
      std::vector<std::string> got;
      while (got.size() < expected) {
        auto f = c->receive();
        REQUIRE(f.has_value());
        got.push_back(*f);
      }
      std::vector<std::string> flat;
      for (const auto& r : want) flat.insert(flat.end(), r.begin(), r.end());
      CHECK(got == flat);
    }
  }
  {
    GatewayClient bad("127.0.0.1", port);
    bad.send(R"({"type":"HELLO","protocol_version":"nope"})");
    const auto f = bad.receive();
    REQUIRE(f.has_value());
    CHECK(json::parse(*f)["code"] == "unsupported_version");
    CHECK_FALSE(bad.receive().has_value());
  }
  server.stop();
}
