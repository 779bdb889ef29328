#include <gtest/gtest.h>

#include <cstdlib>
#include <mutex>

#include <json.hpp>

#include "test_support.hpp"
#include "tsdistill/annotation_client.hpp"
#include "tsdistill/errors.hpp"
#include "tsdistill/ou_generator.hpp"
#include "tsdistill/plot_render.hpp"

using namespace tsdistill;
using nlohmann::json;

namespace {

const char* kValid = R"({"trend": "The series is increasing.", "noise": "Noise is low.", "extrema": "Maximum at the end, minimum at the beginning."})";

std::string chat_reply(const std::string& content) {
  return json{{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}})}}.dump();
}

/// Records requests and answers each from a scripted list (last entry repeats).
struct ScriptedAnnotator {
  struct Reply {
    int status;
    std::string body;
  };

  std::mutex mu;
  std::vector<Reply> script;
  std::vector<json> requests;
  std::vector<std::string> auth_headers;
  testkit::StubServer stub;

  explicit ScriptedAnnotator(std::vector<Reply> s) : script(std::move(s)) {
    stub.server().Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu);
      requests.push_back(json::parse(req.body));
      auth_headers.push_back(req.get_header_value("Authorization"));
      const auto& r = script[std::min(requests.size() - 1, script.size() - 1)];
      res.status = r.status;
      res.set_content(r.body, "application/json");
    });
    stub.start();
  }

  std::size_t count() {
    std::lock_guard lock(mu);
    return requests.size();
  }
};

class AnnotationClientTest : public ::testing::Test {
 protected:
  void SetUp() override {
    render_plot(generate_series({0.1, 5.0, 1.0, 100, 1}).values, image());
    ::setenv("TSD_TEST_KEY", "sk-test-123", 1);
  }
  void TearDown() override { ::unsetenv("TSD_TEST_KEY"); }

  std::filesystem::path image() const { return tmp_ / "plot.png"; }

  AnnotatorConfig config_for(const ScriptedAnnotator& s) const {
    AnnotatorConfig cfg;
    cfg.endpoint = s.stub.url("/v1/chat/completions");
    cfg.model = "test-model";
    cfg.api_key_env = "TSD_TEST_KEY";
    cfg.backoff_ms = 1;
    cfg.timeout_s = 5;
    return cfg;
  }

  testkit::TempDir tmp_;
};

}  // namespace

TEST_F(AnnotationClientTest, HappyPathRequestShape) {
  ScriptedAnnotator s({{200, chat_reply(kValid)}});
  AnnotationClient client(config_for(s));
  const auto r = client.annotate(image());
  EXPECT_EQ(r.attempts, 1);
  EXPECT_EQ(r.annotation.trend, "The series is increasing.");
  EXPECT_EQ(r.annotation.source, AnnotationSource::llm);

  ASSERT_EQ(s.requests.size(), 1u);
  const json& req = s.requests[0];
  EXPECT_EQ(req["model"], "test-model");
  EXPECT_EQ(req["temperature"], 0.0);
  const json& content = req["messages"][0]["content"];
  EXPECT_EQ(req["messages"][0]["role"], "user");
  EXPECT_EQ(content[0]["type"], "text");
  EXPECT_EQ(content[0]["text"], build_prompt());
  EXPECT_EQ(content[1]["type"], "image_url");
  const auto png = testkit::read_file(image());
  EXPECT_EQ(content[1]["image_url"]["url"],
            "data:image/png;base64," +
                base64_encode(std::span(reinterpret_cast<const unsigned char*>(png.data()), png.size())));

  EXPECT_EQ(s.auth_headers[0], "Bearer sk-test-123");
  EXPECT_EQ(req.dump().find("sk-test-123"), std::string::npos);
}

TEST_F(AnnotationClientTest, DigitsOnlyWhenEnabled) {
  ScriptedAnnotator s({{200, chat_reply(kValid)}});
  auto cfg = config_for(s);
  AnnotationClient plain(cfg);
  plain.annotate(image(), "0 1 , 0 2");
  cfg.include_digits = true;
  AnnotationClient with_digits(cfg);
  with_digits.annotate(image(), "0 1 , 0 2");
  ASSERT_EQ(s.requests.size(), 2u);
  const std::string t0 = s.requests[0]["messages"][0]["content"][0]["text"];
  const std::string t1 = s.requests[1]["messages"][0]["content"][0]["text"];
  EXPECT_EQ(t0.find("0 1 , 0 2"), std::string::npos);
  EXPECT_NE(t1.find("0 1 , 0 2"), std::string::npos);
}

TEST_F(AnnotationClientTest, ContentAsTypedParts) {
  const json body{{"choices", json::array({{{"message",
                                             {{"content", json::array({{{"type", "text"}, {"text", kValid}}})}}}}})}};
  ScriptedAnnotator s({{200, body.dump()}});
  AnnotationClient client(config_for(s));
  EXPECT_EQ(client.annotate(image()).annotation.noise, "Noise is low.");
}

TEST_F(AnnotationClientTest, MalformedReplyRetriedWithCorrection) {
  ScriptedAnnotator s({{200, chat_reply("The series goes up.")}, {200, chat_reply(kValid)}});
  AnnotationClient client(config_for(s));
  const auto r = client.annotate(image());
  EXPECT_EQ(r.attempts, 2);
  ASSERT_EQ(s.requests.size(), 2u);
  const json& msgs = s.requests[1]["messages"];
  ASSERT_EQ(msgs.size(), 3u);
  EXPECT_EQ(msgs[1]["role"], "assistant");
  EXPECT_EQ(msgs[1]["content"], "The series goes up.");
  EXPECT_EQ(msgs[2]["role"], "user");
}

TEST_F(AnnotationClientTest, FormatRetriesExhausted) {
  ScriptedAnnotator s({{200, chat_reply(R"({"trend": "up"})")}});
  auto cfg = config_for(s);
  cfg.max_retries = 2;
  AnnotationClient client(cfg);
  try {
    client.annotate(image());
    FAIL() << "expected AnnotationFormatError";
  } catch (const AnnotationFormatError& e) {
    EXPECT_EQ(e.last_reply(), R"({"trend": "up"})");
    EXPECT_EQ(exit_code_for(e), 3);
  }
  EXPECT_EQ(s.count(), 3u);
}

TEST_F(AnnotationClientTest, AuthFailureIsImmediate) {
  ScriptedAnnotator s({{401, R"({"error": "bad key"})"}});
  AnnotationClient client(config_for(s));
  try {
    client.annotate(image());
    FAIL() << "expected TransportError";
  } catch (const TransportError& e) {
    EXPECT_EQ(e.http_status(), 401);
    EXPECT_NE(std::string(e.what()).find("TSD_TEST_KEY"), std::string::npos);
  }
  EXPECT_EQ(s.count(), 1u);
}

TEST_F(AnnotationClientTest, ServerErrorsBackOffThenSucceed) {
  ScriptedAnnotator s({{503, "{}"}, {429, "{}"}, {200, chat_reply(kValid)}});
  AnnotationClient client(config_for(s));
  const auto r = client.annotate(image());
  EXPECT_EQ(r.attempts, 1);
  EXPECT_EQ(s.count(), 3u);
}

TEST_F(AnnotationClientTest, PersistentThrottlingGivesUp) {
  ScriptedAnnotator s({{429, "{}"}});
  auto cfg = config_for(s);
  cfg.max_retries = 2;
  AnnotationClient client(cfg);
  try {
    client.annotate(image());
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_EQ(e.http_status(), 429);
  }
  EXPECT_EQ(s.count(), 3u);
}

TEST_F(AnnotationClientTest, OtherClientErrorsAreNotRetried) {
  ScriptedAnnotator s({{404, "{}"}});
  AnnotationClient client(config_for(s));
  EXPECT_THROW(client.annotate(image()), TransportError);
  EXPECT_EQ(s.count(), 1u);
}

TEST_F(AnnotationClientTest, UnreachableEndpoint) {
  AnnotatorConfig cfg;
  cfg.endpoint = "http://127.0.0.1:" + std::to_string(testkit::unused_port()) + "/v1/chat/completions";
  cfg.max_retries = 1;
  cfg.backoff_ms = 1;
  cfg.timeout_s = 2;
  AnnotationClient client(cfg);
  try {
    client.annotate(image());
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_EQ(e.http_status(), 0);
    EXPECT_EQ(exit_code_for(e), 2);
  }
}

TEST_F(AnnotationClientTest, BoundsConcurrentRequests) {
  std::mutex mu;
  int in_flight = 0, peak = 0;
  testkit::StubServer stub;
  stub.server().new_task_queue = [] { return new httplib::ThreadPool(8); };
  stub.server().Post("/c", [&](const httplib::Request&, httplib::Response& res) {
    {
      std::lock_guard lock(mu);
      peak = std::max(peak, ++in_flight);
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(30));
    {
      std::lock_guard lock(mu);
      --in_flight;
    }
    res.set_content(chat_reply(kValid), "application/json");
  });
  stub.start();

  AnnotatorConfig cfg;
  cfg.endpoint = stub.url("/c");
  cfg.max_in_flight = 2;
  AnnotationClient client(cfg);
  std::vector<std::thread> threads;
  for (int i = 0; i < 6; ++i) threads.emplace_back([&] { client.annotate(image()); });
  for (auto& t : threads) t.join();
  EXPECT_LE(peak, 2);
  EXPECT_GE(peak, 1);
}

TEST_F(AnnotationClientTest, MissingImageIsFileError) {
  AnnotatorConfig cfg;
  cfg.endpoint = "http://127.0.0.1:9/x";
  AnnotationClient client(cfg);
  EXPECT_THROW(client.annotate(tmp_ / "missing.png"), FileError);
}

TEST(AnnotatorConfig, Validation) {
  AnnotatorConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.max_in_flight = 0;
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = {};
  cfg.endpoint = "ftp://x";
  EXPECT_THROW(cfg.validate(), ValidationError);
  cfg = {};
  cfg.timeout_s = 0;
  EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(Base64, KnownVectors) {
  auto enc = [](std::string_view s) {
    return base64_encode(std::span(reinterpret_cast<const unsigned char*>(s.data()), s.size()));
  };
  EXPECT_EQ(enc(""), "");
  EXPECT_EQ(enc("f"), "Zg==");
  EXPECT_EQ(enc("fo"), "Zm8=");
  EXPECT_EQ(enc("foo"), "Zm9v");
  EXPECT_EQ(enc("foobar"), "Zm9vYmFy");
}

TEST(MockAnnotate, EqualsOracleSentences) {
  const auto x = generate_series({0.1, 5.0, 1.0, 100, 1}).values;
  EXPECT_EQ(mock_annotate(x), render_fact_sentences(compute_labels(x)));
}

TEST(BuildPrompt, AsksForThreeKeyJson) {
  const auto& p = build_prompt();
  for (const char* key : {"\"trend\"", "\"noise\"", "\"extrema\""}) EXPECT_NE(p.find(key), std::string::npos);
  EXPECT_NE(p.find("increasing/decreasing/flat"), std::string::npos);
  EXPECT_NE(p.find("low/medium/high"), std::string::npos);
}
