#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "vscreen/llm.hpp"

using namespace vscreen;

namespace {

// Scripted chat-completion server; replies are served in order and every
// request body is kept for inspection.
struct MockServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::vector<std::string> replies;
  std::atomic<std::size_t> cursor{0};
  std::vector<nlohmann::json> requests;
  std::vector<std::string> auth_headers;
  std::mutex mu;

  explicit MockServer(std::vector<std::string> scripted)
      : replies(std::move(scripted)) {
    server.Post("/v1/chat/completions",
                [this](const httplib::Request& req, httplib::Response& res) {
                  std::string reply;
                  {
                    std::lock_guard<std::mutex> lock(mu);
                    requests.push_back(nlohmann::json::parse(req.body));
                    auth_headers.push_back(req.get_header_value("Authorization"));
                    const std::size_t i =
                        std::min(cursor++, replies.size() - 1);
                    reply = replies[i];
                  }
                  nlohmann::json body;
                  body["choices"] = nlohmann::json::array(
                      {{{"message", {{"role", "assistant"},
                                     {"content", reply}}}}});
                  res.set_content(body.dump(), "application/json");
                });
    server.Post("/api/generate",
                [this](const httplib::Request& req, httplib::Response& res) {
                  std::string reply;
                  {
                    std::lock_guard<std::mutex> lock(mu);
                    requests.push_back(nlohmann::json::parse(req.body));
                    const std::size_t i =
                        std::min(cursor++, replies.size() - 1);
                    reply = replies[i];
                  }
                  nlohmann::json body;
                  body["response"] = reply;
                  res.set_content(body.dump(), "application/json");
                });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }

  ~MockServer() {
    server.stop();
    thread.join();
  }

  LlmEndpointConfig endpoint() const {
    LlmEndpointConfig e;
    e.base_url = "http://127.0.0.1:" + std::to_string(port);
    e.model = "mock-model";
    e.api_key_env = "VSCREEN_TEST_KEY";
    return e;
  }
};

AlternativeCatalog tiny_catalog() {
  AlternativeCatalog c;
  c.attribute_names = {"CPU", "RAM"};
  c.attribute_values = {{"a", "b", "c"}, {"x"}};
  return c;
}

}  // namespace

TEST_CASE("survey prompt renders byte for byte") {
  const AlternativeCatalog catalog = laptop_catalog(36);
  const PromptTemplate prompt = wtp_survey_template(catalog.attribute_names);
  const std::string rendered = prompt.render(catalog.attributes(0));
  CHECK(rendered ==
        "The customer is asked: What is the maximum price you would be "
        "willing to pay for a Lenovo laptop with Intel Core i5 CPU, 16 GB "
        "RAM and 256 GB Storage Drive? Please give a single price in "
        "numbers (no descriptions).");
  const std::uint64_t tokens = prompt.token_estimate(catalog.attributes(0));
  CHECK(tokens >= 70);
  CHECK(tokens <= 80);
  CHECK_THROWS_AS(prompt.render({{"CPU", "x"}}), std::invalid_argument);
}

TEST_CASE("catalog sizes and mixed-radix decoding") {
  CHECK(laptop_catalog(36).size() == 36);
  CHECK(laptop_catalog(360).size() == 360);
  CHECK(laptop_catalog(1080).size() == 1080);
  CHECK(laptop_catalog(3240).size() == 3240);
  CHECK_THROWS_AS(laptop_catalog(100), std::invalid_argument);

  const AlternativeCatalog c = laptop_catalog(36);
  // last attribute varies fastest
  CHECK(c.attributes(0).at("Storage Drive") == "256 GB");
  CHECK(c.attributes(1).at("Storage Drive") == "512 GB");
  CHECK(c.attributes(1).at("CPU") == "Intel Core i5");
  CHECK(c.attributes(35).at("CPU") == "AMD-R9");
  CHECK_THROWS_AS(c.attributes(36), std::invalid_argument);
}

TEST_CASE("price extraction tolerates currency formatting and prose") {
  CHECK(extract_price("$1,200.50") == 1200.50);
  CHECK(extract_price("I would pay 950 dollars.") == 950.0);
  CHECK(extract_price("about $2,000") == 2000.0);
  CHECK(extract_price("1500") == 1500.0);
  CHECK(extract_price("price: 799.99 USD") == 799.99);
  CHECK_FALSE(extract_price("no idea").has_value());
  CHECK_FALSE(extract_price("").has_value());
}

TEST_CASE("query cost arithmetic") {
  CHECK(query_cost(1296000, 80.0, 0.6) == doctest::Approx(62.208));
  CHECK(std::abs(query_cost(1296000, 80.0, 0.6) - 62.4) < 0.5);
  CHECK(query_cost(0, 80.0, 0.6) == 0.0);
}

TEST_CASE("each query is a fresh two-message chat") {
  MockServer server({"$1500"});
  const PromptTemplate prompt = wtp_survey_template({"CPU", "RAM"});
  const std::map<std::string, std::string> attrs{{"CPU", "a"}, {"RAM", "x"}};

  for (int i = 0; i < 3; ++i) {
    const WtpObservation obs = sample_wtp(server.endpoint(), prompt, attrs);
    CHECK(obs.value == 1500.0);
    CHECK(obs.attempts == 1);
  }
  REQUIRE(server.requests.size() == 3);
  for (const auto& req : server.requests) {
    REQUIRE(req.at("messages").size() == 2);  // no conversation history
    CHECK(req.at("messages").at(0).at("role") == "system");
    CHECK(req.at("messages").at(1).at("role") == "user");
    CHECK(req.at("model") == "mock-model");
  }
  // no API key in the environment, so no Authorization header
  for (const auto& h : server.auth_headers) CHECK(h.empty());
}

TEST_CASE("api key from the environment becomes a bearer header") {
  MockServer server({"42"});
  setenv("VSCREEN_TEST_KEY", "sk-test-123", 1);
  const PromptTemplate prompt = wtp_survey_template({"CPU"});
  sample_wtp(server.endpoint(), prompt, {{"CPU", "a"}});
  unsetenv("VSCREEN_TEST_KEY");
  REQUIRE(server.auth_headers.size() == 1);
  CHECK(server.auth_headers[0] == "Bearer sk-test-123");
}

TEST_CASE("implausible answers are redrawn") {
  MockServer server({"7000", "1500"});
  const PromptTemplate prompt = wtp_survey_template({"CPU"});
  const WtpObservation obs =
      sample_wtp(server.endpoint(), prompt, {{"CPU", "a"}});
  CHECK(obs.value == 1500.0);
  CHECK(obs.attempts == 2);  // the discarded answer still costs a query
}

TEST_CASE("retries exhaust with the last raw response attached") {
  MockServer server({"no price here"});
  const PromptTemplate prompt = wtp_survey_template({"CPU"});
  try {
    sample_wtp(server.endpoint(), prompt, {{"CPU", "a"}});
    FAIL("expected exhaustion");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("no price here") != std::string::npos);
  }
  CHECK(server.requests.size() == 5);  // default max_retries
}

TEST_CASE("generate dialect posts to the completion endpoint") {
  MockServer server({"880"});
  LlmEndpointConfig endpoint = server.endpoint();
  endpoint.dialect = "generate";
  const PromptTemplate prompt = wtp_survey_template({"CPU"});
  const WtpObservation obs = sample_wtp(endpoint, prompt, {{"CPU", "a"}});
  CHECK(obs.value == 880.0);
  REQUIRE(server.requests.size() == 1);
  CHECK(server.requests[0].contains("prompt"));
  CHECK(server.requests[0].at("stream") == false);
}

TEST_CASE("dataset collection completes and resumes idempotently") {
  const std::string path = "/tmp/vscreen-test-collect.jsonl";
  std::remove(path.c_str());
  MockServer server({"100"});
  const AlternativeCatalog catalog = tiny_catalog();
  const PromptTemplate prompt = wtp_survey_template(catalog.attribute_names);
  CollectOptions options;
  options.per_alt = 2;
  options.out_path = path;

  const CollectReport first =
      collect_dataset(server.endpoint(), catalog, prompt, options);
  CHECK(first.observations == 6);
  CHECK(first.queries_sent == 6);
  CHECK(first.skipped_complete == 0);
  const EmpiricalDataset data = load_empirical(path);
  REQUIRE(data.observations.size() == 3);
  for (const auto& obs : data.observations)
    CHECK(obs == std::vector<double>{100.0, 100.0});

  // a second run touches nothing
  const CollectReport again =
      collect_dataset(server.endpoint(), catalog, prompt, options);
  CHECK(again.observations == 0);
  CHECK(again.queries_sent == 0);
  CHECK(again.skipped_complete == 3);

  // partial file: the complete alternative is skipped, the rest top up
  {
    EmpiricalDataset partial;
    partial.observations = {{100.0, 100.0}, {100.0}};
    save_empirical(partial, path);
  }
  const CollectReport resumed =
      collect_dataset(server.endpoint(), catalog, prompt, options);
  CHECK(resumed.skipped_complete == 1);
  CHECK(resumed.observations == 3);  // one top-up plus a fresh alternative
  CHECK(load_empirical(path).observations.size() == 3);
  std::remove(path.c_str());
}
