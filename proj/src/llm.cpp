#include "vscreen/llm.hpp"

#include <cctype>
#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "httplib.h"
#include "json.hpp"

namespace vscreen {

std::string PromptTemplate::render(
    const std::map<std::string, std::string>& attrs) const {
  std::string out;
  out.reserve(user_template.size());
  std::size_t pos = 0;
  while (pos < user_template.size()) {
    const std::size_t open = user_template.find('{', pos);
    if (open == std::string::npos) {
      out.append(user_template, pos, std::string::npos);
      break;
    }
    const std::size_t close = user_template.find('}', open);
    if (close == std::string::npos)
      throw std::invalid_argument("unterminated placeholder in template");
    out.append(user_template, pos, open - pos);
    const std::string name = user_template.substr(open + 1, close - open - 1);
    auto it = attrs.find(name);
    if (it == attrs.end())
      throw std::invalid_argument("no value for placeholder: " + name);
    out.append(it->second);
    pos = close + 1;
  }
  return out;
}

std::uint64_t PromptTemplate::token_estimate(
    const std::map<std::string, std::string>& attrs) const {
  const std::string rendered = render(attrs);
  return (system_message.size() + rendered.size()) / 4;
}

PromptTemplate wtp_survey_template(
    const std::vector<std::string>& attribute_names) {
  if (attribute_names.empty())
    throw std::invalid_argument("survey template needs attributes");
  PromptTemplate t;
  t.system_message =
      "You are a customer. You are selected at random while shopping for "
      "laptops to participate in a survey.";
  t.attribute_names = attribute_names;
  std::string spec;
  for (std::size_t i = 0; i < attribute_names.size(); ++i) {
    if (i > 0)
      spec += (i + 1 == attribute_names.size()) ? " and " : ", ";
    spec += "{" + attribute_names[i] + "} " + attribute_names[i];
  }
  t.user_template =
      "The customer is asked: What is the maximum price you would be willing "
      "to pay for a Lenovo laptop with " +
      spec + "? Please give a single price in numbers (no descriptions).";
  return t;
}

std::uint32_t AlternativeCatalog::size() const {
  std::uint32_t n = 1;
  for (const auto& values : attribute_values)
    n *= static_cast<std::uint32_t>(values.size());
  return n;
}

std::map<std::string, std::string> AlternativeCatalog::attributes(
    std::uint32_t index) const {
  if (index >= size())
    throw std::invalid_argument("catalog index out of range");
  std::map<std::string, std::string> out;
  std::uint32_t rem = index;
  for (std::size_t a = attribute_values.size(); a-- > 0;) {
    const auto& values = attribute_values[a];
    out[attribute_names[a]] = values[rem % values.size()];
    rem /= static_cast<std::uint32_t>(values.size());
  }
  return out;
}

AlternativeCatalog laptop_catalog(std::uint32_t k) {
  AlternativeCatalog c;
  const std::vector<std::string> cpu{"Intel Core i5", "Intel Core i7",
                                     "Intel Core i9", "AMD-R5", "AMD-R7",
                                     "AMD-R9"};
  c.attribute_names = {"CPU", "RAM", "Storage Drive"};
  if (k == 36) {
    c.attribute_values = {cpu, {"16 GB", "32 GB", "64 GB"},
                          {"256 GB", "512 GB"}};
    return c;
  }
  c.attribute_values = {cpu,
                        {"8 GB", "16 GB", "32 GB", "64 GB"},
                        {"256 GB", "512 GB", "1024 GB"}};
  c.attribute_names.push_back("GPU");
  c.attribute_values.push_back({"NVIDIA GeForce 20M", "NVIDIA GeForce 30M",
                                "NVIDIA GeForce 40M", "AMD Radeon 5000M",
                                "AMD Radeon 6000M"});
  if (k == 360) return c;
  c.attribute_names.push_back("Resolution");
  c.attribute_values.push_back(
      {"1080p Full HD", "1440p Quad HD", "4K Ultra HD"});
  if (k == 1080) return c;
  if (k == 3240) {
    c.attribute_names.push_back("Screen Size");
    c.attribute_values.push_back({"13.3 inch", "14 inch", "15.6 inch"});
    return c;
  }
  throw std::invalid_argument("no shipped catalog of size " +
                              std::to_string(k));
}

std::optional<double> extract_price(const std::string& text) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) continue;
    std::string num;
    bool seen_dot = false;
    for (std::size_t j = i; j < text.size(); ++j) {
      const char ch = text[j];
      if (std::isdigit(static_cast<unsigned char>(ch))) {
        num += ch;
      } else if (ch == ',') {
        continue;  // thousands separator
      } else if (ch == '.' && !seen_dot && j + 1 < text.size() &&
                 std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
        seen_dot = true;
        num += ch;
      } else {
        break;
      }
    }
    try {
      return std::stod(num);
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

namespace {

// One stateless query; empty optional on transport failure or a response
// the dialect parser cannot read.
std::optional<std::string> query_once(const LlmEndpointConfig& endpoint,
                                      const std::string& system_message,
                                      const std::string& user_message) {
  httplib::Client client(endpoint.base_url);
  client.set_connection_timeout(std::chrono::duration<double>(
      endpoint.timeout_seconds));
  client.set_read_timeout(std::chrono::duration<double>(
      endpoint.timeout_seconds));
  httplib::Headers headers;
  if (const char* key = std::getenv(endpoint.api_key_env.c_str()))
    headers.emplace("Authorization", std::string("Bearer ") + key);

  nlohmann::json body;
  std::string path;
  if (endpoint.dialect == "generate") {
    path = "/api/generate";
    body["model"] = endpoint.model;
    body["system"] = system_message;
    body["prompt"] = user_message;
    body["stream"] = false;
    body["options"] = {{"temperature", endpoint.temperature}};
  } else {
    path = "/v1/chat/completions";
    body["model"] = endpoint.model;
    body["temperature"] = endpoint.temperature;
    body["messages"] = nlohmann::json::array(
        {{{"role", "system"}, {"content", system_message}},
         {{"role", "user"}, {"content", user_message}}});
  }
  auto res = client.Post(path, headers, body.dump(), "application/json");
  if (!res || res->status != 200) return std::nullopt;
  try {
    const nlohmann::json reply = nlohmann::json::parse(res->body);
    if (endpoint.dialect == "generate")
      return reply.at("response").get<std::string>();
    return reply.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace

WtpObservation sample_wtp(const LlmEndpointConfig& endpoint,
                          const PromptTemplate& prompt,
                          const std::map<std::string, std::string>& attrs) {
  const std::string user_message = prompt.render(attrs);
  WtpObservation obs;
  for (std::uint32_t attempt = 0; attempt < endpoint.max_retries; ++attempt) {
    ++obs.attempts;
    const std::optional<std::string> reply =
        query_once(endpoint, prompt.system_message, user_message);
    if (!reply) continue;
    obs.raw_response = *reply;
    const std::optional<double> price = extract_price(*reply);
    if (!price) continue;
    if (*price > endpoint.discard_above) continue;  // implausible, redraw
    obs.value = *price;
    return obs;
  }
  throw std::runtime_error(
      "willingness-to-pay query failed after " +
      std::to_string(endpoint.max_retries) +
      " attempts; last response: " + obs.raw_response);
}

CollectReport collect_dataset(const LlmEndpointConfig& endpoint,
                              const AlternativeCatalog& catalog,
                              const PromptTemplate& prompt,
                              const CollectOptions& options) {
  const std::uint32_t k = catalog.size();
  if (k == 0) throw std::invalid_argument("empty catalog");
  if (options.per_alt == 0)
    throw std::invalid_argument("per_alt must be positive");
  if (options.out_path.empty())
    throw std::invalid_argument("collect needs an output path");

  std::vector<std::vector<double>> obs(k);
  if (std::filesystem::exists(options.out_path)) {
    EmpiricalDataset existing = load_empirical(options.out_path);
    if (existing.observations.size() > k)
      throw std::runtime_error(
          "existing dataset has more alternatives than the catalog");
    for (std::uint32_t i = 0; i < existing.observations.size(); ++i)
      obs[i] = std::move(existing.observations[i]);
  }

  CollectReport report;
  auto flush = [&](std::uint32_t complete_upto) {
    EmpiricalDataset snapshot;
    snapshot.observations.assign(obs.begin(), obs.begin() + complete_upto);
    snapshot.collection_date = "";
    save_empirical(snapshot, options.out_path);
  };

  for (std::uint32_t alt = 0; alt < k; ++alt) {
    if (obs[alt].size() >= options.per_alt) {
      ++report.skipped_complete;
      continue;
    }
    const std::map<std::string, std::string> attrs = catalog.attributes(alt);
    while (obs[alt].size() < options.per_alt) {
      WtpObservation o = sample_wtp(endpoint, prompt, attrs);
      report.queries_sent += o.attempts;
      ++report.observations;
      obs[alt].push_back(o.value);
    }
    flush(alt + 1);
  }
  return report;
}

double query_cost(std::uint64_t queries, double tokens_per_query,
                  double price_per_million_tokens) {
  return static_cast<double>(queries) * tokens_per_query *
         price_per_million_tokens / 1e6;
}

}  // namespace vscreen
