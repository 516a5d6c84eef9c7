// Remote language-model evaluation of design alternatives: prompt
// templates over attribute catalogs, a stateless chat client that turns
// each query into one willingness-to-pay observation, resumable dataset
// collection, and query-cost arithmetic.
//
// API keys are read from an environment variable at request time and are
// never written to run files or datasets.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vscreen/evaluators.hpp"

namespace vscreen {

struct PromptTemplate {
  std::string system_message;
  std::string user_template;  // placeholders written {Attribute Name}
  std::vector<std::string> attribute_names;

  // Throws std::invalid_argument naming the first unfilled placeholder.
  std::string render(const std::map<std::string, std::string>& attrs) const;
  // Rough size of one query in tokens: characters of system + rendered
  // user text divided by 4.
  std::uint64_t token_estimate(
      const std::map<std::string, std::string>& attrs) const;
};

// Survey prompt asking for a single maximum price for a laptop described
// by the given attributes, in catalog order.
PromptTemplate wtp_survey_template(
    const std::vector<std::string>& attribute_names);

struct AlternativeCatalog {
  std::vector<std::string> attribute_names;
  std::vector<std::vector<std::string>> attribute_values;  // per attribute

  std::uint32_t size() const;
  // Mixed-radix decode; last attribute varies fastest.
  std::map<std::string, std::string> attributes(std::uint32_t index) const;
};

// The shipped laptop catalogs; valid sizes are 36, 360, 1080 and 3240.
AlternativeCatalog laptop_catalog(std::uint32_t k);

struct LlmEndpointConfig {
  std::string base_url;          // e.g. http://localhost:11434
  std::string model;
  double temperature = 1.0;
  std::string dialect = "chat";  // "chat" (OpenAI-style) or "generate" (Ollama)
  std::string api_key_env = "VSCREEN_API_KEY";
  std::uint32_t max_retries = 5;  // per observation, over transport and
                                  // parse failures alike
  double discard_above = 6000.0;  // implausible answers are redrawn
  double timeout_seconds = 60.0;
};

// First number in the text, tolerating $, commas and surrounding prose.
std::optional<double> extract_price(const std::string& text);

struct WtpObservation {
  double value = 0.0;
  std::uint32_t attempts = 0;  // queries spent, including discarded ones
  std::string raw_response;    // last model output
};

// One observation for one alternative.  Every attempt is a fresh stateless
// chat (no history).  Throws std::runtime_error carrying the last raw
// response once max_retries attempts have failed or been discarded.
WtpObservation sample_wtp(const LlmEndpointConfig& endpoint,
                          const PromptTemplate& prompt,
                          const std::map<std::string, std::string>& attrs);

struct CollectOptions {
  std::uint64_t per_alt = 1;  // observations per alternative
  std::string out_path;
};

struct CollectReport {
  std::uint64_t queries_sent = 0;    // includes retries and discards
  std::uint64_t observations = 0;    // new observations stored this call
  std::uint64_t skipped_complete = 0;  // alternatives already done on resume
};

// Fills out_path (dataset format of load_empirical) until every catalog
// alternative has per_alt observations.  Rerunning after an interruption
// resumes: complete alternatives are skipped, partial ones are topped up,
// and the file is replaced atomically after each alternative completes.
CollectReport collect_dataset(const LlmEndpointConfig& endpoint,
                              const AlternativeCatalog& catalog,
                              const PromptTemplate& prompt,
                              const CollectOptions& options);

// queries * tokens_per_query * price_per_million_tokens / 1e6
double query_cost(std::uint64_t queries, double tokens_per_query,
                  double price_per_million_tokens);

}  // namespace vscreen
