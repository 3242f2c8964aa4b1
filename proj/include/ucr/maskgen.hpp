#pragma once

#include "ucr/freeze_mask.hpp"
#include "ucr/instance.hpp"
#include "ucr/restriction.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ucr {

/// Indices of the `count` history days nearest to the instance's total-load
/// profile, nearest first, ties by index. Throws DimensionError on a shape
/// mismatch.
std::vector<std::size_t> nearest_days(const UcInstance& inst, const HistoryBank& history, std::size_t count);

/// Cells on which every listed schedule agrees, kept per hour up to k_cap in
/// order of descending p_max, then ascending generator id.
FreezeMask consensus_mask(const UcInstance& inst, const HistoryBank& history, const std::vector<std::size_t>& days,
                          int k_cap);

/// Unanimity over the H most load-similar days.
FreezeMask stability_mask(const UcInstance& inst, const HistoryBank& history, int H, int k_cap);

/// Same transfer rule over the k nearest days; requires k <= history size.
FreezeMask knn_mask(const UcInstance& inst, const HistoryBank& history, int k_neighbors, int k_cap);

/// Lloyd's algorithm on total-load profiles (k-means++ seeding, at most 100
/// iterations, empty clusters reseeded at the farthest point), then
/// unanimity within the cluster whose centroid is nearest the target.
/// n_clusters = 0 selects ⌈√|history|⌉.
FreezeMask kmeans_mask(const UcInstance& inst, const HistoryBank& history, int n_clusters, int k_cap,
                       std::uint64_t seed);

/// Cluster labels and centroids, exposed for testing.
struct KMeansResult {
    std::vector<int> labels;
    std::vector<std::vector<double>> centroids;
    int iterations = 0;
};
KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k, std::uint64_t seed);

/// ⌊ratio·|G|·T⌋ distinct cells drawn uniformly, each frozen to a uniform
/// state, with at most ⌈ratio·|G|⌉ cells per hour.
FreezeMask random_mask(const UcInstance& inst, double ratio, std::uint64_t seed);

/// Cells drawn as in random_mask but frozen to the given schedule's values.
FreezeMask fix_at_optimum_mask(const UcInstance& inst, const DailySchedule& optimum, double ratio,
                               std::uint64_t seed);

// ---------------------------------------------------------------------------
// Language-model client

struct PromptDocument {
    std::string task;
    std::string input_data;
    std::string output_format;
    std::string guidelines;

    std::string text() const;
};

/// Four-section prompt. Generator data is limited to p_min, p_max, minimum
/// up/down times and initial status; reference days are included only when
/// `history` is non-empty.
PromptDocument build_llm_prompt(const UcInstance& inst, const HistoryBank& history, int H, int k_cap);

/// parse_mask_tuples under another name: the reply must be the bare array.
FreezeMask parse_llm_response(std::string_view text, const UcInstance& inst, int k_cap);

struct ChatMessage {
    std::string role;
    std::string content;
};

struct LlmEndpointConfig {
    std::string url;      // e.g. http://127.0.0.1:8080/v1/chat/completions
    std::string model;
    std::string token;    // sent as a bearer token when non-empty
    double timeout_s = 60.0;
    int max_retries = 1;  // re-asks after a malformed reply
};

/// Environment variable holding the bearer token.
inline constexpr const char* kLlmTokenEnv = "UCR_LLM_TOKEN";

/// Reads {"url", "model", "timeout_s", "max_retries"} from a JSON file; the
/// token comes from kLlmTokenEnv. Throws ParseError/SchemaError.
LlmEndpointConfig load_llm_config(const std::string& path);

/// Network, HTTP or protocol failure talking to the endpoint.
class TransportError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ChatTransport {
public:
    virtual ~ChatTransport() = default;
    /// Returns the assistant message content. Throws TransportError.
    virtual std::string complete(const std::vector<ChatMessage>& messages, const LlmEndpointConfig& config) = 0;
};

/// JSON chat-completion request over HTTP(S):
///   {"model": ..., "messages": [{"role": "user", "content": ...}], "temperature": 0}
/// and the reply text read from choices[0].message.content.
class HttpChatTransport : public ChatTransport {
public:
    std::string complete(const std::vector<ChatMessage>& messages, const LlmEndpointConfig& config) override;
};

std::string chat_request_body(const std::vector<ChatMessage>& messages, const std::string& model);
std::string chat_response_content(const std::string& body);

struct LlmOutcome {
    FreezeMask mask;
    std::string provenance;            // "llm" or "fallback"
    int requests = 0;
    std::vector<std::string> errors;   // one per rejected reply or failed request
    std::vector<ChatMessage> conversation;
};

/// Sends the prompt, re-asking with the parser's error after a malformed
/// reply. A transport failure, or too many malformed replies, yields the
/// stability mask (the empty mask without history) tagged "fallback".
LlmOutcome llm_generate(const UcInstance& inst, const HistoryBank& history, const LlmEndpointConfig& config,
                        ChatTransport& transport, int H, int k_cap);

// ---------------------------------------------------------------------------
// Generators behind one interface

class MaskGenerator {
public:
    virtual ~MaskGenerator() = default;
    virtual std::string name() const = 0;
    virtual FreezeMask generate(const UcInstance& inst, const HistoryBank& history) = 0;
    /// Default: give up on restriction and return the empty mask.
    virtual FreezeMask revise(const FreezeMask& previous, const Feedback& feedback);
    /// Origin of the most recent mask.
    virtual std::string provenance() const { return name(); }
    virtual bool needs_history() const { return false; }
};

struct MethodConfig {
    int H = 5;
    std::optional<int> k_cap;     // default ⌈0.1·|G|⌉
    int k_neighbors = 5;
    int n_clusters = 0;
    double ratio = 0.1;
    std::uint64_t seed = 0;
    std::optional<LlmEndpointConfig> llm;
    std::shared_ptr<ChatTransport> transport;  // default HttpChatTransport
    std::optional<DailySchedule> optimum;      // for fix-at-optimum
};

/// Known names: none, stability, knn, kmeans, random, fix-at-optimum, llm.
/// Throws SemanticError for an unknown name or a missing prerequisite.
std::unique_ptr<MaskGenerator> make_generator(const std::string& name, const MethodConfig& config);

const std::vector<std::string>& generator_names();

}  // namespace ucr
