#include "ucr/error.hpp"
#include "ucr/maskgen.hpp"

#ifdef UCR_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ucr {

using nlohmann::json;

std::string PromptDocument::text() const {
    std::ostringstream os;
    os << "## Task\n" << task << "\n\n## Input Data\n" << input_data << "\n\n## Output Format\n" << output_format
       << "\n\n## Restriction Guidelines\n" << guidelines << "\n";
    return os.str();
}

PromptDocument build_llm_prompt(const UcInstance& inst, const HistoryBank& history, int H, int k_cap) {
    PromptDocument doc;
    doc.task =
        "You support a unit commitment solver for a " + std::to_string(inst.horizon) +
        "-hour day. From the data below, pick individual on/off decisions that you expect the cost-optimal "
        "schedule to contain. The solver will hold your picks fixed and optimize every other decision itself.";

    json gens = json::object();
    for (const auto& g : inst.generators)
        gens[g.id] = {{"p_min_mw", g.p_min},
                      {"p_max_mw", g.p_max},
                      {"min_up_h", g.ut},
                      {"min_down_h", g.dt},
                      {"initial_status", g.u0}};
    std::ostringstream in;
    in << "Generators:\n" << gens.dump() << "\n\nTarget day, total demand per hour (MW):\n"
       << json(inst.total_demand_profile()).dump();
    if (!history.empty() && H > 0) {
        const auto days = nearest_days(inst, history, static_cast<std::size_t>(H));
        in << "\n\nReference days with similar demand, closest first:";
        for (std::size_t i = 0; i < days.size(); ++i) {
            const auto& d = history.days[days[i]];
            json commit = json::object();
            for (std::size_t g = 0; g < inst.generators.size(); ++g) commit[inst.generators[g].id] = d.schedule.u[g];
            in << "\nDay " << i + 1 << ": " << json{{"demand_mw", d.demand}, {"commitment", commit}}.dump();
        }
    }
    doc.input_data = in.str();

    doc.output_format =
        "A JSON array of [t, g, u] triples, where t is an hour from 1 to " + std::to_string(inst.horizon) +
        ", g is a generator id from the table above and u is 1 for on or 0 for off. "
        "Reply with the array alone. No explanatory text, no code fences.";

    doc.guidelines = "1. Fix at most " + std::to_string(k_cap) +
                     " units in any single hour.\n"
                     "2. Only include decisions you are highly confident in; leave the rest out.\n"
                     "3. Do not produce a complete schedule; undecided commitments are left to the solver.";
    return doc;
}

FreezeMask parse_llm_response(std::string_view text, const UcInstance& inst, int k_cap) {
    return parse_mask_tuples(text, inst, k_cap);
}

LlmEndpointConfig load_llm_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open LLM endpoint config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    json doc;
    try {
        doc = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ParseError("LLM endpoint config '" + path + "': " + e.what());
    }
    if (!doc.is_object()) throw SchemaError("LLM endpoint config must be a JSON object");
    LlmEndpointConfig cfg;
    for (const auto& [key, value] : doc.items()) {
        if (key == "url" && value.is_string()) cfg.url = value.get<std::string>();
        else if (key == "model" && value.is_string()) cfg.model = value.get<std::string>();
        else if (key == "timeout_s" && value.is_number() && value.get<double>() > 0) cfg.timeout_s = value.get<double>();
        else if (key == "max_retries" && value.is_number_integer() && value.get<int>() >= 0) cfg.max_retries = value.get<int>();
        else throw SchemaError("LLM endpoint config: unknown or invalid field '" + key + "'");
    }
    if (cfg.url.empty()) throw SchemaError("LLM endpoint config: missing field 'url'");
    if (cfg.model.empty()) throw SchemaError("LLM endpoint config: missing field 'model'");
    if (const char* tok = std::getenv(kLlmTokenEnv)) cfg.token = tok;
    return cfg;
}

std::string chat_request_body(const std::vector<ChatMessage>& messages, const std::string& model) {
    json msgs = json::array();
    for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    return json{{"model", model}, {"messages", msgs}, {"temperature", 0}}.dump();
}

std::string chat_response_content(const std::string& body) {
    try {
        const auto doc = json::parse(body);
        return doc.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw TransportError(std::string("malformed chat response: ") + e.what());
    }
}

std::string HttpChatTransport::complete(const std::vector<ChatMessage>& messages, const LlmEndpointConfig& config) {
    // scheme://host[:port]/path
    const auto scheme_end = config.url.find("://");
    if (scheme_end == std::string::npos) throw TransportError("endpoint url lacks a scheme: " + config.url);
    const auto path_start = config.url.find('/', scheme_end + 3);
    const std::string origin = config.url.substr(0, path_start);
    const std::string path = path_start == std::string::npos ? "/" : config.url.substr(path_start);

    httplib::Client client(origin);
    if (!client.is_valid()) throw TransportError("unsupported endpoint url: " + config.url);
    const auto secs = static_cast<time_t>(config.timeout_s);
    const auto usecs = static_cast<time_t>((config.timeout_s - static_cast<double>(secs)) * 1e6);
    client.set_connection_timeout(secs, usecs);
    client.set_read_timeout(secs, usecs);
    client.set_write_timeout(secs, usecs);

    httplib::Headers headers;
    if (!config.token.empty()) headers.emplace("Authorization", "Bearer " + config.token);
    const auto res = client.Post(path, headers, chat_request_body(messages, config.model), "application/json");
    if (!res) throw TransportError("request to " + config.url + " failed: " + httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
        throw TransportError("endpoint returned HTTP " + std::to_string(res->status));
    return chat_response_content(res->body);
}

namespace {

FreezeMask fallback_mask(const UcInstance& inst, const HistoryBank& history, int H, int k_cap) {
    if (history.empty()) return FreezeMask({}, k_cap);
    return stability_mask(inst, history, H, k_cap);
}

}  // namespace

LlmOutcome llm_generate(const UcInstance& inst, const HistoryBank& history, const LlmEndpointConfig& config,
                        ChatTransport& transport, int H, int k_cap) {
    LlmOutcome out;
    out.conversation.push_back({"user", build_llm_prompt(inst, history, H, k_cap).text()});
    for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
        std::string reply;
        try {
            ++out.requests;
            reply = transport.complete(out.conversation, config);
        } catch (const TransportError& e) {
            out.errors.push_back(e.what());
            break;
        }
        out.conversation.push_back({"assistant", reply});
        try {
            out.mask = parse_llm_response(reply, inst, k_cap);
            out.provenance = "llm";
            return out;
        } catch (const Error& e) {
            out.errors.push_back(e.what());
            out.conversation.push_back(
                {"user", std::string("Your reply was rejected: ") + e.what() +
                             ". Answer again with only the JSON array described in the Output Format section."});
        }
    }
    out.mask = fallback_mask(inst, history, H, k_cap);
    out.provenance = "fallback";
    return out;
}

}  // namespace ucr
