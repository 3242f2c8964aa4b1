#include "ucr/error.hpp"
#include "ucr/maskgen.hpp"

namespace ucr {

FreezeMask MaskGenerator::revise(const FreezeMask& previous, const Feedback&) {
    return FreezeMask({}, previous.k_cap());
}

namespace {

int cap_for(const MethodConfig& cfg, const UcInstance& inst) {
    return cfg.k_cap ? *cfg.k_cap : default_k_cap(inst.generators.size());
}

void require_history(const std::string& method, const HistoryBank& history) {
    if (history.empty()) throw SemanticError("method '" + method + "' requires a non-empty history bank");
}

// Heuristic generators answer feedback by dropping the implicated cells.
class HeuristicGenerator : public MaskGenerator {
public:
    FreezeMask revise(const FreezeMask& previous, const Feedback& feedback) override {
        return previous.without(feedback.cells);
    }
};

class NoneGenerator : public MaskGenerator {
public:
    explicit NoneGenerator(MethodConfig cfg) : cfg_(std::move(cfg)) {}
    std::string name() const override { return "none"; }
    FreezeMask generate(const UcInstance& inst, const HistoryBank&) override { return FreezeMask({}, cap_for(cfg_, inst)); }

private:
    MethodConfig cfg_;
};

class StabilityGenerator : public HeuristicGenerator {
public:
    explicit StabilityGenerator(MethodConfig cfg) : cfg_(std::move(cfg)) {}
    std::string name() const override { return "stability"; }
    bool needs_history() const override { return true; }
    FreezeMask generate(const UcInstance& inst, const HistoryBank& history) override {
        require_history(name(), history);
        return stability_mask(inst, history, cfg_.H, cap_for(cfg_, inst));
    }

private:
    MethodConfig cfg_;
};

class KnnGenerator : public HeuristicGenerator {
public:
    explicit KnnGenerator(MethodConfig cfg) : cfg_(std::move(cfg)) {}
    std::string name() const override { return "knn"; }
    bool needs_history() const override { return true; }
    FreezeMask generate(const UcInstance& inst, const HistoryBank& history) override {
        require_history(name(), history);
        return knn_mask(inst, history, cfg_.k_neighbors, cap_for(cfg_, inst));
    }

private:
    MethodConfig cfg_;
};

class KmeansGenerator : public HeuristicGenerator {
public:
    explicit KmeansGenerator(MethodConfig cfg) : cfg_(std::move(cfg)) {}
    std::string name() const override { return "kmeans"; }
    bool needs_history() const override { return true; }
    FreezeMask generate(const UcInstance& inst, const HistoryBank& history) override {
        require_history(name(), history);
        return kmeans_mask(inst, history, cfg_.n_clusters, cap_for(cfg_, inst), cfg_.seed);
    }

private:
    MethodConfig cfg_;
};

class RandomGenerator : public HeuristicGenerator {
public:
    explicit RandomGenerator(MethodConfig cfg) : cfg_(std::move(cfg)) {}
    std::string name() const override { return "random"; }
    FreezeMask generate(const UcInstance& inst, const HistoryBank&) override {
        return random_mask(inst, cfg_.ratio, cfg_.seed);
    }

private:
    MethodConfig cfg_;
};

class FixAtOptimumGenerator : public HeuristicGenerator {
public:
    explicit FixAtOptimumGenerator(MethodConfig cfg) : cfg_(std::move(cfg)) {}
    std::string name() const override { return "fix-at-optimum"; }
    FreezeMask generate(const UcInstance& inst, const HistoryBank&) override {
        return fix_at_optimum_mask(inst, *cfg_.optimum, cfg_.ratio, cfg_.seed);
    }

private:
    MethodConfig cfg_;
};

class LlmGenerator : public MaskGenerator {
public:
    explicit LlmGenerator(MethodConfig cfg) : cfg_(std::move(cfg)) {
        if (!cfg_.transport) cfg_.transport = std::make_shared<HttpChatTransport>();
    }
    std::string name() const override { return "llm"; }
    std::string provenance() const override { return provenance_; }

    FreezeMask generate(const UcInstance& inst, const HistoryBank& history) override {
        inst_ = &inst;
        auto out = llm_generate(inst, history, *cfg_.llm, *cfg_.transport, cfg_.H, cap_for(cfg_, inst));
        provenance_ = out.provenance;
        conversation_ = std::move(out.conversation);
        return out.mask;
    }

    // Sends the feedback back into the conversation; a failed or malformed
    // answer falls back to dropping the implicated cells.
    FreezeMask revise(const FreezeMask& previous, const Feedback& feedback) override {
        if (provenance_ != "llm" || !inst_) return previous.without(feedback.cells);
        auto conv = conversation_;
        conv.push_back({"user", "The solver rejected these fixings:\n" + feedback.summary +
                                    "\nReturn a revised JSON array that follows the same rules."});
        try {
            const std::string reply = cfg_.transport->complete(conv, *cfg_.llm);
            auto mask = parse_llm_response(reply, *inst_, previous.k_cap());
            conv.push_back({"assistant", reply});
            conversation_ = std::move(conv);
            return mask;
        } catch (const std::exception&) {
            return previous.without(feedback.cells);
        }
    }

private:
    MethodConfig cfg_;
    const UcInstance* inst_ = nullptr;
    std::string provenance_ = "llm";
    std::vector<ChatMessage> conversation_;
};

}  // namespace

const std::vector<std::string>& generator_names() {
    static const std::vector<std::string> names = {"none",   "stability",      "knn", "kmeans",
                                                   "random", "fix-at-optimum", "llm"};
    return names;
}

std::unique_ptr<MaskGenerator> make_generator(const std::string& name, const MethodConfig& config) {
    if (name == "none") return std::make_unique<NoneGenerator>(config);
    if (name == "stability") return std::make_unique<StabilityGenerator>(config);
    if (name == "knn") return std::make_unique<KnnGenerator>(config);
    if (name == "kmeans") return std::make_unique<KmeansGenerator>(config);
    if (name == "random") return std::make_unique<RandomGenerator>(config);
    if (name == "fix-at-optimum") {
        if (!config.optimum) throw SemanticError("method 'fix-at-optimum' needs a baseline schedule");
        return std::make_unique<FixAtOptimumGenerator>(config);
    }
    if (name == "llm") {
        if (!config.llm) throw SemanticError("method 'llm' requires an endpoint configuration (--llm-config)");
        return std::make_unique<LlmGenerator>(config);
    }
    throw SemanticError("unknown method '" + name + "'");
}

}  // namespace ucr
