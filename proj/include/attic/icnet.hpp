#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "attic/dist.hpp"
#include "attic/nn/adam.hpp"
#include "attic/nn/layers.hpp"
#include "attic/nn/params.hpp"
#include "attic/trace.hpp"

namespace attic::icnet {

enum class Core { FF, LSTM };

// Proposal family emitted for a site, chosen from its prior's family.
enum class ProposalKind { Normal, Bernoulli, Mixture2 };

struct ArchitectureConfig {
    Core core = Core::LSTM;
    bool attention = true;

    int obs_embed_dim = 64;
    int obs_hidden_dim = 64;     // two hidden layers of this width
    int sample_embed_dim = 16;
    int lstm_hidden_dim = 128;
    int ai_embed_dim = 8;        // per (address, instance) and per family
    int site_hidden_dim = 16;    // sample/key/value embedder hidden width
    int query_hidden_dim = 64;
    int proposal_hidden_dim = 64;

    int attn_queries = 4;
    int attn_key_dim = 16;
    int attn_value_dim = 8;

    // Normal-prior sites propose a 2-component mixture by default; plain
    // Normal proposals are available for conjugate-style studies.
    bool normal_proposal_mixture = true;

    int attention_output_dim() const { return attn_queries * attn_value_dim; }
    int lstm_input_dim() const;
    int proposal_input_dim() const;

    // "ff", "ff-att", "lstm", "lstm-att"
    std::string name() const;
    static ArchitectureConfig from_name(const std::string& name);
};

struct NormalProposal {
    nn::Tensor mean, std;  // [1] each
};
struct BernoulliProposal {
    nn::Tensor logit;  // [1]
};
struct MixtureProposal {
    nn::Tensor log_weights, means, stds;  // [2] each
};
using ProposalParams = std::variant<NormalProposal, BernoulliProposal, MixtureProposal>;

// Differentiable proposal log-density of a concrete value.
nn::Tensor proposal_log_prob(const ProposalParams& params, double x);
// Detached sampling-side view of the same parameters.
Distribution proposal_distribution(const ProposalParams& params);

ProposalKind proposal_kind_for(DistKind prior, const ArchitectureConfig& cfg);
int eta_dim(ProposalKind kind);

// Per-(address, instance) modules, created lazily during training.
struct Site {
    DistKind family;
    ProposalKind kind;
    nn::Mlp proposal;
    std::optional<nn::Tensor> ai_embed;
    std::optional<nn::Mlp> sample_embed;
    std::optional<nn::Mlp> key_embed;
    std::optional<nn::Mlp> value_embed;
    std::optional<nn::Mlp> query_embed;
};

class RunState;

class InferenceNetwork {
public:
    InferenceNetwork(ArchitectureConfig cfg, int observation_count, double observation_scale,
                     uint64_t seed);

    const ArchitectureConfig& config() const { return cfg_; }
    int observation_count() const { return observation_count_; }
    double observation_scale() const { return observation_scale_; }

    nn::ParameterStore& params() { return params_; }
    const nn::ParameterStore& params() const { return params_; }

    // Deterministic differentiable embedding of a complete observation vector.
    nn::Tensor embed_observations(std::span<const double> y) const;

    Site* find_site(const std::string& key);
    Site& ensure_site(const std::string& key, const Distribution& prior);
    const std::map<std::string, Site>& registry() const { return registry_; }

    // Family embedding tensor; absent (and not created) when frozen.
    std::optional<nn::Tensor> family_embedding(DistKind kind, bool create);
    std::vector<DistKind> family_kinds() const;

    const nn::LstmParams& lstm() const { return *lstm_; }

    static std::string site_key(const trace::Address& address, int instance) {
        return address + "#" + std::to_string(instance);
    }

private:
    friend class RunState;

    ArchitectureConfig cfg_;
    int observation_count_;
    double observation_scale_;
    nn::ParameterStore params_;
    nn::Mlp obs_embedder_;
    std::optional<nn::LstmParams> lstm_;
    std::map<std::string, Site> registry_;
    std::map<DistKind, nn::Tensor> family_embeds_;
};

// Forward-pass state for one trace: previous-sample embeddings, LSTM state,
// and the attention memory of (key, value) pairs.
class RunState {
public:
    RunState(InferenceNetwork& net, std::span<const double> observations, bool training);

    // Proposal parameters for the next sample statement, or nullopt when the
    // site is unseen at inference time (caller falls back to the prior).
    std::optional<ProposalParams> propose(const trace::Address& address, int instance,
                                          const Distribution& prior);

    // Registers the value drawn at the site: key/value pair into attention
    // memory, previous-sample embeddings for the LSTM input.
    void feed(const trace::Address& address, int instance, const Distribution& prior,
              double value);

    struct AttentionRecord {
        std::string site;                  // site being proposed
        std::vector<std::string> memory;   // previously sampled sites attended over
        std::vector<double> weights;       // [queries x memory] row-major
        int num_queries;
    };
    std::vector<AttentionRecord>* attention_log = nullptr;

private:
    InferenceNetwork& net_;
    bool training_;
    nn::Tensor obs_embed_;
    nn::Tensor prev_value_embed_;
    nn::Tensor prev_ai_embed_;
    nn::Tensor prev_family_embed_;
    nn::LstmState lstm_state_;
    std::vector<nn::Tensor> keys_;
    std::vector<nn::Tensor> values_;
    std::vector<std::string> memory_sites_;
};

// Differentiable log q(x | y; phi) of a complete trace: the sum of per-site
// proposal log-densities. With training=true, registry entries are created
// lazily; otherwise unseen sites contribute their prior density as a constant.
nn::Tensor trace_log_q(InferenceNetwork& net, const trace::Trace& trace,
                       std::span<const double> observations, bool training);

// ProposalGuide backed by a (frozen) inference network.
class NetworkGuide : public trace::ProposalGuide {
public:
    explicit NetworkGuide(InferenceNetwork& net) : net_(net) {}

    void begin(std::span<const double> observations) override;
    trace::GuideDraw draw(const trace::Address& address, int instance, const Distribution& prior,
                          RandomStream& rng) override;

    std::vector<RunState::AttentionRecord>* attention_log = nullptr;

private:
    InferenceNetwork& net_;
    std::optional<RunState> run_;
};

// Checkpoint container: architecture, registry keys, all parameter tensors,
// optional optimizer state for resumable training.
void save_checkpoint(const InferenceNetwork& net, const std::string& path,
                     const nn::Adam* optimizer = nullptr, long long traces_seen = 0);

struct LoadedCheckpoint {
    std::unique_ptr<InferenceNetwork> net;
    std::map<std::string, nn::Adam::Slot> adam_state;
    long long traces_seen = 0;
};
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace attic::icnet
