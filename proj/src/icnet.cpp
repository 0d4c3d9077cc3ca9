#include "attic/icnet.hpp"

#include <cmath>

#include "attic/errors.hpp"

namespace attic::icnet {

using nn::Tensor;

int ArchitectureConfig::lstm_input_dim() const {
    int d = obs_embed_dim + sample_embed_dim + 2 * (ai_embed_dim + ai_embed_dim);
    if (attention) d += attention_output_dim();
    return d;
}

int ArchitectureConfig::proposal_input_dim() const {
    if (core == Core::LSTM) return lstm_hidden_dim;
    return obs_embed_dim + (attention ? attention_output_dim() : 0);
}

std::string ArchitectureConfig::name() const {
    std::string base = core == Core::FF ? "ff" : "lstm";
    return attention ? base + "-att" : base;
}

ArchitectureConfig ArchitectureConfig::from_name(const std::string& name) {
    ArchitectureConfig cfg;
    if (name == "ff") {
        cfg.core = Core::FF;
        cfg.attention = false;
    } else if (name == "ff-att") {
        cfg.core = Core::FF;
        cfg.attention = true;
    } else if (name == "lstm") {
        cfg.core = Core::LSTM;
        cfg.attention = false;
    } else if (name == "lstm-att") {
        cfg.core = Core::LSTM;
        cfg.attention = true;
    } else {
        throw ContractError("unknown architecture: " + name +
                            " (expected ff, ff-att, lstm, lstm-att)");
    }
    return cfg;
}

ProposalKind proposal_kind_for(DistKind prior, const ArchitectureConfig& cfg) {
    switch (prior) {
        case DistKind::Normal:
            return cfg.normal_proposal_mixture ? ProposalKind::Mixture2 : ProposalKind::Normal;
        case DistKind::Bernoulli:
            return ProposalKind::Bernoulli;
        case DistKind::Uniform:
        case DistKind::MixtureNormalUniform:
        case DistKind::MixtureOfNormals:
            return ProposalKind::Mixture2;
    }
    throw ContractError("unreachable proposal kind");
}

int eta_dim(ProposalKind kind) {
    switch (kind) {
        case ProposalKind::Normal: return 2;
        case ProposalKind::Bernoulli: return 1;
        case ProposalKind::Mixture2: return 6;
    }
    return 0;
}

namespace {

constexpr double kStdFloor = 1e-6;

// Raw network outputs are decoded relative to the prior's location/scale so
// one output regime serves latents of any physical magnitude.
ProposalParams decode_eta(const Tensor& eta, const Distribution& prior, ProposalKind kind) {
    double loc = prior.mean();
    double scale = std::max(prior.stddev(), 1e-12);
    switch (kind) {
        case ProposalKind::Normal: {
            Tensor mean = nn::affine(nn::slice(eta, 0, 1), scale, loc);
            Tensor std = nn::affine(nn::softplus(nn::slice(eta, 1, 1)), scale, kStdFloor);
            return NormalProposal{mean, std};
        }
        case ProposalKind::Bernoulli:
            return BernoulliProposal{nn::slice(eta, 0, 1)};
        case ProposalKind::Mixture2: {
            Tensor log_w = nn::log_softmax(nn::slice(eta, 0, 2));
            Tensor means = nn::affine(nn::slice(eta, 2, 2), scale, loc);
            Tensor stds = nn::affine(nn::softplus(nn::slice(eta, 4, 2)), scale, kStdFloor);
            return MixtureProposal{log_w, means, stds};
        }
    }
    throw ContractError("unreachable decode");
}

}  // namespace

nn::Tensor proposal_log_prob(const ProposalParams& params, double x) {
    if (const auto* n = std::get_if<NormalProposal>(&params))
        return nn::normal_log_pdf(x, n->mean, n->std);
    if (const auto* b = std::get_if<BernoulliProposal>(&params)) {
        // log sigma(logit) for x=1, log sigma(-logit) for x=0
        if (x == 1.0) return nn::neg(nn::softplus(nn::neg(b->logit)));
        if (x == 0.0) return nn::neg(nn::softplus(b->logit));
        throw ContractError("Bernoulli proposal evaluated off {0, 1}");
    }
    const auto& m = std::get<MixtureProposal>(params);
    return nn::logsumexp(nn::add(m.log_weights, nn::normal_log_pdf(x, m.means, m.stds)));
}

Distribution proposal_distribution(const ProposalParams& params) {
    if (const auto* n = std::get_if<NormalProposal>(&params))
        return Distribution::normal(n->mean[0], n->std[0]);
    if (const auto* b = std::get_if<BernoulliProposal>(&params))
        return Distribution::bernoulli(1.0 / (1.0 + std::exp(-b->logit[0])));
    const auto& m = std::get<MixtureProposal>(params);
    double w0 = std::exp(m.log_weights[0]);
    double w1 = std::exp(m.log_weights[1]);
    double total = w0 + w1;
    return Distribution::mixture_of_normals({w0 / total, w1 / total},
                                            {m.means[0], m.means[1]},
                                            {m.stds[0], m.stds[1]});
}

InferenceNetwork::InferenceNetwork(ArchitectureConfig cfg, int observation_count,
                                   double observation_scale, uint64_t seed)
    : cfg_(cfg),
      observation_count_(observation_count),
      observation_scale_(observation_scale),
      params_(seed) {
    if (observation_count_ < 1) throw ContractError("models must observe at least one value");
    if (observation_scale_ <= 0.0) throw ContractError("observation scale must be positive");
    obs_embedder_ = nn::Mlp::create(
        params_, "obs",
        {observation_count_, cfg_.obs_hidden_dim, cfg_.obs_hidden_dim, cfg_.obs_embed_dim});
    if (cfg_.core == Core::LSTM)
        lstm_ = nn::LstmParams::create(params_, "lstm", cfg_.lstm_input_dim(),
                                       cfg_.lstm_hidden_dim);
}

Tensor InferenceNetwork::embed_observations(std::span<const double> y) const {
    if (static_cast<int>(y.size()) != observation_count_)
        throw ModelError("expected " + std::to_string(observation_count_) +
                         " observations, got " + std::to_string(y.size()));
    std::vector<double> scaled(y.begin(), y.end());
    for (double& v : scaled) v /= observation_scale_;
    return obs_embedder_(Tensor::constant({observation_count_}, std::move(scaled)));
}

Site* InferenceNetwork::find_site(const std::string& key) {
    auto it = registry_.find(key);
    return it == registry_.end() ? nullptr : &it->second;
}

Site& InferenceNetwork::ensure_site(const std::string& key, const Distribution& prior) {
    if (Site* site = find_site(key)) {
        if (site->family != prior.kind())
            throw ModelError("site " + key + " seen with family " +
                             std::string(dist_kind_name(site->family)) + " and " +
                             std::string(dist_kind_name(prior.kind())));
        return *site;
    }
    Site site;
    site.family = prior.kind();
    site.kind = proposal_kind_for(prior.kind(), cfg_);
    std::string prefix = "site/" + key + "/";
    site.proposal = nn::Mlp::create(params_, prefix + "prop",
                                    {cfg_.proposal_input_dim(), cfg_.proposal_hidden_dim,
                                     eta_dim(site.kind)});
    if (cfg_.core == Core::LSTM) {
        site.ai_embed = params_.create(prefix + "ai", {cfg_.ai_embed_dim}, nn::Init::SmallUniform);
        site.sample_embed = nn::Mlp::create(params_, prefix + "sample",
                                            {1, cfg_.site_hidden_dim, cfg_.sample_embed_dim});
        family_embedding(prior.kind(), true);
    }
    if (cfg_.attention) {
        site.key_embed = nn::Mlp::create(params_, prefix + "key",
                                         {1, cfg_.site_hidden_dim, cfg_.attn_key_dim});
        site.value_embed = nn::Mlp::create(params_, prefix + "value",
                                           {1, cfg_.site_hidden_dim, cfg_.attn_value_dim});
        site.query_embed = nn::Mlp::create(
            params_, prefix + "query",
            {cfg_.obs_embed_dim, cfg_.query_hidden_dim, cfg_.attn_queries * cfg_.attn_key_dim});
    }
    return registry_.emplace(key, std::move(site)).first->second;
}

std::vector<DistKind> InferenceNetwork::family_kinds() const {
    std::vector<DistKind> kinds;
    for (const auto& [kind, tensor] : family_embeds_) kinds.push_back(kind);
    return kinds;
}

std::optional<Tensor> InferenceNetwork::family_embedding(DistKind kind, bool create) {
    auto it = family_embeds_.find(kind);
    if (it != family_embeds_.end()) return it->second;
    if (!create) return std::nullopt;
    Tensor t = params_.create("family/" + std::string(dist_kind_name(kind)),
                              {cfg_.ai_embed_dim}, nn::Init::SmallUniform);
    family_embeds_.emplace(kind, t);
    return t;
}

RunState::RunState(InferenceNetwork& net, std::span<const double> observations, bool training)
    : net_(net), training_(training) {
    obs_embed_ = net_.embed_observations(observations);
    const auto& cfg = net_.cfg_;
    if (cfg.core == Core::LSTM) {
        prev_value_embed_ = Tensor::zeros({cfg.sample_embed_dim});
        prev_ai_embed_ = Tensor::zeros({cfg.ai_embed_dim});
        prev_family_embed_ = Tensor::zeros({cfg.ai_embed_dim});
        lstm_state_ = nn::lstm_zero_state(cfg.lstm_hidden_dim);
    }
}

std::optional<ProposalParams> RunState::propose(const trace::Address& address, int instance,
                                                const Distribution& prior) {
    const auto& cfg = net_.cfg_;
    std::string key = InferenceNetwork::site_key(address, instance);
    Site* site = training_ ? &net_.ensure_site(key, prior) : net_.find_site(key);
    if (!site) return std::nullopt;
    if (site->family != prior.kind())
        throw ModelError("checkpoint/model mismatch at site " + key + ": trained on " +
                         std::string(dist_kind_name(site->family)) + ", model uses " +
                         std::string(dist_kind_name(prior.kind())));

    Tensor attn_out;
    if (cfg.attention) {
        if (keys_.empty()) {
            // No previously sampled variables yet.
            attn_out = Tensor::zeros({cfg.attention_output_dim()});
        } else {
            Tensor queries = nn::reshape((*site->query_embed)(obs_embed_),
                                         {cfg.attn_queries, cfg.attn_key_dim});
            Tensor key_mat = nn::stack_rows(keys_);
            Tensor value_mat = nn::stack_rows(values_);
            auto res = nn::attention(queries, key_mat, value_mat,
                                     1.0 / std::sqrt(static_cast<double>(cfg.attn_key_dim)));
            attn_out = res.output;
            if (attention_log) {
                auto w = res.weights.values();
                attention_log->push_back(
                    {key, memory_sites_, {w.begin(), w.end()}, cfg.attn_queries});
            }
        }
    }

    Tensor proposal_in;
    if (cfg.core == Core::FF) {
        proposal_in = cfg.attention ? nn::concat(std::array{obs_embed_, attn_out}) : obs_embed_;
    } else {
        auto family = net_.family_embedding(prior.kind(), training_);
        std::vector<Tensor> parts = {
            obs_embed_,
            prev_value_embed_,
            *site->ai_embed,
            family ? *family : Tensor::zeros({cfg.ai_embed_dim}),
            prev_ai_embed_,
            prev_family_embed_,
        };
        if (cfg.attention) parts.push_back(attn_out);
        auto [output, next] = nn::lstm_step(nn::concat(parts), lstm_state_, net_.lstm());
        lstm_state_ = next;
        proposal_in = output;
    }

    return decode_eta(site->proposal(proposal_in), prior, site->kind);
}

void RunState::feed(const trace::Address& address, int instance, const Distribution& prior,
                    double value) {
    const auto& cfg = net_.cfg_;
    Site* site = net_.find_site(InferenceNetwork::site_key(address, instance));
    if (!site) {
        // Unseen at inference: invisible to the network, per the fallback
        // contract; later statements cannot attend to this value.
        if (cfg.core == Core::LSTM) {
            prev_value_embed_ = Tensor::zeros({cfg.sample_embed_dim});
            prev_ai_embed_ = Tensor::zeros({cfg.ai_embed_dim});
            prev_family_embed_ = Tensor::zeros({cfg.ai_embed_dim});
        }
        return;
    }
    double standardized = (value - prior.mean()) / std::max(prior.stddev(), 1e-12);
    Tensor x = Tensor::constant({1}, {standardized});
    if (cfg.core == Core::LSTM) {
        prev_value_embed_ = (*site->sample_embed)(x);
        prev_ai_embed_ = *site->ai_embed;
        auto family = net_.family_embedding(prior.kind(), training_);
        prev_family_embed_ = family ? *family : Tensor::zeros({cfg.ai_embed_dim});
    }
    if (cfg.attention) {
        keys_.push_back((*site->key_embed)(x));
        values_.push_back((*site->value_embed)(x));
        memory_sites_.push_back(InferenceNetwork::site_key(address, instance));
    }
}

nn::Tensor trace_log_q(InferenceNetwork& net, const trace::Trace& trace,
                       std::span<const double> observations, bool training) {
    RunState run(net, observations, training);
    Tensor total;
    for (const auto& entry : trace.entries) {
        auto params = run.propose(entry.address, entry.instance, entry.dist);
        // Frozen network, unseen site: the prior was the proposal.
        Tensor term = params ? proposal_log_prob(*params, entry.value)
                             : Tensor::scalar(entry.log_prob);
        total = total.defined() ? nn::add(total, term) : term;
        run.feed(entry.address, entry.instance, entry.dist, entry.value);
    }
    if (!total.defined()) total = Tensor::scalar(0.0);
    return total;
}

void NetworkGuide::begin(std::span<const double> observations) {
    run_.emplace(net_, observations, false);
    run_->attention_log = attention_log;
}

trace::GuideDraw NetworkGuide::draw(const trace::Address& address, int instance,
                                    const Distribution& prior, RandomStream& rng) {
    auto params = run_->propose(address, instance, prior);
    trace::GuideDraw out{};
    if (!params) {
        out.value = prior.sample(rng);
        out.log_q = prior.log_pdf(out.value);
        out.from_prior = true;
    } else {
        Distribution q = proposal_distribution(*params);
        out.value = q.sample(rng);
        out.log_q = q.log_pdf(out.value);
        out.from_prior = false;
    }
    run_->feed(address, instance, prior, out.value);
    return out;
}

}  // namespace attic::icnet
