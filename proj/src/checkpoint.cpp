#include <fstream>

#include <json.hpp>

#include "attic/errors.hpp"
#include "attic/icnet.hpp"

namespace attic::icnet {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

json config_to_json(const ArchitectureConfig& cfg) {
    return json{{"core", cfg.core == Core::FF ? "ff" : "lstm"},
                {"attention", cfg.attention},
                {"obs_embed_dim", cfg.obs_embed_dim},
                {"obs_hidden_dim", cfg.obs_hidden_dim},
                {"sample_embed_dim", cfg.sample_embed_dim},
                {"lstm_hidden_dim", cfg.lstm_hidden_dim},
                {"ai_embed_dim", cfg.ai_embed_dim},
                {"site_hidden_dim", cfg.site_hidden_dim},
                {"query_hidden_dim", cfg.query_hidden_dim},
                {"proposal_hidden_dim", cfg.proposal_hidden_dim},
                {"attn_queries", cfg.attn_queries},
                {"attn_key_dim", cfg.attn_key_dim},
                {"attn_value_dim", cfg.attn_value_dim},
                {"normal_proposal_mixture", cfg.normal_proposal_mixture}};
}

ArchitectureConfig config_from_json(const json& j) {
    ArchitectureConfig cfg;
    cfg.core = j.at("core").get<std::string>() == "ff" ? Core::FF : Core::LSTM;
    cfg.attention = j.at("attention").get<bool>();
    cfg.obs_embed_dim = j.at("obs_embed_dim").get<int>();
    cfg.obs_hidden_dim = j.at("obs_hidden_dim").get<int>();
    cfg.sample_embed_dim = j.at("sample_embed_dim").get<int>();
    cfg.lstm_hidden_dim = j.at("lstm_hidden_dim").get<int>();
    cfg.ai_embed_dim = j.at("ai_embed_dim").get<int>();
    cfg.site_hidden_dim = j.at("site_hidden_dim").get<int>();
    cfg.query_hidden_dim = j.at("query_hidden_dim").get<int>();
    cfg.proposal_hidden_dim = j.at("proposal_hidden_dim").get<int>();
    cfg.attn_queries = j.at("attn_queries").get<int>();
    cfg.attn_key_dim = j.at("attn_key_dim").get<int>();
    cfg.attn_value_dim = j.at("attn_value_dim").get<int>();
    cfg.normal_proposal_mixture = j.at("normal_proposal_mixture").get<bool>();
    return cfg;
}

// A representative prior per family; ensure_site only consults the kind.
Distribution family_stand_in(DistKind kind) {
    switch (kind) {
        case DistKind::Normal: return Distribution::normal(0.0, 1.0);
        case DistKind::Uniform: return Distribution::uniform(0.0, 1.0);
        case DistKind::Bernoulli: return Distribution::bernoulli(0.5);
        case DistKind::MixtureNormalUniform:
            return Distribution::mixture_normal_uniform(0.5, 0.0, 1.0, -1.0, 1.0);
        case DistKind::MixtureOfNormals:
            return Distribution::mixture_of_normals({1.0}, {0.0}, {1.0});
    }
    throw ContractError("unreachable");
}

}  // namespace

void save_checkpoint(const InferenceNetwork& net, const std::string& path,
                     const nn::Adam* optimizer, long long traces_seen) {
    json j;
    j["format"] = "attic-checkpoint";
    j["version"] = kFormatVersion;
    j["architecture"] = config_to_json(net.config());
    j["observation_count"] = net.observation_count();
    j["observation_scale"] = net.observation_scale();
    j["seed"] = net.params().seed();

    json sites = json::object();
    for (const auto& [key, site] : net.registry())
        sites[key] = std::string(dist_kind_name(site.family));
    j["sites"] = sites;

    json families = json::array();
    for (DistKind kind : net.family_kinds())
        families.push_back(std::string(dist_kind_name(kind)));
    j["families"] = families;

    json params = json::object();
    for (const auto& [name, tensor] : net.params().items())
        params[name] = json{{"shape", tensor.shape()},
                            {"data", std::vector<double>(tensor.values().begin(),
                                                         tensor.values().end())}};
    j["params"] = params;

    if (optimizer) {
        json adam = json::object();
        for (const auto& [name, slot] : optimizer->state())
            adam[name] = json{{"m", slot.m}, {"v", slot.v}, {"t", slot.t}};
        j["trainer"] = json{{"traces_seen", traces_seen}, {"adam", adam}};
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw ContractError("cannot write checkpoint: " + path);
    out << j.dump();
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ContractError("cannot read checkpoint: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ContractError("malformed checkpoint " + path + ": " + e.what());
    }
    if (j.value("format", "") != "attic-checkpoint" || j.value("version", 0) != kFormatVersion)
        throw ContractError("unsupported checkpoint format in " + path);

    LoadedCheckpoint loaded;
    loaded.net = std::make_unique<InferenceNetwork>(
        config_from_json(j.at("architecture")), j.at("observation_count").get<int>(),
        j.at("observation_scale").get<double>(), j.at("seed").get<uint64_t>());
    InferenceNetwork& net = *loaded.net;

    for (const auto& family : j.at("families"))
        net.family_embedding(dist_kind_from_name(family.get<std::string>()), true);
    for (const auto& [key, family] : j.at("sites").items())
        net.ensure_site(key, family_stand_in(dist_kind_from_name(family.get<std::string>())));

    const auto& params = j.at("params");
    if (params.size() != net.params().items().size())
        throw ContractError("checkpoint parameter set does not match architecture (" +
                            std::to_string(params.size()) + " vs " +
                            std::to_string(net.params().items().size()) + ")");
    for (const auto& [name, tensor] : net.params().items()) {
        auto it = params.find(name);
        if (it == params.end()) throw ContractError("checkpoint missing parameter " + name);
        auto shape = it->at("shape").get<std::vector<int>>();
        auto data = it->at("data").get<std::vector<double>>();
        if (shape != tensor.shape() || data.size() != tensor.values().size())
            throw ContractError("checkpoint shape mismatch for " + name);
        nn::Tensor mutable_tensor = tensor;
        mutable_tensor.leaf_values() = std::move(data);
    }

    if (j.contains("trainer")) {
        loaded.traces_seen = j["trainer"].at("traces_seen").get<long long>();
        for (const auto& [name, slot] : j["trainer"].at("adam").items()) {
            nn::Adam::Slot s;
            s.m = slot.at("m").get<std::vector<double>>();
            s.v = slot.at("v").get<std::vector<double>>();
            s.t = slot.at("t").get<long long>();
            loaded.adam_state.emplace(name, std::move(s));
        }
    }
    return loaded;
}

}  // namespace attic::icnet
