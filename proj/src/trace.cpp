#include "attic/trace.hpp"

#include <cmath>
#include <sstream>

#include "attic/errors.hpp"

namespace attic::trace {

double Trace::log_prior() const {
    double total = 0.0;
    for (const auto& e : entries) total += e.log_prob;
    return total;
}

double Trace::log_likelihood() const {
    double total = 0.0;
    for (const auto& o : observations) total += o.log_prob;
    return total;
}

std::vector<double> Trace::latent_values() const {
    std::vector<double> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.value);
    return out;
}

std::vector<double> Trace::observed_values() const {
    std::vector<double> out;
    out.reserve(observations.size());
    for (const auto& o : observations) out.push_back(o.value);
    return out;
}

const TraceEntry* Trace::find(const Address& address, int instance) const {
    for (const auto& e : entries)
        if (e.instance == instance && e.address == address) return &e;
    return nullptr;
}

std::string Trace::to_lines() const {
    std::ostringstream out;
    out.precision(17);
    size_t next_obs = 0;
    for (size_t t = 0; t <= entries.size(); ++t) {
        while (next_obs < observations.size() &&
               observations[next_obs].latent_cursor == static_cast<int>(t)) {
            const auto& o = observations[next_obs++];
            out << "observe " << o.label << ' ' << o.dist.describe() << " = " << o.value << '\n';
        }
        if (t < entries.size()) {
            const auto& e = entries[t];
            out << "sample " << e.address << ' ' << e.instance << ' ' << e.dist.describe()
                << " = " << e.value << '\n';
        }
    }
    return out.str();
}

Trace Trace::from_lines(std::string_view text) {
    Trace trace;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        auto rest = [&] {
            std::string dist_text, tok;
            double value = 0.0;
            while (ls >> tok) {
                if (tok == "=") {
                    ls >> value;
                    break;
                }
                if (!dist_text.empty()) dist_text += ' ';
                dist_text += tok;
            }
            return std::pair(Distribution::parse(dist_text), value);
        };
        if (tag == "sample") {
            Address address;
            int instance;
            ls >> address >> instance;
            auto [dist, value] = rest();
            if (trace.find(address, instance))
                throw ModelError("duplicate (address, instance) in trace: " + address + "#" +
                                 std::to_string(instance));
            trace.entries.push_back(
                {address, instance, dist, value, dist.log_pdf(value)});
        } else if (tag == "observe") {
            std::string label;
            ls >> label;
            auto [dist, value] = rest();
            trace.observations.push_back({static_cast<int>(trace.observations.size()), label,
                                          dist, value, dist.log_pdf(value),
                                          static_cast<int>(trace.entries.size())});
        } else {
            throw ContractError("bad trace line: " + line);
        }
    }
    return trace;
}

Ctx::Ctx(const ExecutionMode& mode, RandomStream& rng) : mode_(mode), rng_(rng) {}

int Ctx::instance_of(const Address& address) const {
    int count = 0;
    for (const auto& e : trace_.entries)
        if (e.address == address) ++count;
    return count + 1;
}

double Ctx::sample(const Address& address, const Distribution& prior) {
    int instance = instance_of(address);
    double value;
    double log_q = std::numeric_limits<double>::quiet_NaN();
    bool from_prior = false;

    if (std::holds_alternative<PriorSample>(mode_)) {
        value = prior.sample(rng_);
    } else if (const auto* replay = std::get_if<Replay>(&mode_)) {
        if (latent_cursor_ >= replay->latents.size())
            throw ModelError("replay ran out of latent values at " + address);
        value = replay->latents[latent_cursor_++];
    } else {
        const auto& guided = std::get<Guided>(mode_);
        GuideDraw draw = guided.guide->draw(address, instance, prior, rng_);
        value = draw.value;
        log_q = draw.log_q;
        from_prior = draw.from_prior;
    }

    double log_prob = prior.log_pdf(value);
    trace_.entries.push_back({address, instance, prior, value, log_prob, log_q, from_prior});
    if (!std::isnan(log_q) && trace_.log_weight) *trace_.log_weight += log_prob - log_q;
    return value;
}

void Ctx::observe(const std::string& label, const Distribution& likelihood) {
    double value;
    if (std::holds_alternative<PriorSample>(mode_)) {
        value = likelihood.sample(rng_);
    } else if (const auto* replay = std::get_if<Replay>(&mode_)) {
        if (observe_cursor_ >= replay->observations.size())
            throw ModelError("replay ran out of observations at " + label);
        value = replay->observations[observe_cursor_];
    } else {
        const auto& guided = std::get<Guided>(mode_);
        if (observe_cursor_ >= guided.observations.size())
            throw ModelError("model issued more observe statements than observed values (" +
                             std::to_string(guided.observations.size()) + ") at " + label);
        value = guided.observations[observe_cursor_];
    }
    ++observe_cursor_;
    double log_prob = likelihood.log_pdf(value);
    trace_.observations.push_back({static_cast<int>(trace_.observations.size()), label,
                                   likelihood, value, log_prob,
                                   static_cast<int>(trace_.entries.size())});
    if (trace_.log_weight) *trace_.log_weight += log_prob;
}

Trace run_model(const Model& model, const ExecutionMode& mode, RandomStream& rng) {
    Ctx ctx(mode, rng);
    if (const auto* guided = std::get_if<Guided>(&mode)) {
        ctx.trace_.log_weight = 0.0;
        guided->guide->begin(guided->observations);
    }
    model(ctx);
    if (const auto* guided = std::get_if<Guided>(&mode)) {
        if (ctx.observe_cursor_ != guided->observations.size())
            throw ModelError("observation count mismatch: model consumed " +
                             std::to_string(ctx.observe_cursor_) + " of " +
                             std::to_string(guided->observations.size()));
    } else if (const auto* replay = std::get_if<Replay>(&mode)) {
        if (ctx.latent_cursor_ != replay->latents.size())
            throw ModelError("replay consumed " + std::to_string(ctx.latent_cursor_) + " of " +
                             std::to_string(replay->latents.size()) + " latents");
        if (ctx.observe_cursor_ != replay->observations.size())
            throw ModelError("replay consumed " + std::to_string(ctx.observe_cursor_) + " of " +
                             std::to_string(replay->observations.size()) + " observations");
    }
    return std::move(ctx.trace_);
}

}  // namespace attic::trace
