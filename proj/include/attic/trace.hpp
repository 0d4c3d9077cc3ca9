#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "attic/dist.hpp"
#include "attic/rng.hpp"

namespace attic::trace {

// Author-supplied stable label of a syntactic sample/observe statement.
using Address = std::string;

struct TraceEntry {
    Address address;
    int instance;  // 1 + occurrences of address earlier in this trace
    Distribution dist;
    double value;
    double log_prob;  // log f_a(value)
    // Guided-mode extras: proposal density of the drawn value, and whether
    // the site fell back to the prior (unseen at inference).
    double proposal_log_prob = std::numeric_limits<double>::quiet_NaN();
    bool proposed_from_prior = false;
};

struct Observation {
    int index;  // n, 0-based
    std::string label;
    Distribution dist;
    double value;
    double log_prob;       // log g_n(value)
    int latent_cursor;     // number of latents recorded before this observe
};

class Trace {
public:
    std::vector<TraceEntry> entries;
    std::vector<Observation> observations;

    double log_prior() const;       // sum of entry log_probs
    double log_likelihood() const;  // sum of observation log_probs
    double log_joint() const { return log_prior() + log_likelihood(); }

    // Incremental importance weight; set only by guided executions.
    std::optional<double> log_weight;

    std::vector<double> latent_values() const;
    std::vector<double> observed_values() const;
    const TraceEntry* find(const Address& address, int instance) const;

    // Line-oriented record format, one entry/observation per line.
    std::string to_lines() const;
    static Trace from_lines(std::string_view text);
};

// Proposal source for guided execution. Implementations own any per-trace
// state; begin() is called once before the model runs.
struct GuideDraw {
    double value;
    double log_q;
    bool from_prior;
};

class ProposalGuide {
public:
    virtual ~ProposalGuide() = default;
    virtual void begin(std::span<const double> observations) = 0;
    virtual GuideDraw draw(const Address& address, int instance, const Distribution& prior,
                           RandomStream& rng) = 0;
};

// Execution modes. PriorSample draws everything from the model itself;
// Replay substitutes recorded latents and observations; Guided samples
// latents from a proposal and binds observations to supplied values.
struct PriorSample {};

struct Replay {
    std::vector<double> latents;
    std::vector<double> observations;
};

struct Guided {
    ProposalGuide* guide;
    std::vector<double> observations;
};

using ExecutionMode = std::variant<PriorSample, Replay, Guided>;

// Sampling context handed to model programs.
class Ctx {
public:
    double sample(const Address& address, const Distribution& prior);
    void observe(const std::string& label, const Distribution& likelihood);

    // 1 + occurrences of address so far in this execution.
    int instance_of(const Address& address) const;

    RandomStream& rng() { return rng_; }

private:
    friend Trace run_model(const std::function<void(Ctx&)>& model, const ExecutionMode& mode,
                           RandomStream& rng);
    Ctx(const ExecutionMode& mode, RandomStream& rng);

    const ExecutionMode& mode_;
    RandomStream& rng_;
    Trace trace_;
    size_t latent_cursor_ = 0;  // replay position
    size_t observe_cursor_ = 0;
};

using Model = std::function<void(Ctx&)>;

Trace run_model(const Model& model, const ExecutionMode& mode, RandomStream& rng);

}  // namespace attic::trace
