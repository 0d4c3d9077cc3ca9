#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "attic/models.hpp"
#include "attic/trace.hpp"

namespace attic::sis {

struct WeightedSample {
    trace::Trace trace;
    double log_weight;
};

struct WeightedSampleSet {
    std::vector<WeightedSample> samples;
    std::vector<double> observations;

    // Weights normalized to sum 1, computed stably in the log domain.
    std::vector<double> normalized_weights() const;
};

// Proposes every site from its prior: importance weights reduce to the
// likelihood (likelihood weighting), the no-network baseline.
class PriorGuide : public trace::ProposalGuide {
public:
    void begin(std::span<const double>) override {}
    trace::GuideDraw draw(const trace::Address&, int, const Distribution& prior,
                          RandomStream& rng) override {
        double value = prior.sample(rng);
        return {value, prior.log_pdf(value), true};
    }
};

using GuideFactory = std::function<std::unique_ptr<trace::ProposalGuide>()>;

// K guided executions with per-particle substreams of `seed`. Particles are
// independent; with threads > 1 they run chunked over a frozen network and
// are reduced in particle order, so results match the serial run.
WeightedSampleSet run_guided(const models::ModelSpec& model, const GuideFactory& make_guide,
                             std::span<const double> observations, int k, uint64_t seed,
                             int threads = 1);

// Effective sample size (sum w)^2 / sum w^2 in [1, K].
double ess(const WeightedSampleSet& set);

// Self-normalized importance estimate of E[g(x)].
std::vector<double> posterior_expectation(
    const WeightedSampleSet& set,
    const std::function<std::vector<double>(const trace::Trace&)>& g);

struct EssRow {
    int observation_index;
    double mean_ess;
    double std_ess;
};

struct EssReport {
    std::vector<EssRow> rows;
    double overall_mean = 0.0;
    int repeats = 0;
    int k = 0;
};

// For each observation vector: `repeats` independent K-particle estimates;
// reports mean/std ESS per observation plus the mean across observations.
EssReport ess_report(const models::ModelSpec& model, const GuideFactory& make_guide,
                     const std::vector<std::vector<double>>& observations, int repeats, int k,
                     uint64_t seed, int threads = 1);

// CSV export: log_weight column then one column per (address, instance) in
// first-appearance order; traces missing a site leave the cell empty.
std::string weighted_samples_csv(const WeightedSampleSet& set);

}  // namespace attic::sis
