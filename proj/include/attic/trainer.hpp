#pragma once

#include <functional>
#include <string>
#include <vector>

#include "attic/icnet.hpp"
#include "attic/models.hpp"

namespace attic::trainer {

struct TrainConfig {
    long long total_traces = 100000;
    int minibatch = 64;
    // (cumulative trace-count threshold, learning rate); thresholds strictly
    // increasing, first entry at 0. Empty = thirds of total through 1e-3/-4/-5.
    std::vector<std::pair<long long, double>> lr_schedule;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    uint64_t seed = 1;
    long long checkpoint_every = 0;  // 0 = only at end (when path set)
    std::string checkpoint_path;

    std::vector<std::pair<long long, double>> effective_schedule() const;
};

struct StepReport {
    long long step;
    long long traces_seen;
    double loss;  // mean -log q over the minibatch
    double lr;
    double wall_seconds;
};

struct TrainResult {
    long long traces_seen = 0;
    long long steps = 0;
    double final_loss = 0.0;
    long long skipped_batches = 0;
};

// Amortized-inference training: per step, draw a minibatch of prior traces
// (x^m, y^m), take one Adam step on the mean of -log q(x^m | y^m; phi).
TrainResult train(const models::ModelSpec& model, icnet::InferenceNetwork& net,
                  const TrainConfig& cfg,
                  const std::function<void(const StepReport&)>& on_step = {},
                  const std::map<std::string, nn::Adam::Slot>* resume_adam = nullptr,
                  long long resume_traces = 0);

// Mean -log q over already-drawn prior traces under an arbitrary trace-level
// proposal density (the estimator of the amortization objective).
double loss_estimate(const std::vector<trace::Trace>& batch,
                     const std::function<double(const trace::Trace&)>& trace_log_q);

double loss_estimate(const std::vector<trace::Trace>& batch, icnet::InferenceNetwork& net);

}  // namespace attic::trainer
