#include "attic/trainer.hpp"

#include <chrono>
#include <cmath>
#include <iostream>

#include "attic/errors.hpp"

namespace attic::trainer {

std::vector<std::pair<long long, double>> TrainConfig::effective_schedule() const {
    if (!lr_schedule.empty()) {
        long long prev = -1;
        for (const auto& [threshold, lr] : lr_schedule) {
            if (threshold <= prev)
                throw ContractError("lr schedule thresholds must be strictly increasing");
            if (lr <= 0.0) throw ContractError("lr must be positive");
            prev = threshold;
        }
        if (lr_schedule.front().first != 0)
            throw ContractError("lr schedule must start at trace count 0");
        return lr_schedule;
    }
    long long third = total_traces / 3;
    return {{0, 1e-3}, {third, 1e-4}, {2 * third, 1e-5}};
}

TrainResult train(const models::ModelSpec& model, icnet::InferenceNetwork& net,
                  const TrainConfig& cfg, const std::function<void(const StepReport&)>& on_step,
                  const std::map<std::string, nn::Adam::Slot>* resume_adam,
                  long long resume_traces) {
    if (cfg.minibatch < 1) throw ContractError("minibatch must be >= 1");
    auto schedule = cfg.effective_schedule();
    auto lr_at = [&](long long traces) {
        double lr = schedule.front().second;
        for (const auto& [threshold, value] : schedule)
            if (traces >= threshold) lr = value;
        return lr;
    };

    nn::Adam adam(cfg.beta1, cfg.beta2, cfg.epsilon);
    if (resume_adam) adam.state() = *resume_adam;

    TrainResult result;
    result.traces_seen = resume_traces;
    long long step = 0;
    int consecutive_failures = 0;
    long long next_checkpoint = cfg.checkpoint_every > 0
                                    ? resume_traces + cfg.checkpoint_every
                                    : std::numeric_limits<long long>::max();
    auto start = std::chrono::steady_clock::now();

    while (result.traces_seen < cfg.total_traces) {
        int m = static_cast<int>(
            std::min<long long>(cfg.minibatch, cfg.total_traces - result.traces_seen));
        double lr = lr_at(result.traces_seen);
        net.params().zero_grad();

        double batch_loss = 0.0;
        bool ok = true;
        for (int i = 0; i < m; ++i) {
            RandomStream rng =
                RandomStream::substream(cfg.seed, static_cast<uint64_t>(result.traces_seen + i));
            trace::Trace tr = trace::run_model(model.model, trace::PriorSample{}, rng);
            nn::Tensor log_q = icnet::trace_log_q(net, tr, tr.observed_values(), true);
            double value = log_q.scalar_value();
            if (!std::isfinite(value)) {
                ok = false;
                break;
            }
            // Per-trace backward: batches mix trace lengths freely.
            nn::backward(log_q, -1.0 / m);
            batch_loss -= value / m;
        }
        if (ok) {
            try {
                adam.step(net.params(), lr);
            } catch (const NumericError&) {
                ok = false;
            }
        }
        result.traces_seen += m;

        if (!ok) {
            ++result.skipped_batches;
            std::cerr << "trainer: skipped non-finite batch at " << result.traces_seen
                      << " traces\n";
            if (++consecutive_failures > 10)
                throw NumericError("training aborted: more than 10 consecutive non-finite "
                                   "batches");
            continue;
        }
        consecutive_failures = 0;
        ++step;
        result.steps = step;
        result.final_loss = batch_loss;

        if (on_step) {
            double wall =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            on_step({step, result.traces_seen, batch_loss, lr, wall});
        }
        if (result.traces_seen >= next_checkpoint && !cfg.checkpoint_path.empty()) {
            icnet::save_checkpoint(net, cfg.checkpoint_path, &adam, result.traces_seen);
            next_checkpoint += cfg.checkpoint_every;
        }
    }

    if (!cfg.checkpoint_path.empty())
        icnet::save_checkpoint(net, cfg.checkpoint_path, &adam, result.traces_seen);
    return result;
}

double loss_estimate(const std::vector<trace::Trace>& batch,
                     const std::function<double(const trace::Trace&)>& trace_log_q) {
    if (batch.empty()) throw ContractError("loss_estimate of empty batch");
    double total = 0.0;
    for (const auto& tr : batch) total -= trace_log_q(tr);
    return total / batch.size();
}

double loss_estimate(const std::vector<trace::Trace>& batch, icnet::InferenceNetwork& net) {
    return loss_estimate(batch, [&](const trace::Trace& tr) {
        return icnet::trace_log_q(net, tr, tr.observed_values(), true).scalar_value();
    });
}

}  // namespace attic::trainer
