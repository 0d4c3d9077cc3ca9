#include "attic/sis.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "attic/errors.hpp"
#include "attic/io.hpp"

namespace attic::sis {

std::vector<double> WeightedSampleSet::normalized_weights() const {
    double max_lw = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples) max_lw = std::max(max_lw, s.log_weight);
    if (!std::isfinite(max_lw))
        throw NumericError("all importance weights are zero-probability");
    std::vector<double> w(samples.size());
    double total = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        w[i] = std::exp(samples[i].log_weight - max_lw);
        total += w[i];
    }
    for (double& v : w) v /= total;
    return w;
}

WeightedSampleSet run_guided(const models::ModelSpec& model, const GuideFactory& make_guide,
                             std::span<const double> observations, int k, uint64_t seed,
                             int threads) {
    if (k < 1) throw ContractError("run_guided needs K >= 1");
    WeightedSampleSet set;
    set.observations.assign(observations.begin(), observations.end());
    set.samples.resize(k);

    auto run_range = [&](int begin, int end) {
        auto guide = make_guide();
        for (int i = begin; i < end; ++i) {
            RandomStream rng = RandomStream::substream(seed, static_cast<uint64_t>(i));
            trace::Guided mode{guide.get(), set.observations};
            trace::Trace tr = trace::run_model(model.model, mode, rng);
            double lw = tr.log_weight.value_or(0.0);
            set.samples[i] = {std::move(tr), lw};
        }
    };

    threads = std::max(1, std::min(threads, k));
    if (threads == 1) {
        run_range(0, k);
    } else {
        std::vector<std::thread> pool;
        int chunk = (k + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            int begin = t * chunk;
            int end = std::min(k, begin + chunk);
            if (begin < end) pool.emplace_back(run_range, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    return set;
}

double ess(const WeightedSampleSet& set) {
    if (set.samples.empty()) throw ContractError("ess of empty sample set");
    double max_lw = -std::numeric_limits<double>::infinity();
    for (const auto& s : set.samples) max_lw = std::max(max_lw, s.log_weight);
    if (!std::isfinite(max_lw))
        throw NumericError("ESS undefined: all weights are zero-probability");
    double s1 = 0.0, s2 = 0.0;
    for (const auto& s : set.samples) {
        double w = std::exp(s.log_weight - max_lw);
        s1 += w;
        s2 += w * w;
    }
    return s1 * s1 / s2;
}

std::vector<double> posterior_expectation(
    const WeightedSampleSet& set,
    const std::function<std::vector<double>(const trace::Trace&)>& g) {
    std::vector<double> weights = set.normalized_weights();
    std::vector<double> estimate;
    for (size_t i = 0; i < set.samples.size(); ++i) {
        std::vector<double> gi = g(set.samples[i].trace);
        if (estimate.empty()) estimate.assign(gi.size(), 0.0);
        if (gi.size() != estimate.size()) throw ContractError("g returned ragged vectors");
        for (size_t j = 0; j < gi.size(); ++j) estimate[j] += weights[i] * gi[j];
    }
    return estimate;
}

EssReport ess_report(const models::ModelSpec& model, const GuideFactory& make_guide,
                     const std::vector<std::vector<double>>& observations, int repeats, int k,
                     uint64_t seed, int threads) {
    if (repeats < 1) throw ContractError("ess_report needs repeats >= 1");
    EssReport report;
    report.repeats = repeats;
    report.k = k;
    double total = 0.0;
    for (size_t o = 0; o < observations.size(); ++o) {
        std::vector<double> values(repeats);
        for (int r = 0; r < repeats; ++r) {
            uint64_t run_seed = splitmix64(seed) ^ splitmix64(o * 1000003ull + r);
            values[r] = ess(run_guided(model, make_guide, observations[o], k, run_seed, threads));
        }
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= repeats;
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        double sd = repeats > 1 ? std::sqrt(var / (repeats - 1)) : 0.0;
        report.rows.push_back({static_cast<int>(o), mean, sd});
        total += mean;
    }
    report.overall_mean = observations.empty() ? 0.0 : total / observations.size();
    return report;
}

std::string weighted_samples_csv(const WeightedSampleSet& set) {
    std::vector<std::string> columns;
    for (const auto& s : set.samples)
        for (const auto& e : s.trace.entries) {
            std::string key = e.address + "#" + std::to_string(e.instance);
            if (std::find(columns.begin(), columns.end(), key) == columns.end())
                columns.push_back(key);
        }
    std::string out = "log_weight";
    for (const auto& c : columns) out += "," + c;
    out += "\n";
    for (const auto& s : set.samples) {
        out += io::format_double(s.log_weight);
        for (const auto& c : columns) {
            out += ",";
            auto hash = c.rfind('#');
            const auto* e = s.trace.find(c.substr(0, hash), std::stoi(c.substr(hash + 1)));
            if (e) out += io::format_double(e->value);
        }
        out += "\n";
    }
    return out;
}

}  // namespace attic::sis
