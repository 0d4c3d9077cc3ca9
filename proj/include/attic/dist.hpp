#pragma once

#include <string>
#include <vector>

#include "attic/rng.hpp"

namespace attic {

enum class DistKind {
    Normal,
    Uniform,
    Bernoulli,
    MixtureNormalUniform,
    MixtureOfNormals,  // proposal-side only
};

std::string_view dist_kind_name(DistKind kind);
DistKind dist_kind_from_name(std::string_view name);

// Immutable scalar distribution used by both generative models and proposals.
// Bernoulli outcomes are encoded as 0.0 / 1.0 so a single value type serves
// every trace entry.
class Distribution {
public:
    static Distribution normal(double mean, double std);
    static Distribution uniform(double low, double high);
    static Distribution bernoulli(double p);
    // weight_normal * Normal(mean, std) + (1 - weight_normal) * Uniform(low, high)
    static Distribution mixture_normal_uniform(double weight_normal, double mean, double std,
                                               double low, double high);
    static Distribution mixture_of_normals(std::vector<double> weights, std::vector<double> means,
                                           std::vector<double> stds);

    DistKind kind() const { return kind_; }

    double sample(RandomStream& rng) const;
    double log_pdf(double x) const;

    // Analytic first and second moments, used for input/output standardization.
    double mean() const;
    double stddev() const;

    // Raw parameters in a fixed per-kind order (Normal: mean, std; Uniform:
    // low, high; Bernoulli: p; MixtureNormalUniform: w, mean, std, low, high;
    // MixtureOfNormals: w..., mean..., std...).
    const std::vector<double>& params() const { return params_; }

    // Text form "kind p0 p1 ..." for trace serialization.
    std::string describe() const;
    static Distribution parse(std::string_view text);

    bool operator==(const Distribution& other) const {
        return kind_ == other.kind_ && params_ == other.params_;
    }

private:
    Distribution(DistKind kind, std::vector<double> params);

    DistKind kind_;
    std::vector<double> params_;
};

inline double normal_log_density(double x, double mean, double std) {
    static constexpr double half_log_two_pi = 0.91893853320467274178;
    double z = (x - mean) / std;
    return -0.5 * z * z - std::log(std) - half_log_two_pi;
}

double log_sum_exp(const std::vector<double>& values);

}  // namespace attic
