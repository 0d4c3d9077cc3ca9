#include "attic/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "attic/errors.hpp"

namespace attic {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& what) {
    if (!ok) throw ContractError("invalid distribution parameters: " + what);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

std::string_view dist_kind_name(DistKind kind) {
    switch (kind) {
        case DistKind::Normal: return "normal";
        case DistKind::Uniform: return "uniform";
        case DistKind::Bernoulli: return "bernoulli";
        case DistKind::MixtureNormalUniform: return "mixnu";
        case DistKind::MixtureOfNormals: return "mixnormals";
    }
    return "?";
}

DistKind dist_kind_from_name(std::string_view name) {
    if (name == "normal") return DistKind::Normal;
    if (name == "uniform") return DistKind::Uniform;
    if (name == "bernoulli") return DistKind::Bernoulli;
    if (name == "mixnu") return DistKind::MixtureNormalUniform;
    if (name == "mixnormals") return DistKind::MixtureOfNormals;
    throw ContractError("unknown distribution kind: " + std::string(name));
}

Distribution::Distribution(DistKind kind, std::vector<double> params)
    : kind_(kind), params_(std::move(params)) {}

Distribution Distribution::normal(double mean, double std) {
    require(finite(mean) && finite(std) && std > 0.0, "Normal needs finite mean, std > 0");
    return Distribution(DistKind::Normal, {mean, std});
}

Distribution Distribution::uniform(double low, double high) {
    require(finite(low) && finite(high) && high > low, "Uniform needs high > low");
    return Distribution(DistKind::Uniform, {low, high});
}

Distribution Distribution::bernoulli(double p) {
    require(finite(p) && p >= 0.0 && p <= 1.0, "Bernoulli needs p in [0, 1]");
    return Distribution(DistKind::Bernoulli, {p});
}

Distribution Distribution::mixture_normal_uniform(double weight_normal, double mean, double std,
                                                  double low, double high) {
    require(finite(weight_normal) && weight_normal >= 0.0 && weight_normal <= 1.0,
            "mixture weight in [0, 1]");
    require(finite(mean) && finite(std) && std > 0.0, "normal component needs std > 0");
    require(finite(low) && finite(high) && high > low, "uniform component needs high > low");
    return Distribution(DistKind::MixtureNormalUniform, {weight_normal, mean, std, low, high});
}

Distribution Distribution::mixture_of_normals(std::vector<double> weights,
                                              std::vector<double> means,
                                              std::vector<double> stds) {
    size_t n = weights.size();
    require(n >= 1 && means.size() == n && stds.size() == n,
            "mixture components must have equal nonzero length");
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
        require(finite(weights[i]) && weights[i] >= 0.0, "mixture weights nonnegative");
        require(finite(means[i]) && finite(stds[i]) && stds[i] > 0.0, "component std > 0");
        total += weights[i];
    }
    require(std::abs(total - 1.0) <= 1e-9, "mixture weights must sum to 1");
    std::vector<double> params;
    params.reserve(3 * n);
    params.insert(params.end(), weights.begin(), weights.end());
    params.insert(params.end(), means.begin(), means.end());
    params.insert(params.end(), stds.begin(), stds.end());
    return Distribution(DistKind::MixtureOfNormals, std::move(params));
}

double Distribution::sample(RandomStream& rng) const {
    switch (kind_) {
        case DistKind::Normal:
            return rng.normal(params_[0], params_[1]);
        case DistKind::Uniform:
            return rng.uniform(params_[0], params_[1]);
        case DistKind::Bernoulli:
            return rng.bernoulli(params_[0]) ? 1.0 : 0.0;
        case DistKind::MixtureNormalUniform:
            if (rng.bernoulli(params_[0])) return rng.normal(params_[1], params_[2]);
            return rng.uniform(params_[3], params_[4]);
        case DistKind::MixtureOfNormals: {
            size_t n = params_.size() / 3;
            std::vector<double> w(params_.begin(), params_.begin() + n);
            int i = rng.categorical(w);
            return rng.normal(params_[n + i], params_[2 * n + i]);
        }
    }
    return 0.0;
}

double Distribution::log_pdf(double x) const {
    switch (kind_) {
        case DistKind::Normal:
            return normal_log_density(x, params_[0], params_[1]);
        case DistKind::Uniform:
            // Exact boundary points count as inside support.
            if (x < params_[0] || x > params_[1]) return neg_inf;
            return -std::log(params_[1] - params_[0]);
        case DistKind::Bernoulli: {
            double p = params_[0];
            if (x == 1.0) return std::log(p);
            if (x == 0.0) return std::log(1.0 - p);
            return neg_inf;
        }
        case DistKind::MixtureNormalUniform: {
            double w = params_[0];
            double lp_n = (w > 0.0) ? std::log(w) + normal_log_density(x, params_[1], params_[2])
                                    : neg_inf;
            double lp_u = neg_inf;
            if (w < 1.0 && x >= params_[3] && x <= params_[4])
                lp_u = std::log(1.0 - w) - std::log(params_[4] - params_[3]);
            return log_sum_exp({lp_n, lp_u});
        }
        case DistKind::MixtureOfNormals: {
            size_t n = params_.size() / 3;
            std::vector<double> terms(n);
            for (size_t i = 0; i < n; ++i) {
                terms[i] = (params_[i] > 0.0)
                               ? std::log(params_[i]) +
                                     normal_log_density(x, params_[n + i], params_[2 * n + i])
                               : neg_inf;
            }
            return log_sum_exp(terms);
        }
    }
    return neg_inf;
}

double Distribution::mean() const {
    switch (kind_) {
        case DistKind::Normal: return params_[0];
        case DistKind::Uniform: return 0.5 * (params_[0] + params_[1]);
        case DistKind::Bernoulli: return params_[0];
        case DistKind::MixtureNormalUniform:
            return params_[0] * params_[1] + (1.0 - params_[0]) * 0.5 * (params_[3] + params_[4]);
        case DistKind::MixtureOfNormals: {
            size_t n = params_.size() / 3;
            double m = 0.0;
            for (size_t i = 0; i < n; ++i) m += params_[i] * params_[n + i];
            return m;
        }
    }
    return 0.0;
}

double Distribution::stddev() const {
    switch (kind_) {
        case DistKind::Normal: return params_[1];
        case DistKind::Uniform: return (params_[1] - params_[0]) / std::sqrt(12.0);
        case DistKind::Bernoulli: return std::sqrt(params_[0] * (1.0 - params_[0]));
        case DistKind::MixtureNormalUniform: {
            double w = params_[0];
            double mu = params_[1], sd = params_[2];
            double mu_u = 0.5 * (params_[3] + params_[4]);
            double var_u = (params_[4] - params_[3]) * (params_[4] - params_[3]) / 12.0;
            double m = mean();
            double second = w * (sd * sd + mu * mu) + (1.0 - w) * (var_u + mu_u * mu_u);
            return std::sqrt(std::max(second - m * m, 0.0));
        }
        case DistKind::MixtureOfNormals: {
            size_t n = params_.size() / 3;
            double m = mean();
            double second = 0.0;
            for (size_t i = 0; i < n; ++i) {
                double mu = params_[n + i], sd = params_[2 * n + i];
                second += params_[i] * (sd * sd + mu * mu);
            }
            return std::sqrt(std::max(second - m * m, 0.0));
        }
    }
    return 0.0;
}

std::string Distribution::describe() const {
    std::ostringstream out;
    out.precision(17);
    out << dist_kind_name(kind_);
    for (double p : params_) out << ' ' << p;
    return out.str();
}

Distribution Distribution::parse(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string tag;
    in >> tag;
    std::vector<double> params;
    double v;
    while (in >> v) params.push_back(v);
    auto need = [&](size_t n) {
        if (params.size() != n)
            throw ContractError("distribution '" + tag + "' expects " + std::to_string(n) +
                                " parameters, got " + std::to_string(params.size()));
    };
    switch (dist_kind_from_name(tag)) {
        case DistKind::Normal: need(2); return normal(params[0], params[1]);
        case DistKind::Uniform: need(2); return uniform(params[0], params[1]);
        case DistKind::Bernoulli: need(1); return bernoulli(params[0]);
        case DistKind::MixtureNormalUniform:
            need(5);
            return mixture_normal_uniform(params[0], params[1], params[2], params[3], params[4]);
        case DistKind::MixtureOfNormals: {
            if (params.size() % 3 != 0 || params.empty())
                throw ContractError("mixnormals expects 3k parameters");
            size_t n = params.size() / 3;
            return mixture_of_normals({params.begin(), params.begin() + n},
                                      {params.begin() + n, params.begin() + 2 * n},
                                      {params.begin() + 2 * n, params.end()});
        }
    }
    throw ContractError("unreachable");
}

double log_sum_exp(const std::vector<double>& values) {
    double max_v = neg_inf;
    for (double v : values) max_v = std::max(max_v, v);
    if (!std::isfinite(max_v)) return max_v;
    double acc = 0.0;
    for (double v : values) acc += std::exp(v - max_v);
    return max_v + std::log(acc);
}

}  // namespace attic
