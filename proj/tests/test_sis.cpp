#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "attic/errors.hpp"
#include "attic/icnet.hpp"
#include "attic/models.hpp"
#include "attic/sis.hpp"
#include "attic/trainer.hpp"

using namespace attic;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// x ~ N(mu0, s0), y ~ N(x, sy): closed-form Gaussian posterior.
struct Conjugate {
    double mu0 = 2.0, s0 = 1.0, sy = 0.5;

    models::ModelSpec spec() const {
        auto model = [*this](trace::Ctx& ctx) {
            double x = ctx.sample("x", Distribution::normal(mu0, s0));
            ctx.observe("y", Distribution::normal(x, sy));
        };
        return {"conjugate", model, 1, std::abs(mu0) + s0};
    }
    double posterior_var() const { return 1.0 / (1.0 / (s0 * s0) + 1.0 / (sy * sy)); }
    double posterior_mean(double y) const {
        return posterior_var() * (mu0 / (s0 * s0) + y / (sy * sy));
    }
};

sis::WeightedSampleSet set_with_log_weights(std::vector<double> log_weights) {
    sis::WeightedSampleSet set;
    for (double lw : log_weights) set.samples.push_back({trace::Trace{}, lw});
    return set;
}

sis::GuideFactory prior_factory() {
    return [] { return std::make_unique<sis::PriorGuide>(); };
}

}  // namespace

TEST_CASE("ess unit oracles") {
    CHECK(sis::ess(set_with_log_weights({0.5, 0.5, 0.5, 0.5})) == doctest::Approx(4.0));
    CHECK(sis::ess(set_with_log_weights({2.0, -kInf, -kInf})) == doctest::Approx(1.0));
    // weights [2, 1, 1] -> 16/6
    CHECK(sis::ess(set_with_log_weights({std::log(2.0), 0.0, 0.0})) ==
          doctest::Approx(16.0 / 6.0).epsilon(1e-12));
    CHECK_THROWS_AS(sis::ess(set_with_log_weights({-kInf, -kInf})), NumericError);
    CHECK_THROWS_AS(sis::ess(sis::WeightedSampleSet{}), ContractError);
}

TEST_CASE("ess bounds and shift invariance") {
    RandomStream rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        int k = 1 + static_cast<int>(rng.uniform01() * 20);
        std::vector<double> lw(k);
        for (double& v : lw) v = rng.uniform(-50, 50);
        double base = sis::ess(set_with_log_weights(lw));
        CHECK(base >= 1.0 - 1e-12);
        CHECK(base <= k + 1e-12);
        std::vector<double> shifted = lw;
        for (double& v : shifted) v += 123.456;
        CHECK(std::abs(sis::ess(set_with_log_weights(shifted)) - base) < 1e-10);
    }
}

TEST_CASE("prior proposal reduces to likelihood weighting") {
    auto spec = models::resistor_spec({});
    auto set = sis::run_guided(spec, prior_factory(), std::vector<double>{0.005}, 50, 7);
    REQUIRE(set.samples.size() == 50);
    for (const auto& s : set.samples)
        CHECK(s.log_weight == doctest::Approx(s.trace.log_likelihood()).epsilon(1e-12));
}

TEST_CASE("run_guided contracts") {
    auto spec = models::resistor_spec({});
    CHECK_THROWS_AS(sis::run_guided(spec, prior_factory(), std::vector<double>{0.005}, 0, 1),
                    ContractError);
    // Threaded run reproduces the serial particle set exactly.
    auto serial = sis::run_guided(spec, prior_factory(), std::vector<double>{0.005}, 64, 11, 1);
    auto threaded = sis::run_guided(spec, prior_factory(), std::vector<double>{0.005}, 64, 11, 4);
    for (size_t i = 0; i < serial.samples.size(); ++i)
        CHECK(serial.samples[i].log_weight == threaded.samples[i].log_weight);
}

TEST_CASE("conjugate posterior mean within three standard errors at K=1e5") {
    Conjugate model;
    auto spec = model.spec();
    double y = 3.1;
    auto set = sis::run_guided(spec, prior_factory(), std::vector<double>{y}, 100000, 17);
    auto weights = set.normalized_weights();

    double mean = 0.0;
    for (size_t i = 0; i < set.samples.size(); ++i)
        mean += weights[i] * set.samples[i].trace.entries[0].value;
    double se2 = 0.0;
    for (size_t i = 0; i < set.samples.size(); ++i) {
        double d = set.samples[i].trace.entries[0].value - mean;
        se2 += weights[i] * weights[i] * d * d;
    }
    double se = std::sqrt(se2);
    CHECK(std::abs(mean - model.posterior_mean(y)) < 3.0 * se);
    CHECK(se < 0.05);
}

TEST_CASE("posterior_expectation basics and indicator probabilities") {
    Conjugate model;
    auto spec = model.spec();
    double y = 1.4;
    auto set = sis::run_guided(spec, prior_factory(), std::vector<double>{y}, 100000, 23);

    auto constant = sis::posterior_expectation(
        set, [](const trace::Trace&) { return std::vector<double>{7.25}; });
    CHECK(constant[0] == doctest::Approx(7.25).epsilon(1e-12));

    // P(x > posterior mean) = 1/2, P(x > mean + sd) = 1 - Phi(1).
    double m = model.posterior_mean(y);
    double sd = std::sqrt(model.posterior_var());
    auto probs = sis::posterior_expectation(set, [&](const trace::Trace& t) {
        double x = t.entries[0].value;
        return std::vector<double>{x > m ? 1.0 : 0.0, x > m + sd ? 1.0 : 0.0};
    });
    CHECK(probs[0] == doctest::Approx(0.5).epsilon(0.03));
    CHECK(probs[1] == doctest::Approx(1.0 - 0.841344746).epsilon(0.05));
}

TEST_CASE("estimates converge as K grows") {
    Conjugate model;
    auto spec = model.spec();
    double y = 2.5;
    double target = model.posterior_mean(y);
    auto mean_abs_error = [&](int k, uint64_t seed_base) {
        double acc = 0.0;
        const int repeats = 24;
        for (int r = 0; r < repeats; ++r) {
            auto set = sis::run_guided(spec, prior_factory(), std::vector<double>{y}, k,
                                       seed_base + r);
            auto w = set.normalized_weights();
            double mean = 0.0;
            for (size_t i = 0; i < set.samples.size(); ++i)
                mean += w[i] * set.samples[i].trace.entries[0].value;
            acc += std::abs(mean - target);
        }
        return acc / repeats;
    };
    double err_k = mean_abs_error(2000, 100);
    double err_4k = mean_abs_error(8000, 500);
    // Quadrupling K should roughly halve the error.
    CHECK(err_k / err_4k > 1.4);
    CHECK(err_k / err_4k < 3.0);
}

TEST_CASE("incremental log weight equals log_joint minus post-hoc log q") {
    auto spec = models::resistor_spec({});
    icnet::InferenceNetwork net(icnet::ArchitectureConfig::from_name("lstm-att"), 1,
                                spec.observation_scale, 41);
    // Touch the registry so guided runs use real proposals.
    for (int i = 0; i < 20; ++i) {
        RandomStream rng(300 + i);
        trace::Trace tr = trace::run_model(spec.model, trace::PriorSample{}, rng);
        icnet::trace_log_q(net, tr, tr.observed_values(), true);
    }

    icnet::NetworkGuide guide(net);
    for (int i = 0; i < 25; ++i) {
        RandomStream rng(9000 + i);
        trace::Trace tr =
            trace::run_model(spec.model, trace::Guided{&guide, {0.0048}}, rng);
        REQUIRE(tr.log_weight.has_value());
        double log_q =
            icnet::trace_log_q(net, tr, std::vector<double>{0.0048}, false).scalar_value();
        CHECK(*tr.log_weight == doctest::Approx(tr.log_joint() - log_q).epsilon(1e-10));
    }
}

TEST_CASE("ess_report shapes and degenerate single run") {
    auto spec = models::resistor_spec({});
    std::vector<std::vector<double>> observations = {{0.005}, {0.006}, {0.02}};
    auto report = sis::ess_report(spec, prior_factory(), observations, 5, 20, 31);
    REQUIRE(report.rows.size() == 3);
    double total = 0.0;
    for (const auto& row : report.rows) {
        CHECK(row.mean_ess >= 1.0);
        CHECK(row.mean_ess <= 20.0);
        CHECK(row.std_ess >= 0.0);
        total += row.mean_ess;
    }
    CHECK(report.overall_mean == doctest::Approx(total / 3.0));

    auto degenerate = sis::ess_report(spec, prior_factory(), {{0.005}}, 1, 20, 31);
    REQUIRE(degenerate.rows.size() == 1);
    CHECK(degenerate.rows[0].std_ess == 0.0);
}

TEST_CASE("weighted sample CSV flattens branching traces into a column union") {
    auto spec = models::resistor_spec({});
    auto set = sis::run_guided(spec, prior_factory(), std::vector<double>{0.005}, 400, 51);
    std::string csv = sis::weighted_samples_csv(set);
    std::string header = csv.substr(0, csv.find('\n'));
    CHECK(header.find("log_weight") == 0);
    CHECK(header.find("v#1") != std::string::npos);
    CHECK(header.find("f#1") != std::string::npos);
    // With 400 prior draws both branches appear.
    CHECK(header.find("r_ok#1") != std::string::npos);
    CHECK(header.find("r_faulty#1") != std::string::npos);
    // Every faulty row leaves the r_ok cell empty and vice versa.
    size_t rows = std::count(csv.begin(), csv.end(), '\n') - 1;
    CHECK(rows == 400);
}
