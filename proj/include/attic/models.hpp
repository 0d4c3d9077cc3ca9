#pragma once

#include <functional>
#include <string>
#include <vector>

#include "attic/acsim.hpp"
#include "attic/trace.hpp"

namespace attic::models {

// Model paired with the metadata the inference stack needs: the fixed
// observation count and a typical observation magnitude used to standardize
// network inputs.
struct ModelSpec {
    std::string name;
    trace::Model model;
    int observation_count;
    double observation_scale;
};

// ---------------------------------------------------------------------------
// Magnitude of a random vector: x, M nuisance draws, y, all N(0, sigma_p);
// observe r^2 with likelihood N(x^2 + y^2, sigma_l).

struct MagnitudeConfig {
    double sigma_p = 10.0;
    double sigma_l = 0.5;   // preset "listing" variant uses 0.1
    int nuisance = 10;
};

trace::Model magnitude_model(const MagnitudeConfig& cfg);
ModelSpec magnitude_spec(const MagnitudeConfig& cfg = {});

// ---------------------------------------------------------------------------
// Battery + possibly faulty resistor; observe a noisy current measurement.
// Trace has three latents (V, F, R) with R's address depending on F.

struct ResistorConfig {
    double v_mean = 5.0;
    double v_std = 0.2;
    double fault_prior = 0.05;
    double r_nominal = 1000.0;
    double r_std = 10.0;
    double r_low = 100.0;
    double r_high = 10000.0;
    double obs_noise_std = 0.001;
};

trace::Model simple_resistor_model(const ResistorConfig& cfg);
ModelSpec resistor_spec(const ResistorConfig& cfg = {});

// ---------------------------------------------------------------------------
// Butterworth fault model: per component sample connectivity then value
// (98% tight Gaussian / 2% broad uniform, both centered on nominal), per
// dashed location an active-short flag; observe the complex sweep output.

struct CircuitModelConfig {
    acsim::Netlist netlist;  // nominal values; Short entries are the dashed locations
    int out_node = 0;
    std::vector<double> freqs;
    double connect_prior = 0.99;
    double short_prior = 0.01;
    double weight_normal = 0.98;
    double tight_std_frac = 0.001;  // fault threshold 0.3% = 3 sigma
    double broad_frac = 0.5;        // uniform support nominal * (1 +- broad_frac)
    double obs_noise_std = 0.0;     // 0 = 1% of nominal mid-band amplitude

    static CircuitModelConfig butterworth_default();
};

trace::Model circuit_fault_model(const CircuitModelConfig& cfg);
ModelSpec circuit_spec(const CircuitModelConfig& cfg);

// Nominal (fault-free) sweep of the configured netlist.
acsim::FrequencyResponse nominal_response(const CircuitModelConfig& cfg);

// Sweep implied by the latents of one trace of the circuit model.
acsim::FrequencyResponse trace_response(const CircuitModelConfig& cfg,
                                        const trace::Trace& trace);

// Indicator functions for fault reporting: component value outside tolerance,
// component disconnected, short active.
struct FaultQuery {
    std::string component;
    std::string metric;  // "value_fault" | "disconnected" | "short"
    std::function<double(const trace::Trace&)> indicator;
};
std::vector<FaultQuery> circuit_fault_queries(const CircuitModelConfig& cfg,
                                              double tolerance = 0.003);

}  // namespace attic::models
