#include "attic/models.hpp"

#include <cmath>

#include "attic/errors.hpp"

namespace attic::models {

trace::Model magnitude_model(const MagnitudeConfig& cfg) {
    if (cfg.sigma_p <= 0.0 || cfg.sigma_l <= 0.0 || cfg.nuisance < 0)
        throw ContractError("magnitude model needs positive sigmas, nuisance >= 0");
    return [cfg](trace::Ctx& ctx) {
        double x = ctx.sample("x", Distribution::normal(0.0, cfg.sigma_p));
        // Distinct addresses so every nuisance draw gets its own embedders.
        for (int i = 0; i < cfg.nuisance; ++i)
            ctx.sample("nuisance_" + std::to_string(i), Distribution::normal(0.0, cfg.sigma_p));
        double y = ctx.sample("y", Distribution::normal(0.0, cfg.sigma_p));
        ctx.observe("r2", Distribution::normal(x * x + y * y, cfg.sigma_l));
    };
}

ModelSpec magnitude_spec(const MagnitudeConfig& cfg) {
    // Typical observed magnitude: E[x^2 + y^2] = 2 sigma_p^2.
    return {"magnitude", magnitude_model(cfg), 1, 2.0 * cfg.sigma_p * cfg.sigma_p};
}

trace::Model simple_resistor_model(const ResistorConfig& cfg) {
    return [cfg](trace::Ctx& ctx) {
        double v = ctx.sample("v", Distribution::normal(cfg.v_mean, cfg.v_std));
        double faulty = ctx.sample("f", Distribution::bernoulli(cfg.fault_prior));
        double r = faulty == 1.0
                       ? ctx.sample("r_faulty", Distribution::uniform(cfg.r_low, cfg.r_high))
                       : ctx.sample("r_ok", Distribution::normal(cfg.r_nominal, cfg.r_std));
        ctx.observe("measured_current", Distribution::normal(v / r, cfg.obs_noise_std));
    };
}

ModelSpec resistor_spec(const ResistorConfig& cfg) {
    return {"resistor", simple_resistor_model(cfg), 1, cfg.v_mean / cfg.r_nominal};
}

CircuitModelConfig CircuitModelConfig::butterworth_default() {
    CircuitModelConfig cfg;
    auto circuit = acsim::butterworth_bandpass();
    cfg.netlist = std::move(circuit.netlist);
    cfg.out_node = circuit.out_node;
    cfg.freqs = acsim::default_sweep_freqs();
    return cfg;
}

namespace {

double mid_band_amplitude(const CircuitModelConfig& cfg) {
    auto response = nominal_response(cfg);
    double peak = 0.0;
    for (const auto& v : response.vout) peak = std::max(peak, std::abs(v));
    return peak;
}

double noise_std(const CircuitModelConfig& cfg) {
    return cfg.obs_noise_std > 0.0 ? cfg.obs_noise_std : 0.01 * mid_band_amplitude(cfg);
}

Distribution value_prior(const CircuitModelConfig& cfg, double nominal) {
    return Distribution::mixture_normal_uniform(
        cfg.weight_normal, nominal, cfg.tight_std_frac * nominal,
        nominal * (1.0 - cfg.broad_frac), nominal * (1.0 + cfg.broad_frac));
}

bool faultable(const acsim::Component& c) {
    return c.kind != acsim::ComponentKind::VacSource && c.kind != acsim::ComponentKind::Short;
}

}  // namespace

trace::Model circuit_fault_model(const CircuitModelConfig& cfg) {
    double sigma = noise_std(cfg);
    return [cfg, sigma](trace::Ctx& ctx) {
        acsim::Netlist net = cfg.netlist;
        for (auto& comp : net.components) {
            if (comp.kind == acsim::ComponentKind::VacSource) continue;
            if (comp.kind == acsim::ComponentKind::Short) {
                comp.connected =
                    ctx.sample(comp.name, Distribution::bernoulli(cfg.short_prior)) == 1.0;
                continue;
            }
            comp.connected = ctx.sample(comp.name + "_connected",
                                        Distribution::bernoulli(cfg.connect_prior)) == 1.0;
            comp.value = ctx.sample(comp.name + "_value", value_prior(cfg, comp.value));
        }
        auto response = acsim::frequency_sweep(net, cfg.freqs, cfg.out_node);
        for (size_t i = 0; i < response.vout.size(); ++i) {
            ctx.observe("vout_re_" + std::to_string(i),
                        Distribution::normal(response.vout[i].real(), sigma));
            ctx.observe("vout_im_" + std::to_string(i),
                        Distribution::normal(response.vout[i].imag(), sigma));
        }
    };
}

ModelSpec circuit_spec(const CircuitModelConfig& cfg) {
    return {"circuit", circuit_fault_model(cfg), 2 * static_cast<int>(cfg.freqs.size()),
            mid_band_amplitude(cfg)};
}

acsim::FrequencyResponse nominal_response(const CircuitModelConfig& cfg) {
    return acsim::frequency_sweep(cfg.netlist, cfg.freqs, cfg.out_node);
}

acsim::FrequencyResponse trace_response(const CircuitModelConfig& cfg,
                                        const trace::Trace& trace) {
    acsim::Netlist net = cfg.netlist;
    for (auto& comp : net.components) {
        if (comp.kind == acsim::ComponentKind::VacSource) continue;
        if (comp.kind == acsim::ComponentKind::Short) {
            const auto* on = trace.find(comp.name, 1);
            if (!on) throw ModelError("trace missing short site " + comp.name);
            comp.connected = on->value == 1.0;
            continue;
        }
        const auto* connected = trace.find(comp.name + "_connected", 1);
        const auto* value = trace.find(comp.name + "_value", 1);
        if (!connected || !value)
            throw ModelError("trace missing sites for component " + comp.name);
        comp.connected = connected->value == 1.0;
        comp.value = value->value;
    }
    return acsim::frequency_sweep(net, cfg.freqs, cfg.out_node);
}

std::vector<FaultQuery> circuit_fault_queries(const CircuitModelConfig& cfg, double tolerance) {
    std::vector<FaultQuery> queries;
    for (const auto& comp : cfg.netlist.components) {
        if (comp.kind == acsim::ComponentKind::Short) {
            queries.push_back({comp.name, "short", [name = comp.name](const trace::Trace& t) {
                                   const auto* e = t.find(name, 1);
                                   return (e && e->value == 1.0) ? 1.0 : 0.0;
                               }});
            continue;
        }
        if (!faultable(comp)) continue;
        double nominal = comp.value;
        queries.push_back({comp.name, "value_fault",
                           [address = comp.name + "_value", nominal,
                            tolerance](const trace::Trace& t) {
                               const auto* e = t.find(address, 1);
                               if (!e) return 0.0;
                               return std::abs(e->value - nominal) > tolerance * nominal ? 1.0
                                                                                         : 0.0;
                           }});
        queries.push_back({comp.name, "disconnected",
                           [address = comp.name + "_connected"](const trace::Trace& t) {
                               const auto* e = t.find(address, 1);
                               return (e && e->value == 0.0) ? 1.0 : 0.0;
                           }});
    }
    return queries;
}

}  // namespace attic::models
