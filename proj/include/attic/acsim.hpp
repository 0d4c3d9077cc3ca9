#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

namespace attic::acsim {

enum class ComponentKind { Resistor, Capacitor, Inductor, VacSource, Short };

char component_kind_letter(ComponentKind kind);
ComponentKind component_kind_from_letter(char letter);

struct Component {
    ComponentKind kind;
    std::string name;
    int node_a;
    int node_b;
    double value;  // ohms / farads / henries / volts; ignored for Short
    bool connected = true;
};

// Node 0 is ground. Disconnected components stamp nothing; Short components
// stamp a large admittance so matrix dimensions stay fixed across fault
// configurations.
struct Netlist {
    int node_count = 0;
    std::vector<Component> components;

    Component* find(const std::string& name);
    const Component* find(const std::string& name) const;
};

// Complex node voltages (index = node id, ground included as 0) from modified
// nodal analysis at one frequency. Every node carries a tiny shunt admittance
// to ground so floating subcircuits stay solvable.
std::vector<std::complex<double>> ac_solve(const Netlist& net, double freq_hz);

struct FrequencyResponse {
    std::vector<double> freqs;               // Hz
    std::vector<std::complex<double>> vout;  // aligned with freqs
};

FrequencyResponse frequency_sweep(const Netlist& net, std::span<const double> freqs,
                                  int out_node);

// Line-oriented text form: "kind name node_a node_b value connected".
std::string netlist_to_text(const Netlist& net);
Netlist netlist_from_text(std::string_view text);

// CSV form "freq,re,im".
std::string response_to_csv(const FrequencyResponse& response);
FrequencyResponse response_from_csv(std::string_view text);

// Reference fifth-order band-pass Butterworth ladder (1 kOhm terminations,
// 10 kHz center, 4 kHz bandwidth) with short-circuit locations across the two
// shunt branches.
struct ButterworthCircuit {
    Netlist netlist;
    int out_node;
    std::vector<std::string> short_names;  // inactive Short components in the netlist
};
ButterworthCircuit butterworth_bandpass();

// Default 40-point log-spaced observation grid, 1 kHz .. 100 kHz.
std::vector<double> default_sweep_freqs(int count = 40);

}  // namespace attic::acsim
