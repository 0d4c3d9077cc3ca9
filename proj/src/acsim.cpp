#include "attic/acsim.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "attic/errors.hpp"

namespace attic::acsim {

namespace {

constexpr double kShortAdmittance = 1e9;   // siemens
constexpr double kShuntRegularizer = 1e-12;

}  // namespace

char component_kind_letter(ComponentKind kind) {
    switch (kind) {
        case ComponentKind::Resistor: return 'R';
        case ComponentKind::Capacitor: return 'C';
        case ComponentKind::Inductor: return 'L';
        case ComponentKind::VacSource: return 'V';
        case ComponentKind::Short: return 'S';
    }
    return '?';
}

ComponentKind component_kind_from_letter(char letter) {
    switch (letter) {
        case 'R': return ComponentKind::Resistor;
        case 'C': return ComponentKind::Capacitor;
        case 'L': return ComponentKind::Inductor;
        case 'V': return ComponentKind::VacSource;
        case 'S': return ComponentKind::Short;
    }
    throw ContractError(std::string("unknown component kind: ") + letter);
}

Component* Netlist::find(const std::string& name) {
    for (auto& c : components)
        if (c.name == name) return &c;
    return nullptr;
}

const Component* Netlist::find(const std::string& name) const {
    return const_cast<Netlist*>(this)->find(name);
}

std::vector<std::complex<double>> ac_solve(const Netlist& net, double freq_hz) {
    if (freq_hz <= 0.0) throw ContractError("ac_solve needs freq > 0");
    if (net.node_count < 2) throw ContractError("netlist needs at least ground plus one node");
    using Cplx = std::complex<double>;

    int n_nodes = net.node_count - 1;  // ground eliminated
    int n_sources = 0;
    for (const auto& c : net.components)
        if (c.kind == ComponentKind::VacSource && c.connected) ++n_sources;

    int dim = n_nodes + n_sources;
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(dim);

    double omega = 2.0 * M_PI * freq_hz;
    auto stamp_admittance = [&](int na, int nb, Cplx y) {
        if (na > 0) a(na - 1, na - 1) += y;
        if (nb > 0) a(nb - 1, nb - 1) += y;
        if (na > 0 && nb > 0) {
            a(na - 1, nb - 1) -= y;
            a(nb - 1, na - 1) -= y;
        }
    };

    int source_row = n_nodes;
    for (const auto& c : net.components) {
        if (!c.connected) continue;
        if (c.node_a < 0 || c.node_a >= net.node_count || c.node_b < 0 ||
            c.node_b >= net.node_count)
            throw ContractError("component " + c.name + " references unknown node");
        switch (c.kind) {
            case ComponentKind::Resistor:
                if (c.value <= 0.0) throw ContractError("resistor " + c.name + " needs R > 0");
                stamp_admittance(c.node_a, c.node_b, Cplx(1.0 / c.value, 0.0));
                break;
            case ComponentKind::Capacitor:
                if (c.value <= 0.0) throw ContractError("capacitor " + c.name + " needs C > 0");
                stamp_admittance(c.node_a, c.node_b, Cplx(0.0, omega * c.value));
                break;
            case ComponentKind::Inductor:
                if (c.value <= 0.0) throw ContractError("inductor " + c.name + " needs L > 0");
                stamp_admittance(c.node_a, c.node_b, Cplx(0.0, -1.0 / (omega * c.value)));
                break;
            case ComponentKind::Short:
                stamp_admittance(c.node_a, c.node_b, Cplx(kShortAdmittance, 0.0));
                break;
            case ComponentKind::VacSource: {
                if (c.node_a > 0) {
                    a(c.node_a - 1, source_row) += 1.0;
                    a(source_row, c.node_a - 1) += 1.0;
                }
                if (c.node_b > 0) {
                    a(c.node_b - 1, source_row) -= 1.0;
                    a(source_row, c.node_b - 1) -= 1.0;
                }
                rhs(source_row) = c.value;
                ++source_row;
                break;
            }
        }
    }

    // Keeps fault configurations with floating subcircuits solvable.
    for (int i = 0; i < n_nodes; ++i) a(i, i) += kShuntRegularizer;

    Eigen::VectorXcd solution = a.partialPivLu().solve(rhs);
    std::vector<std::complex<double>> voltages(net.node_count, Cplx(0.0, 0.0));
    for (int i = 0; i < n_nodes; ++i) {
        Cplx v = solution(i);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NumericError("singular MNA system despite regularization");
        voltages[i + 1] = v;
    }
    return voltages;
}

FrequencyResponse frequency_sweep(const Netlist& net, std::span<const double> freqs,
                                  int out_node) {
    if (out_node < 0 || out_node >= net.node_count)
        throw ContractError("sweep output node out of range");
    FrequencyResponse response;
    response.freqs.assign(freqs.begin(), freqs.end());
    response.vout.reserve(freqs.size());
    for (double f : freqs) response.vout.push_back(ac_solve(net, f)[out_node]);
    return response;
}

std::string netlist_to_text(const Netlist& net) {
    std::ostringstream out;
    out.precision(17);
    out << "nodes " << net.node_count << '\n';
    for (const auto& c : net.components)
        out << component_kind_letter(c.kind) << ' ' << c.name << ' ' << c.node_a << ' '
            << c.node_b << ' ' << c.value << ' ' << (c.connected ? 1 : 0) << '\n';
    return out.str();
}

Netlist netlist_from_text(std::string_view text) {
    Netlist net;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string head;
        ls >> head;
        if (head == "nodes") {
            ls >> net.node_count;
            continue;
        }
        Component c;
        c.kind = component_kind_from_letter(head.at(0));
        int connected;
        if (!(ls >> c.name >> c.node_a >> c.node_b >> c.value >> connected))
            throw ContractError("bad netlist line: " + line);
        c.connected = connected != 0;
        net.components.push_back(std::move(c));
    }
    if (net.node_count == 0)
        for (const auto& c : net.components)
            net.node_count = std::max({net.node_count, c.node_a + 1, c.node_b + 1});
    return net;
}

std::string response_to_csv(const FrequencyResponse& response) {
    std::ostringstream out;
    out.precision(17);
    out << "freq,re,im\n";
    for (size_t i = 0; i < response.freqs.size(); ++i)
        out << response.freqs[i] << ',' << response.vout[i].real() << ','
            << response.vout[i].imag() << '\n';
    return out.str();
}

FrequencyResponse response_from_csv(std::string_view text) {
    FrequencyResponse response;
    std::istringstream in{std::string(text)};
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        double f, re, im;
        char comma;
        std::istringstream ls(line);
        if (!(ls >> f >> comma >> re >> comma >> im))
            throw ContractError("bad response CSV line: " + line);
        response.freqs.push_back(f);
        response.vout.emplace_back(re, im);
    }
    return response;
}

ButterworthCircuit butterworth_bandpass() {
    // Low-pass prototype g-values for N=5 Butterworth, band-pass transformed
    // around f0 = 10 kHz with 4 kHz bandwidth, 1 kOhm terminations.
    const double g[5] = {0.61803398874989485, 1.6180339887498949, 2.0, 1.6180339887498949,
                         0.61803398874989485};
    const double z0 = 1000.0;
    const double f0 = 10e3, bw = 4e3;
    const double w0 = 2.0 * M_PI * f0;
    const double dw = 2.0 * M_PI * bw;

    auto series_l = [&](double gk) { return gk * z0 / dw; };
    auto shunt_c = [&](double gk) { return gk / (z0 * dw); };
    auto resonant_pair = [&](double l_or_c) { return 1.0 / (w0 * w0 * l_or_c); };

    // Nodes: 0 gnd, 1 vin, 2 after rs, 3 L1/C1 mid, 4 shunt A, 5 L3/C3 mid,
    // 6 shunt B, 7 L5/C5 mid, 8 vout.
    ButterworthCircuit circuit;
    Netlist& net = circuit.netlist;
    net.node_count = 9;
    using K = ComponentKind;
    double l1 = series_l(g[0]), c1 = resonant_pair(l1);
    double c2 = shunt_c(g[1]), l2 = resonant_pair(c2);
    double l3 = series_l(g[2]), c3 = resonant_pair(l3);
    double c4 = shunt_c(g[3]), l4 = resonant_pair(c4);
    double l5 = series_l(g[4]), c5 = resonant_pair(l5);
    net.components = {
        {K::VacSource, "vsrc", 1, 0, 1.0},
        {K::Resistor, "rs", 1, 2, z0},
        {K::Inductor, "l1", 2, 3, l1},
        {K::Capacitor, "c1", 3, 4, c1},
        {K::Inductor, "l2", 4, 0, l2},
        {K::Capacitor, "c2", 4, 0, c2},
        {K::Inductor, "l3", 4, 5, l3},
        {K::Capacitor, "c3", 5, 6, c3},
        {K::Inductor, "l4", 6, 0, l4},
        {K::Capacitor, "c4", 6, 0, c4},
        {K::Inductor, "l5", 6, 7, l5},
        {K::Capacitor, "c5", 7, 8, c5},
        {K::Resistor, "rl", 8, 0, z0},
        {K::Short, "short_a", 4, 0, 0.0, false},
        {K::Short, "short_b", 6, 0, 0.0, false},
    };
    circuit.out_node = 8;
    circuit.short_names = {"short_a", "short_b"};
    return circuit;
}

std::vector<double> default_sweep_freqs(int count) {
    std::vector<double> freqs(count);
    for (int i = 0; i < count; ++i)
        freqs[i] = 1e3 * std::pow(10.0, 2.0 * i / (count - 1));
    return freqs;
}

}  // namespace attic::acsim
