#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "attic/acsim.hpp"
#include "attic/errors.hpp"

using namespace attic;
using acsim::Component;
using acsim::ComponentKind;
using acsim::Netlist;
using Cplx = std::complex<double>;

namespace {

// Independent analytic route: ABCD (transmission) matrices for ladder
// networks. H = Vout/Vsource with the source resistance folded into the
// cascade and the load shunted at the output.
struct Abcd {
    Cplx a{1, 0}, b{0, 0}, c{0, 0}, d{1, 0};

    Abcd then(const Abcd& next) const {
        return {a * next.a + b * next.c, a * next.b + b * next.d,
                c * next.a + d * next.c, c * next.b + d * next.d};
    }
    static Abcd series(Cplx z) { return {{1, 0}, z, {0, 0}, {1, 0}}; }
    static Abcd shunt(Cplx y) { return {{1, 0}, {0, 0}, y, {1, 0}}; }

    Cplx transfer(Cplx z_load) const { return z_load / (a * z_load + b); }
};

Cplx z_r(double r) { return {r, 0}; }
Cplx z_l(double l, double w) { return {0, w * l}; }
Cplx z_c(double c, double w) { return {0, -1.0 / (w * c)}; }

double rel_err(Cplx got, Cplx want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-30);
}

}  // namespace

TEST_CASE("resistive divider midpoint") {
    Netlist net;
    net.node_count = 3;
    net.components = {{ComponentKind::VacSource, "v", 1, 0, 1.0},
                      {ComponentKind::Resistor, "r1", 1, 2, 470.0},
                      {ComponentKind::Resistor, "r2", 2, 0, 470.0}};
    auto v = acsim::ac_solve(net, 1000.0);
    CHECK(std::abs(v[2] - Cplx(0.5, 0)) < 1e-9);
    CHECK(std::abs(v[1] - Cplx(1.0, 0)) < 1e-9);
}

TEST_CASE("RC low-pass at its corner frequency") {
    double r = 1.5e3, c = 22e-9;
    double fc = 1.0 / (2.0 * M_PI * r * c);
    Netlist net;
    net.node_count = 3;
    net.components = {{ComponentKind::VacSource, "v", 1, 0, 1.0},
                      {ComponentKind::Resistor, "r", 1, 2, r},
                      {ComponentKind::Capacitor, "c", 2, 0, c}};
    Cplx vout = acsim::ac_solve(net, fc)[2];
    CHECK(std::abs(vout) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
    CHECK(std::arg(vout) * 180.0 / M_PI == doctest::Approx(-45.0).epsilon(1e-9));
}

TEST_CASE("series RL impedance at omega = 1000") {
    // 1 kOhm + 1 H at omega = 1000 rad/s: |Z| = 1000 sqrt(2), so the inductor
    // sees |V| = 1/sqrt(2) with a +45 degree phase.
    double omega = 1000.0;
    Netlist net;
    net.node_count = 3;
    net.components = {{ComponentKind::VacSource, "v", 1, 0, 1.0},
                      {ComponentKind::Resistor, "r", 1, 2, 1000.0},
                      {ComponentKind::Inductor, "l", 2, 0, 1.0}};
    Cplx vl = acsim::ac_solve(net, omega / (2.0 * M_PI))[2];
    CHECK(std::abs(vl) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
    CHECK(std::arg(vl) * 180.0 / M_PI == doctest::Approx(45.0).epsilon(1e-6));
    // Loop current magnitude |V| / |Z|.
    double current = std::abs(vl) / (omega * 1.0);
    CHECK(current == doctest::Approx(1.0 / (1000.0 * std::sqrt(2.0))).epsilon(1e-9));
}

TEST_CASE("five ladder topologies match ABCD transfer functions to 1e-6") {
    auto freqs = acsim::default_sweep_freqs(40);

    SUBCASE("voltage divider") {
        Netlist net;
        net.node_count = 3;
        net.components = {{ComponentKind::VacSource, "v", 1, 0, 1.0},
                          {ComponentKind::Resistor, "r1", 1, 2, 820.0},
                          {ComponentKind::Resistor, "r2", 2, 0, 2700.0}};
        for (double f : freqs) {
            Cplx want = Abcd::series(z_r(820)).transfer(z_r(2700));
            CHECK(rel_err(acsim::ac_solve(net, f)[2], want) < 1e-6);
        }
    }

    SUBCASE("RC low-pass") {
        double r = 3.3e3, c = 4.7e-9;
        Netlist net;
        net.node_count = 3;
        net.components = {{ComponentKind::VacSource, "v", 1, 0, 1.0},
                          {ComponentKind::Resistor, "r", 1, 2, r},
                          {ComponentKind::Capacitor, "c", 2, 0, c}};
        for (double f : freqs) {
            double w = 2.0 * M_PI * f;
            Cplx want = Abcd::series(z_r(r)).transfer(z_c(c, w));
            CHECK(rel_err(acsim::ac_solve(net, f)[2], want) < 1e-6);
        }
    }

    SUBCASE("RL high-pass") {
        double r = 1.2e3, l = 15e-3;
        Netlist net;
        net.node_count = 3;
        net.components = {{ComponentKind::VacSource, "v", 1, 0, 1.0},
                          {ComponentKind::Resistor, "r", 1, 2, r},
                          {ComponentKind::Inductor, "l", 2, 0, l}};
        for (double f : freqs) {
            double w = 2.0 * M_PI * f;
            Cplx want = Abcd::series(z_r(r)).transfer(z_l(l, w));
            CHECK(rel_err(acsim::ac_solve(net, f)[2], want) < 1e-6);
        }
    }

    SUBCASE("series RLC band-pass") {
        double r = 680.0, l = 10e-3, c = 47e-9;
        Netlist net;
        net.node_count = 4;
        net.components = {{ComponentKind::VacSource, "v", 1, 0, 1.0},
                          {ComponentKind::Inductor, "l", 1, 2, l},
                          {ComponentKind::Capacitor, "c", 2, 3, c},
                          {ComponentKind::Resistor, "r", 3, 0, r}};
        for (double f : freqs) {
            double w = 2.0 * M_PI * f;
            Cplx want = Abcd::series(z_l(l, w)).then(Abcd::series(z_c(c, w))).transfer(z_r(r));
            CHECK(rel_err(acsim::ac_solve(net, f)[3], want) < 1e-6);
        }
    }

    SUBCASE("third-order LC pi low-pass") {
        double rs = 600.0, c1 = 100e-9, l2 = 33e-3, c3 = 100e-9, rl = 600.0;
        Netlist net;
        net.node_count = 4;
        net.components = {{ComponentKind::VacSource, "v", 1, 0, 1.0},
                          {ComponentKind::Resistor, "rs", 1, 2, rs},
                          {ComponentKind::Capacitor, "c1", 2, 0, c1},
                          {ComponentKind::Inductor, "l2", 2, 3, l2},
                          {ComponentKind::Capacitor, "c3", 3, 0, c3},
                          {ComponentKind::Resistor, "rl", 3, 0, rl}};
        for (double f : freqs) {
            double w = 2.0 * M_PI * f;
            Cplx want = Abcd::series(z_r(rs))
                            .then(Abcd::shunt(1.0 / z_c(c1, w)))
                            .then(Abcd::series(z_l(l2, w)))
                            .then(Abcd::shunt(1.0 / z_c(c3, w)))
                            .transfer(z_r(rl));
            CHECK(rel_err(acsim::ac_solve(net, f)[3], want) < 1e-6);
        }
    }
}

TEST_CASE("RC low-pass against its one-pole transfer function") {
    double r = 3.3e3, c = 4.7e-9;
    Netlist net;
    net.node_count = 3;
    net.components = {{ComponentKind::VacSource, "v", 1, 0, 1.0},
                      {ComponentKind::Resistor, "r", 1, 2, r},
                      {ComponentKind::Capacitor, "c", 2, 0, c}};
    for (double f : acsim::default_sweep_freqs(40)) {
        double w = 2.0 * M_PI * f;
        Cplx want = 1.0 / (Cplx(1.0, 0.0) + Cplx(0, w * r * c));
        CHECK(rel_err(acsim::ac_solve(net, f)[2], want) < 1e-6);
    }
}

TEST_CASE("butterworth band-pass shape and cross-check") {
    auto circuit = acsim::butterworth_bandpass();
    auto freqs = acsim::default_sweep_freqs(40);
    auto response = acsim::frequency_sweep(circuit.netlist, freqs, circuit.out_node);

    double mid = 0.0;
    for (size_t i = 0; i < freqs.size(); ++i)
        mid = std::max(mid, std::abs(response.vout[i]));
    double low = std::abs(response.vout.front());
    double high = std::abs(response.vout.back());
    CHECK(20.0 * std::log10(mid / low) >= 20.0);
    CHECK(20.0 * std::log10(mid / high) >= 20.0);
    // Matched terminations: mid-band insertion near the ideal 0.5.
    CHECK(mid == doctest::Approx(0.5).epsilon(0.02));

    // Same ladder through the ABCD route.
    const auto& c = circuit.netlist.components;
    auto value = [&](const std::string& name) { return circuit.netlist.find(name)->value; };
    for (double f : freqs) {
        double w = 2.0 * M_PI * f;
        auto series_lc = [&](double l, double cap) {
            return Abcd::series(z_l(l, w) + z_c(cap, w));
        };
        auto shunt_lc = [&](double l, double cap) {
            return Abcd::shunt(1.0 / z_l(l, w) + 1.0 / z_c(cap, w));
        };
        Abcd cascade = Abcd::series(z_r(value("rs")))
                           .then(series_lc(value("l1"), value("c1")))
                           .then(shunt_lc(value("l2"), value("c2")))
                           .then(series_lc(value("l3"), value("c3")))
                           .then(shunt_lc(value("l4"), value("c4")))
                           .then(series_lc(value("l5"), value("c5")));
        Cplx want = cascade.transfer(z_r(value("rl")));
        Cplx got = acsim::ac_solve(circuit.netlist, f)[circuit.out_node];
        CHECK(rel_err(got, want) < 1e-6);
    }
    (void)c;
}

TEST_CASE("linearity and determinism") {
    auto circuit = acsim::butterworth_bandpass();
    auto v1 = acsim::ac_solve(circuit.netlist, 10e3);
    auto v1_again = acsim::ac_solve(circuit.netlist, 10e3);
    for (size_t i = 0; i < v1.size(); ++i) {
        CHECK(v1[i].real() == v1_again[i].real());
        CHECK(v1[i].imag() == v1_again[i].imag());
    }
    Netlist doubled = circuit.netlist;
    doubled.find("vsrc")->value = 2.0;
    auto v2 = acsim::ac_solve(doubled, 10e3);
    for (size_t i = 1; i < v1.size(); ++i)
        CHECK(std::abs(v2[i] - 2.0 * v1[i]) <= 1e-9 * std::abs(v2[i]) + 1e-15);
}

TEST_CASE("disconnection, shorts and regularization") {
    auto circuit = acsim::butterworth_bandpass();

    SUBCASE("everything disconnected leaves only the regularization floor") {
        Netlist net = circuit.netlist;
        for (auto& comp : net.components)
            if (comp.kind != ComponentKind::VacSource) comp.connected = false;
        auto v = acsim::ac_solve(net, 10e3);
        CHECK(std::abs(v[circuit.out_node]) < 1e-6);
    }

    SUBCASE("a broken series path floats the output but never crashes") {
        Netlist net = circuit.netlist;
        net.find("l3")->connected = false;
        auto v = acsim::ac_solve(net, 10e3);
        CHECK(std::isfinite(std::abs(v[circuit.out_node])));
        CHECK(std::abs(v[circuit.out_node]) < 1e-3);
    }

    SUBCASE("an active short kills the shunt node") {
        Netlist net = circuit.netlist;
        net.find("short_a")->connected = true;
        auto v = acsim::ac_solve(net, 10e3);
        CHECK(std::abs(v[4]) < 1e-6);
        CHECK(std::abs(v[circuit.out_node]) < 1e-3);
    }
}

TEST_CASE("invalid inputs") {
    auto circuit = acsim::butterworth_bandpass();
    CHECK_THROWS_AS(acsim::ac_solve(circuit.netlist, 0.0), ContractError);
    CHECK_THROWS_AS(acsim::ac_solve(circuit.netlist, -5.0), ContractError);
    Netlist bad = circuit.netlist;
    bad.find("rs")->value = -1.0;
    CHECK_THROWS_AS(acsim::ac_solve(bad, 1e3), ContractError);
    CHECK_THROWS_AS(acsim::frequency_sweep(circuit.netlist, std::vector<double>{1e3}, 99),
                    ContractError);
}

TEST_CASE("netlist and response serialization round trips") {
    auto circuit = acsim::butterworth_bandpass();
    Netlist back = acsim::netlist_from_text(acsim::netlist_to_text(circuit.netlist));
    REQUIRE(back.components.size() == circuit.netlist.components.size());
    CHECK(back.node_count == circuit.netlist.node_count);
    for (size_t i = 0; i < back.components.size(); ++i) {
        const auto& a = circuit.netlist.components[i];
        const auto& b = back.components[i];
        CHECK(a.kind == b.kind);
        CHECK(a.name == b.name);
        CHECK(a.node_a == b.node_a);
        CHECK(a.node_b == b.node_b);
        CHECK(a.value == b.value);
        CHECK(a.connected == b.connected);
    }

    auto freqs = acsim::default_sweep_freqs(8);
    auto resp = acsim::frequency_sweep(circuit.netlist, freqs, circuit.out_node);
    auto resp_back = acsim::response_from_csv(acsim::response_to_csv(resp));
    REQUIRE(resp_back.freqs.size() == resp.freqs.size());
    for (size_t i = 0; i < resp.freqs.size(); ++i) {
        CHECK(resp_back.freqs[i] == resp.freqs[i]);
        CHECK(resp_back.vout[i].real() == resp.vout[i].real());
        CHECK(resp_back.vout[i].imag() == resp.vout[i].imag());
    }
}
