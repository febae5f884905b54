#include "qsent/qsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <utility>

namespace qsent::qsim {

namespace {

// Apply a 2x2 unitary [[u00,u01],[u10,u11]] to qubit q.
void apply_single(std::vector<cdouble> &amps, int q, cdouble u00, cdouble u01,
                  cdouble u10, cdouble u11) {
    const std::size_t mask = std::size_t(1) << q;
    const std::size_t n = amps.size();
    for (std::size_t i = 0; i < n; ++i) {
        if ((i & mask) == 0) {
            const cdouble a = amps[i];
            const cdouble b = amps[i | mask];
            amps[i] = u00 * a + u01 * b;
            amps[i | mask] = u10 * a + u11 * b;
        }
    }
}

} // namespace

Circuit::Circuit(int n_qubits) : width_(n_qubits) {
    if (n_qubits < 1)
        throw std::invalid_argument("circuit width must be >= 1");
}

void Circuit::check_qubit(int q, const char *what) const {
    if (q < 0 || q >= width_)
        throw std::out_of_range(std::string(what) + " qubit " +
                                std::to_string(q) + " out of range for width " +
                                std::to_string(width_));
}

void Circuit::h(int q) {
    check_qubit(q, "H");
    gates_.push_back({GateKind::H, q});
}

void Circuit::x(int q) {
    check_qubit(q, "X");
    gates_.push_back({GateKind::X, q});
}

void Circuit::ry(int q, double theta) {
    check_qubit(q, "RY");
    gates_.push_back({GateKind::RY, q, -1, theta});
}

void Circuit::rz(int q, double theta) {
    check_qubit(q, "RZ");
    gates_.push_back({GateKind::RZ, q, -1, theta});
}

void Circuit::cnot(int control, int target) {
    check_qubit(control, "CNOT control");
    check_qubit(target, "CNOT target");
    if (control == target)
        throw std::invalid_argument("CNOT control equals target");
    gates_.push_back({GateKind::CNOT, target, control});
}

void Circuit::append(const GateOp &g) {
    check_qubit(g.target, "gate");
    if (g.kind == GateKind::CNOT) {
        check_qubit(g.control, "CNOT control");
        if (g.control == g.target)
            throw std::invalid_argument("CNOT control equals target");
    }
    gates_.push_back(g);
}

void Circuit::append(const Circuit &other) {
    if (other.width_ > width_)
        throw std::invalid_argument("appended circuit is wider than target");
    for (const auto &g : other.gates_)
        gates_.push_back(g);
}

std::string Circuit::dump() const {
    std::string out;
    char buf[64];
    for (const auto &g : gates_) {
        switch (g.kind) {
        case GateKind::H:
            std::snprintf(buf, sizeof buf, "H %d\n", g.target);
            break;
        case GateKind::X:
            std::snprintf(buf, sizeof buf, "X %d\n", g.target);
            break;
        case GateKind::RY:
            std::snprintf(buf, sizeof buf, "RY %d,%.17g\n", g.target, g.angle);
            break;
        case GateKind::RZ:
            std::snprintf(buf, sizeof buf, "RZ %d,%.17g\n", g.target, g.angle);
            break;
        case GateKind::CNOT:
            std::snprintf(buf, sizeof buf, "CNOT %d,%d\n", g.control, g.target);
            break;
        }
        out += buf;
    }
    return out;
}

StateVector::StateVector(int n_qubits) : width_(n_qubits) {
    if (n_qubits < 1 || n_qubits > 24)
        throw std::invalid_argument("statevector width out of range");
    amps_.assign(std::size_t(1) << n_qubits, cdouble(0.0, 0.0));
    amps_[0] = 1.0;
}

StateVector StateVector::from_amplitudes(std::vector<cdouble> amps) {
    int n = 0;
    while ((std::size_t(1) << n) < amps.size())
        ++n;
    if (amps.empty() || (std::size_t(1) << n) != amps.size())
        throw std::invalid_argument("amplitude count is not a power of two");
    StateVector psi(n == 0 ? 1 : n);
    if (n == 0)
        throw std::invalid_argument("need at least two amplitudes");
    psi.amps_ = std::move(amps);
    return psi;
}

double StateVector::norm() const {
    double s = 0.0;
    for (const auto &a : amps_)
        s += std::norm(a);
    return std::sqrt(s);
}

void StateVector::apply(const GateOp &g) {
    if (g.target < 0 || g.target >= width_)
        throw std::out_of_range("gate target out of range");
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    switch (g.kind) {
    case GateKind::H:
        apply_single(amps_, g.target, inv_sqrt2, inv_sqrt2, inv_sqrt2,
                     -inv_sqrt2);
        break;
    case GateKind::X:
        apply_single(amps_, g.target, 0.0, 1.0, 1.0, 0.0);
        break;
    case GateKind::RY: {
        // RY(t) = exp(-i t Y / 2) = [[cos, -sin], [sin, cos]] of t/2
        const double c = std::cos(g.angle / 2.0);
        const double s = std::sin(g.angle / 2.0);
        apply_single(amps_, g.target, c, -s, s, c);
        break;
    }
    case GateKind::RZ: {
        // RZ(t) = exp(-i t Z / 2) = diag(e^{-it/2}, e^{+it/2})
        const cdouble e0 = std::exp(cdouble(0.0, -g.angle / 2.0));
        const cdouble e1 = std::exp(cdouble(0.0, +g.angle / 2.0));
        const std::size_t mask = std::size_t(1) << g.target;
        for (std::size_t i = 0; i < amps_.size(); ++i)
            amps_[i] *= (i & mask) ? e1 : e0;
        break;
    }
    case GateKind::CNOT: {
        if (g.control < 0 || g.control >= width_)
            throw std::out_of_range("CNOT control out of range");
        if (g.control == g.target)
            throw std::invalid_argument("CNOT control equals target");
        const std::size_t cmask = std::size_t(1) << g.control;
        const std::size_t tmask = std::size_t(1) << g.target;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if ((i & cmask) && !(i & tmask))
                std::swap(amps_[i], amps_[i | tmask]);
        }
        break;
    }
    }
}

StateVector run(const Circuit &c) { return run(c, StateVector(c.width())); }

StateVector run(const Circuit &c, StateVector psi0) {
    if (psi0.width() != c.width())
        throw std::invalid_argument("circuit/state width mismatch");
    for (const auto &g : c.gates())
        psi0.apply(g);
    return psi0;
}

double expectation_parity_z(const StateVector &psi) {
    double acc = 0.0;
    const auto &amps = psi.amplitudes();
    for (std::size_t b = 0; b < amps.size(); ++b) {
        const double p = std::norm(amps[b]);
        acc += (std::popcount(b) & 1) ? -p : p;
    }
    return acc;
}

std::map<std::string, int> measure_counts(const StateVector &psi, int shots,
                                          std::uint32_t seed) {
    if (shots < 1)
        throw std::invalid_argument("shots must be >= 1");
    const auto &amps = psi.amplitudes();
    std::vector<double> cdf(amps.size());
    double acc = 0.0;
    for (std::size_t b = 0; b < amps.size(); ++b) {
        acc += std::norm(amps[b]);
        cdf[b] = acc;
    }
    std::mt19937 rng(seed);
    std::map<std::string, int> counts;
    for (int s = 0; s < shots; ++s) {
        // uniform in [0, acc); 2^32-based draw keeps results identical
        // across standard libraries
        const double u = acc * (double(rng()) / 4294967296.0);
        std::size_t b =
            std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin();
        if (b >= amps.size())
            b = amps.size() - 1;
        std::string key(psi.width(), '0');
        for (int q = 0; q < psi.width(); ++q)
            if (b & (std::size_t(1) << q))
                key[psi.width() - 1 - q] = '1';
        ++counts[key];
    }
    return counts;
}

} // namespace qsent::qsim
