#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qsent::qsim {

using cdouble = std::complex<double>;

enum class GateKind { H, X, RY, RZ, CNOT };

// One gate in a circuit. `control` is used by CNOT only; `angle` (radians)
// by RY/RZ only. Qubit 0 is the least-significant bit of a basis index.
struct GateOp {
    GateKind kind;
    int target = 0;
    int control = -1;
    double angle = 0.0;
};

// Append-only gate list of fixed width.
class Circuit {
  public:
    explicit Circuit(int n_qubits);

    void h(int q);
    void x(int q);
    void ry(int q, double theta);
    void rz(int q, double theta);
    void cnot(int control, int target);
    void append(const GateOp &g);
    void append(const Circuit &other);

    int width() const { return width_; }
    const std::vector<GateOp> &gates() const { return gates_; }

    // Line-oriented debug dump, one gate per line: `KIND q[,q2][,theta]`.
    // CNOT prints control first: `CNOT c,t`.
    std::string dump() const;

  private:
    void check_qubit(int q, const char *what) const;

    int width_;
    std::vector<GateOp> gates_;
};

// Dense complex amplitude vector over 2^n basis states, little-endian
// (qubit 0 = least-significant bit of the basis index).
class StateVector {
  public:
    explicit StateVector(int n_qubits); // |0...0>
    static StateVector from_amplitudes(std::vector<cdouble> amps);

    int width() const { return width_; }
    const std::vector<cdouble> &amplitudes() const { return amps_; }
    std::vector<cdouble> &amplitudes() { return amps_; }
    double norm() const;

    void apply(const GateOp &g);

  private:
    int width_;
    std::vector<cdouble> amps_;
};

StateVector run(const Circuit &c);
StateVector run(const Circuit &c, StateVector psi0);

// <psi| Z(x)...(x)Z |psi> = sum_b (-1)^popcount(b) |psi_b|^2, in [-1, 1].
double expectation_parity_z(const StateVector &psi);

// Multinomial sample of `shots` basis-state measurements, deterministic for
// a given seed. Keys are bitstrings with qubit n-1 leftmost ("01" = index 1).
std::map<std::string, int> measure_counts(const StateVector &psi, int shots,
                                          std::uint32_t seed);

} // namespace qsent::qsim
