#pragma once

/**
 * @file
 * Pure-state simulator covering the gates a SwapTest needs: amplitude
 * injection, H, Ry and controlled-SWAP, plus ancilla measurement.
 *
 * Qubit 0 is the least-significant bit of the amplitude index.
 */

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qkm {

using Complex = std::complex<double>;

class StateVector {
public:
    /// |0...0> on `num_qubits` qubits.
    explicit StateVector(std::size_t num_qubits);

    /// Takes ownership of `amplitudes`; length must be a power of two >= 2
    /// and the norm must be 1 within 1e-9.
    static StateVector from_amplitudes(std::vector<Complex> amplitudes);

    [[nodiscard]] std::size_t num_qubits() const noexcept { return num_qubits_; }
    [[nodiscard]] std::size_t size() const noexcept { return amplitudes_.size(); }
    [[nodiscard]] std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
    [[nodiscard]] Complex operator[](std::size_t index) const { return amplitudes_[index]; }
    [[nodiscard]] double norm_squared() const noexcept;

private:
    StateVector() = default;

    friend class StateEvolver;

    std::size_t num_qubits_ = 0;
    std::vector<Complex> amplitudes_;
};

enum class GateKind { H, Ry, CSwap, PrepareAmplitudes };

/**
 * One circuit instruction.
 *
 * Target conventions:
 *  - H, Ry: `targets = {q}`
 *  - CSwap: `targets = {control, a, b}`
 *  - PrepareAmplitudes: `targets` lists the register qubits, least significant
 *    first; `amplitudes` has 2^targets.size() entries. The register must be in
 *    |0...0> when the instruction runs.
 */
struct GateOp {
    GateKind kind = GateKind::H;
    std::vector<std::size_t> targets;
    double angle = 0.0;
    std::vector<double> amplitudes;

    static GateOp h(std::size_t qubit);
    static GateOp ry(std::size_t qubit, double theta);
    static GateOp cswap(std::size_t control, std::size_t a, std::size_t b);
    static GateOp prepare(std::vector<std::size_t> qubits, std::vector<double> amplitudes);
};

struct ShotResult {
    std::uint64_t zeros = 0;
    std::uint64_t ones = 0;

    [[nodiscard]] std::uint64_t shots() const noexcept { return zeros + ones; }
    [[nodiscard]] std::uint64_t count(int outcome) const noexcept { return outcome == 0 ? zeros : ones; }
};

/// In-place gate application. Used by the value-returning free functions and
/// by hot loops that run many small circuits.
class StateEvolver {
public:
    explicit StateEvolver(StateVector& state) : state_(state) {}

    void apply(const GateOp& op);

private:
    void apply_h(std::size_t q);
    void apply_ry(std::size_t q, double theta);
    void apply_cswap(std::size_t control, std::size_t a, std::size_t b);
    void apply_prepare(std::span<const std::size_t> qubits, std::span<const double> payload);

    StateVector& state_;
};

/// Exact unitary action of `op` on `state`.
/// Throws std::invalid_argument on bad indices or an unnormalized payload.
[[nodiscard]] StateVector apply_gate(const StateVector& state, const GateOp& op);

/// Applies `ops` in order starting from |0...0> on `num_qubits` qubits.
[[nodiscard]] StateVector run_circuit(std::size_t num_qubits, std::span<const GateOp> ops);

/// Marginal probability that measuring `qubit` yields `outcome`.
[[nodiscard]] double exact_probability(const StateVector& state, std::size_t qubit, int outcome);

/// Samples `shots` measurements of `qubit`. Deterministic in `seed`.
[[nodiscard]] ShotResult measure_ancilla(const StateVector& state, std::size_t qubit,
                                         std::uint64_t shots, std::uint64_t seed);

/// Binomial draw of `shots` ancilla outcomes given P(1) = `p_one`.
[[nodiscard]] ShotResult sample_outcomes(double p_one, std::uint64_t shots, std::uint64_t seed);

} // namespace qkm
