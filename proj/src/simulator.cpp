#include "qkmeans/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "qkmeans/rng.hpp"

namespace qkm {

namespace {

constexpr double kNormTolerance = 1e-9;

void check_qubit(const StateVector& state, std::size_t q) {
    if (q >= state.num_qubits()) {
        throw std::invalid_argument("qubit index " + std::to_string(q) + " out of range for " +
                                    std::to_string(state.num_qubits()) + "-qubit register");
    }
}

void check_distinct(std::span<const std::size_t> qubits) {
    for (std::size_t i = 0; i < qubits.size(); ++i) {
        for (std::size_t j = i + 1; j < qubits.size(); ++j) {
            if (qubits[i] == qubits[j]) {
                throw std::invalid_argument("gate targets must be distinct qubits");
            }
        }
    }
}

} // namespace

StateVector::StateVector(std::size_t num_qubits) : num_qubits_(num_qubits) {
    if (num_qubits == 0 || num_qubits > 30) {
        throw std::invalid_argument("register size must be in [1, 30] qubits");
    }
    amplitudes_.assign(std::size_t{1} << num_qubits, Complex{0.0, 0.0});
    amplitudes_[0] = 1.0;
}

StateVector StateVector::from_amplitudes(std::vector<Complex> amplitudes) {
    const std::size_t n = amplitudes.size();
    if (n < 2 || !std::has_single_bit(n)) {
        throw std::invalid_argument("amplitude count must be a power of two >= 2");
    }
    StateVector state;
    state.num_qubits_ = static_cast<std::size_t>(std::countr_zero(n));
    state.amplitudes_ = std::move(amplitudes);
    if (std::abs(state.norm_squared() - 1.0) > kNormTolerance) {
        throw std::invalid_argument("state amplitudes are not normalized");
    }
    return state;
}

double StateVector::norm_squared() const noexcept {
    double total = 0.0;
    for (const auto& a : amplitudes_) total += std::norm(a);
    return total;
}

GateOp GateOp::h(std::size_t qubit) { return GateOp{GateKind::H, {qubit}, 0.0, {}}; }

GateOp GateOp::ry(std::size_t qubit, double theta) { return GateOp{GateKind::Ry, {qubit}, theta, {}}; }

GateOp GateOp::cswap(std::size_t control, std::size_t a, std::size_t b) {
    return GateOp{GateKind::CSwap, {control, a, b}, 0.0, {}};
}

GateOp GateOp::prepare(std::vector<std::size_t> qubits, std::vector<double> amplitudes) {
    return GateOp{GateKind::PrepareAmplitudes, std::move(qubits), 0.0, std::move(amplitudes)};
}

void StateEvolver::apply(const GateOp& op) {
    for (auto q : op.targets) check_qubit(state_, q);
    check_distinct(op.targets);
    switch (op.kind) {
    case GateKind::H:
        if (op.targets.size() != 1) throw std::invalid_argument("H acts on exactly one qubit");
        apply_h(op.targets[0]);
        break;
    case GateKind::Ry:
        if (op.targets.size() != 1) throw std::invalid_argument("Ry acts on exactly one qubit");
        if (!std::isfinite(op.angle)) throw std::invalid_argument("Ry angle must be finite");
        apply_ry(op.targets[0], op.angle);
        break;
    case GateKind::CSwap:
        if (op.targets.size() != 3) throw std::invalid_argument("CSWAP needs control and two targets");
        apply_cswap(op.targets[0], op.targets[1], op.targets[2]);
        break;
    case GateKind::PrepareAmplitudes:
        apply_prepare(op.targets, op.amplitudes);
        break;
    }
}

void StateEvolver::apply_h(std::size_t q) {
    static const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    auto& amps = state_.amplitudes_;
    const std::size_t stride = std::size_t{1} << q;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (i & stride) continue;
        const Complex a0 = amps[i];
        const Complex a1 = amps[i | stride];
        amps[i] = (a0 + a1) * inv_sqrt2;
        amps[i | stride] = (a0 - a1) * inv_sqrt2;
    }
}

// Ry(theta) = [[cos theta/2, -sin theta/2], [sin theta/2, cos theta/2]]
void StateEvolver::apply_ry(std::size_t q, double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    auto& amps = state_.amplitudes_;
    const std::size_t stride = std::size_t{1} << q;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (i & stride) continue;
        const Complex a0 = amps[i];
        const Complex a1 = amps[i | stride];
        amps[i] = c * a0 - s * a1;
        amps[i | stride] = s * a0 + c * a1;
    }
}

void StateEvolver::apply_cswap(std::size_t control, std::size_t a, std::size_t b) {
    auto& amps = state_.amplitudes_;
    const std::size_t cbit = std::size_t{1} << control;
    const std::size_t abit = std::size_t{1} << a;
    const std::size_t bbit = std::size_t{1} << b;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        // visit each swapped pair once: control set, a=1, b=0
        if ((i & cbit) && (i & abit) && !(i & bbit)) {
            std::swap(amps[i], amps[(i ^ abit) | bbit]);
        }
    }
}

void StateEvolver::apply_prepare(std::span<const std::size_t> qubits, std::span<const double> payload) {
    if (qubits.empty() || payload.size() != (std::size_t{1} << qubits.size())) {
        throw std::invalid_argument("prepare payload length must be 2^(number of target qubits)");
    }
    double payload_norm = 0.0;
    for (double v : payload) {
        if (!std::isfinite(v)) throw std::invalid_argument("prepare payload has a non-finite entry");
        payload_norm += v * v;
    }
    if (std::abs(payload_norm - 1.0) > kNormTolerance) {
        throw std::invalid_argument("prepare payload is not normalized");
    }

    std::size_t mask = 0;
    for (auto q : qubits) mask |= std::size_t{1} << q;

    auto& amps = state_.amplitudes_;
    double excited_weight = 0.0;
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (i & mask) excited_weight += std::norm(amps[i]);
    }
    if (excited_weight > kNormTolerance) {
        throw std::invalid_argument("prepare requires its register to be in |0...0>");
    }

    std::vector<std::size_t> offsets(payload.size(), 0);
    for (std::size_t k = 0; k < payload.size(); ++k) {
        for (std::size_t bit = 0; bit < qubits.size(); ++bit) {
            if (k & (std::size_t{1} << bit)) offsets[k] |= std::size_t{1} << qubits[bit];
        }
    }

    std::vector<Complex> next(amps.size(), Complex{0.0, 0.0});
    for (std::size_t i = 0; i < amps.size(); ++i) {
        if (i & mask) continue;
        const Complex base = amps[i];
        if (base == Complex{0.0, 0.0}) continue;
        for (std::size_t k = 0; k < payload.size(); ++k) next[i | offsets[k]] = base * payload[k];
    }
    amps = std::move(next);
}

StateVector apply_gate(const StateVector& state, const GateOp& op) {
    StateVector out = state;
    StateEvolver(out).apply(op);
    return out;
}

StateVector run_circuit(std::size_t num_qubits, std::span<const GateOp> ops) {
    StateVector state(num_qubits);
    StateEvolver evolver(state);
    for (const auto& op : ops) evolver.apply(op);
    return state;
}

double exact_probability(const StateVector& state, std::size_t qubit, int outcome) {
    check_qubit(state, qubit);
    if (outcome != 0 && outcome != 1) throw std::invalid_argument("outcome must be 0 or 1");
    const std::size_t bit = std::size_t{1} << qubit;
    double p_one = 0.0;
    double total = 0.0;
    const auto amps = state.amplitudes();
    for (std::size_t i = 0; i < amps.size(); ++i) {
        const double w = std::norm(amps[i]);
        total += w;
        if (i & bit) p_one += w;
    }
    p_one = std::clamp(p_one / total, 0.0, 1.0);
    return outcome == 1 ? p_one : 1.0 - p_one;
}

ShotResult sample_outcomes(double p_one, std::uint64_t shots, std::uint64_t seed) {
    if (shots == 0) throw std::invalid_argument("shots must be >= 1");
    p_one = std::clamp(p_one, 0.0, 1.0);
    Rng rng(seed);
    std::binomial_distribution<std::uint64_t> draw(shots, p_one);
    const std::uint64_t ones = draw(rng);
    return ShotResult{shots - ones, ones};
}

ShotResult measure_ancilla(const StateVector& state, std::size_t qubit, std::uint64_t shots,
                           std::uint64_t seed) {
    return sample_outcomes(exact_probability(state, qubit, 1), shots, seed);
}

} // namespace qkm
