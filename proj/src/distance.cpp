#include "qkmeans/distance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "qkmeans/rng.hpp"

namespace qkm {

namespace {

void check_compatible(const EncodedPoint& left, const EncodedPoint& right) {
    if (left.strategy != right.strategy) {
        throw std::invalid_argument("SwapTest operands use different encodings");
    }
    if (left.num_qubits() != right.num_qubits()) {
        throw std::invalid_argument("SwapTest operands have different dimensions");
    }
}

double evaluate(const EncodedPoint& left, const EncodedPoint& right, std::uint64_t shots,
                ExecutionMode mode, std::uint64_t seed) {
    const double p_zero = swaptest_zero_probability(left, right);
    if (mode == ExecutionMode::Exact) return distance_from_zero_probability(p_zero);
    const auto counts = sample_outcomes(1.0 - p_zero, shots, seed);
    return distance_from_zero_probability(static_cast<double>(counts.zeros) /
                                          static_cast<double>(counts.shots()));
}

template <typename PairAt>
BatchResult run_batch(std::size_t count, PairAt pair_at, std::uint64_t shots, const BatchConfig& config,
                      ExecutionMode mode) {
    if (config.max_circuits_per_job == 0) throw std::invalid_argument("max_circuits_per_job must be >= 1");
    if (shots == 0) throw std::invalid_argument("shots must be >= 1");
    if (count == 0) throw std::invalid_argument("batch must contain at least one request");

    BatchResult result;
    result.distances.resize(count);
    for (std::size_t start = 0; start < count; start += config.max_circuits_per_job) {
        const std::size_t stop = std::min(count, start + config.max_circuits_per_job);
        for (std::size_t i = start; i < stop; ++i) {
            const auto& [left, right, request_shots] = pair_at(i);
            result.distances[i] = evaluate(left, right, request_shots ? request_shots : shots, mode,
                                           circuit_seed(config.seed, i));
        }
        ++result.stats.jobs_submitted;
        result.stats.circuits_executed += stop - start;
    }
    return result;
}

struct PairRef {
    const EncodedPoint& left;
    const EncodedPoint& right;
    std::uint64_t shots;
};

} // namespace

SwapTestCircuit build_swaptest(const EncodedPoint& left, const EncodedPoint& right) {
    check_compatible(left, right);
    const std::size_t width = left.num_qubits();

    SwapTestCircuit circuit;
    circuit.num_qubits = 1 + 2 * width;
    circuit.ancilla = 0;

    std::vector<std::size_t> left_qubits(width);
    std::vector<std::size_t> right_qubits(width);
    std::iota(left_qubits.begin(), left_qubits.end(), std::size_t{1});
    std::iota(right_qubits.begin(), right_qubits.end(), std::size_t{1 + width});

    for (auto& op : preparation_ops(left, left_qubits)) circuit.ops.push_back(std::move(op));
    for (auto& op : preparation_ops(right, right_qubits)) circuit.ops.push_back(std::move(op));
    circuit.ops.push_back(GateOp::h(circuit.ancilla));
    for (std::size_t q = 0; q < width; ++q) {
        circuit.ops.push_back(GateOp::cswap(circuit.ancilla, left_qubits[q], right_qubits[q]));
    }
    circuit.ops.push_back(GateOp::h(circuit.ancilla));
    return circuit;
}

double swaptest_zero_probability(const EncodedPoint& left, const EncodedPoint& right) {
    const auto circuit = build_swaptest(left, right);
    const auto state = run_circuit(circuit.num_qubits, circuit.ops);
    return exact_probability(state, circuit.ancilla, 0);
}

double distance_from_zero_probability(double p_zero) noexcept {
    const double overlap_sq = std::clamp(2.0 * p_zero - 1.0, 0.0, 1.0);
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * std::sqrt(overlap_sq)));
}

double estimate_distance(const DistanceRequest& request, const Backend& backend) {
    if (request.shots == 0) throw std::invalid_argument("shots must be >= 1");
    return evaluate(request.left, request.right, request.shots, backend.mode, backend.seed);
}

std::uint64_t circuit_seed(std::uint64_t batch_seed, std::size_t index) noexcept {
    return derive_seed(batch_seed, index);
}

BatchResult batch_distances(std::span<const DistanceRequest> requests, const BatchConfig& config,
                            ExecutionMode mode) {
    for (const auto& r : requests) {
        if (r.shots == 0) throw std::invalid_argument("shots must be >= 1");
    }
    return run_batch(
        requests.size(),
        [&](std::size_t i) { return PairRef{requests[i].left, requests[i].right, requests[i].shots}; },
        config.shots_per_circuit, config, mode);
}

BatchResult batch_distance_matrix(std::span<const EncodedPoint> points, std::span<const EncodedPoint> centers,
                                  const BatchConfig& config, ExecutionMode mode) {
    const std::size_t k = centers.size();
    if (k == 0) throw std::invalid_argument("need at least one center");
    return run_batch(
        points.size() * k,
        [&](std::size_t i) { return PairRef{points[i / k], centers[i % k], config.shots_per_circuit}; },
        config.shots_per_circuit, config, mode);
}

} // namespace qkm
