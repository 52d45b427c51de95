#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "qkmeans/encoding.hpp"
#include "qkmeans/simulator.hpp"

namespace qkm {

/// SwapTest circuit. Qubit 0 is the ancilla, the left register follows, then
/// the right register.
struct SwapTestCircuit {
    std::size_t num_qubits = 0;
    std::size_t ancilla = 0;
    std::vector<GateOp> ops;
};

[[nodiscard]] SwapTestCircuit build_swaptest(const EncodedPoint& left, const EncodedPoint& right);

/// P(ancilla = 0) for the SwapTest of `left` and `right`, simulated exactly.
[[nodiscard]] double swaptest_zero_probability(const EncodedPoint& left, const EncodedPoint& right);

struct DistanceRequest {
    EncodedPoint left;
    EncodedPoint right;
    std::uint64_t shots = 1024;
};

enum class ExecutionMode { Exact, Sampled };

struct Backend {
    ExecutionMode mode = ExecutionMode::Exact;
    std::uint64_t seed = 0;
};

/// sqrt(2 - 2 |overlap|) with |overlap|^2 = clamp(2 P(0) - 1, 0, 1).
[[nodiscard]] double distance_from_zero_probability(double p_zero) noexcept;

/// Distance between the two encoded points of `request`. Exact mode uses the
/// exact ancilla marginal; sampled mode draws `request.shots` shots.
[[nodiscard]] double estimate_distance(const DistanceRequest& request, const Backend& backend);

/// C, the number of circuits allowed in one job, and per-circuit shots.
struct BatchConfig {
    std::size_t max_circuits_per_job = 900;
    std::uint64_t shots_per_circuit = 1024;
    std::uint64_t seed = 0;
};

struct BatchStats {
    std::size_t jobs_submitted = 0;
    std::size_t circuits_executed = 0;

    BatchStats& operator+=(const BatchStats& other) noexcept {
        jobs_submitted += other.jobs_submitted;
        circuits_executed += other.circuits_executed;
        return *this;
    }
    friend bool operator==(const BatchStats&, const BatchStats&) = default;
};

struct BatchResult {
    std::vector<double> distances;
    BatchStats stats;
};

/// Seed used for request `index` of a batch seeded with `batch_seed`.
[[nodiscard]] std::uint64_t circuit_seed(std::uint64_t batch_seed, std::size_t index) noexcept;

/**
 * Runs `requests` in jobs of at most `config.max_circuits_per_job` circuits.
 *
 * Result i equals estimate_distance(requests[i], {mode, circuit_seed(config.seed, i)}),
 * so the output does not depend on how requests are split into jobs.
 */
[[nodiscard]] BatchResult batch_distances(std::span<const DistanceRequest> requests,
                                          const BatchConfig& config, ExecutionMode mode);

/// Same contract as batch_distances over the row-major request list
/// (point i, center k) -> index i * centers.size() + k, with
/// config.shots_per_circuit shots each, without materializing the requests.
[[nodiscard]] BatchResult batch_distance_matrix(std::span<const EncodedPoint> points,
                                                std::span<const EncodedPoint> centers,
                                                const BatchConfig& config, ExecutionMode mode);

} // namespace qkm
