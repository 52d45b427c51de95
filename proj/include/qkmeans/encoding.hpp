#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "qkmeans/simulator.hpp"

namespace qkm {

enum class Encoding { Amplitude, Angle };

/// A classical vector mapped onto a quantum state description.
struct EncodedPoint {
    Encoding strategy = Encoding::Amplitude;
    /// Unit-norm, zero-padded to a power of two (Amplitude only).
    std::vector<double> amplitudes;
    /// atan2(a1, a0) in radians (Angle only).
    double angle = 0.0;
    double source_norm = 0.0;

    [[nodiscard]] std::size_t num_qubits() const noexcept;
};

/// v / |v|, padded with zeros to 2^ceil(log2 max(F, 2)) entries.
/// Throws std::invalid_argument for an empty, zero or non-finite vector.
[[nodiscard]] EncodedPoint amplitude_encode(std::span<const double> vector);

/// Two-feature angle encoding. The stored angle is atan2(a1, a0) so the
/// prepared state is (cos angle, sin angle) regardless of quadrant.
[[nodiscard]] EncodedPoint angle_encode(std::span<const double> vector);

[[nodiscard]] EncodedPoint encode(std::span<const double> vector, Encoding strategy);

/// Gates that prepare `point` on `qubits` (least significant first) from |0...0>.
/// Angle points use Ry(2 * angle).
[[nodiscard]] std::vector<GateOp> preparation_ops(const EncodedPoint& point,
                                                  std::span<const std::size_t> qubits);

[[nodiscard]] StateVector prepare_state(const EncodedPoint& point);

/// Real amplitudes of the prepared state, without running the simulator.
[[nodiscard]] std::vector<double> state_amplitudes(const EncodedPoint& point);

} // namespace qkm
