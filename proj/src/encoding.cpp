#include "qkmeans/encoding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qkm {

namespace {

double checked_norm(std::span<const double> v) {
    if (v.empty()) throw std::invalid_argument("cannot encode an empty vector");
    double sum = 0.0;
    for (double x : v) {
        if (!std::isfinite(x)) throw std::invalid_argument("cannot encode a non-finite component");
        sum += x * x;
    }
    if (sum == 0.0) throw std::invalid_argument("cannot encode the zero vector");
    return std::sqrt(sum);
}

} // namespace

std::size_t EncodedPoint::num_qubits() const noexcept {
    if (strategy == Encoding::Angle) return 1;
    return static_cast<std::size_t>(std::countr_zero(amplitudes.size()));
}

EncodedPoint amplitude_encode(std::span<const double> vector) {
    const double norm = checked_norm(vector);
    const std::size_t padded = std::bit_ceil(std::max<std::size_t>(vector.size(), 2));
    EncodedPoint point;
    point.strategy = Encoding::Amplitude;
    point.source_norm = norm;
    point.amplitudes.assign(padded, 0.0);
    for (std::size_t i = 0; i < vector.size(); ++i) point.amplitudes[i] = vector[i] / norm;
    return point;
}

EncodedPoint angle_encode(std::span<const double> vector) {
    if (vector.size() != 2) throw std::invalid_argument("angle encoding needs exactly two features");
    const double norm = checked_norm(vector);
    EncodedPoint point;
    point.strategy = Encoding::Angle;
    point.source_norm = norm;
    point.angle = std::atan2(vector[1], vector[0]);
    return point;
}

EncodedPoint encode(std::span<const double> vector, Encoding strategy) {
    return strategy == Encoding::Amplitude ? amplitude_encode(vector) : angle_encode(vector);
}

std::vector<GateOp> preparation_ops(const EncodedPoint& point, std::span<const std::size_t> qubits) {
    if (qubits.size() != point.num_qubits()) {
        throw std::invalid_argument("register size does not match encoded point");
    }
    if (point.strategy == Encoding::Angle) return {GateOp::ry(qubits[0], 2.0 * point.angle)};
    return {GateOp::prepare({qubits.begin(), qubits.end()}, point.amplitudes)};
}

StateVector prepare_state(const EncodedPoint& point) {
    std::vector<std::size_t> qubits(point.num_qubits());
    std::iota(qubits.begin(), qubits.end(), std::size_t{0});
    const auto ops = preparation_ops(point, qubits);
    return run_circuit(qubits.size(), ops);
}

std::vector<double> state_amplitudes(const EncodedPoint& point) {
    if (point.strategy == Encoding::Angle) return {std::cos(point.angle), std::sin(point.angle)};
    return point.amplitudes;
}

} // namespace qkm
