#include "veriphoton/phasernd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "veriphoton/qcore.hpp"

namespace veriphoton {

namespace {

constexpr int kMinR = 9;

void check_sizes(int m, int n_qubits) {
    if (m < 1) throw QuantumError("m must be positive");
    if (n_qubits < 1) throw QuantumError("N must be positive");
}

}  // namespace

double single_pulse_base(int R) {
    if (R < 1) throw QuantumError("R must be at least 1");
    double base = 0.0;
    for (int j = 0; j < R; ++j) {
        // log of e^{-1}/(kR + j)!, summed until terms drop below 1e-30.
        double inner = 0.0;
        for (int k = 0;; ++k) {
            const double log_term = -1.0 - std::lgamma(k * R + j + 1.0);
            const double term = std::exp(2.0 * log_term);
            inner += term;
            if (std::exp(log_term) < 1e-30) break;
        }
        base += std::sqrt(inner);
    }
    return base;
}

double fidelity_series(int R, int m, int n_qubits) {
    check_sizes(m, n_qubits);
    if (R < 2) throw QuantumError("R must be at least 2");
    const double base = single_pulse_base(R);
    return std::exp(2.0 * m * n_qubits * std::log(base));
}

double fock_oracle_fidelity(int R, double alpha, int cutoff) {
    if (R < 1) throw QuantumError("R must be at least 1");
    if (!(alpha >= 0.0)) throw QuantumError("alpha must be non-negative");
    const double a2 = alpha * alpha;
    auto log_amplitude = [&](int n) {
        const double power = n == 0 ? 0.0 : (alpha > 0.0 ? n * std::log(alpha) : -1e300);
        return power - a2 / 2.0 - 0.5 * std::lgamma(n + 1.0);
    };
    std::vector<double> log_amp(static_cast<std::size_t>(cutoff) + 1);
    for (int n = 0; n <= cutoff; ++n) log_amp[static_cast<std::size_t>(n)] = log_amplitude(n);
    double tail = 0.0;
    for (int n = cutoff + 1; n <= cutoff + 200; ++n) tail += std::exp(2.0 * log_amplitude(n));
    if (tail > 1e-20) throw QuantumError("Fock cutoff too small for this alpha");

    const auto dim = static_cast<Eigen::Index>(cutoff + 1);
    CMatrix poisson = CMatrix::Zero(dim, dim);
    CMatrix discrete = CMatrix::Zero(dim, dim);
    for (Eigen::Index n = 0; n < dim; ++n) poisson(n, n) = std::exp(2.0 * log_amp[static_cast<std::size_t>(n)]);
    for (int j = 0; j < R; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / R;
        CVector beta(dim);
        for (Eigen::Index n = 0; n < dim; ++n) {
            beta(n) = std::polar(std::exp(log_amp[static_cast<std::size_t>(n)]), theta * static_cast<double>(n));
        }
        discrete += beta * beta.adjoint() / static_cast<double>(R);
    }
    // Renormalize the truncated matrices; the discarded mass is below 1e-20.
    poisson /= poisson.trace().real();
    discrete /= discrete.trace().real();
    return matrix_fidelity(DensityMatrix(poisson), DensityMatrix(discrete));
}

double f_min(int m, int n_qubits, int R) {
    check_sizes(m, n_qubits);
    if (R < kMinR) throw QuantumError("f_min needs R >= 9, got " + std::to_string(R));
    return 1.0 - 2.0 * m * n_qubits * std::pow(std::numbers::e / (R - 1), R - 1);
}

int required_R(int m, int n_qubits, double f) {
    if (n_qubits < 2) throw QuantumError("required_R needs N >= 2");
    if (m < 1) throw QuantumError("m must be positive");
    if (!(f >= 1.0)) throw QuantumError("f must be at least 1");
    const double n = n_qubits;
    const double x = 32.0 * m * n * n * n * f * f / ((n - 1.0) * (n - 1.0));
    return std::max(kMinR, static_cast<int>(std::ceil(std::log(x) + 1.0)));
}

double shift_bound(int m, int n_qubits, int R) {
    return std::sqrt(std::max(0.0, 1.0 - f_min(m, n_qubits, R)));
}

double shift_budget(int n_qubits, double f) {
    if (n_qubits < 2) throw QuantumError("shift budget needs N >= 2");
    return (n_qubits - 1.0) / (4.0 * n_qubits * f);
}

PhaseRandRow phaserand_row(int m, int n_qubits, double f) {
    PhaseRandRow row;
    row.m = m;
    row.n_qubits = n_qubits;
    row.f = f;
    row.R = required_R(m, n_qubits, f);
    row.f_series = fidelity_series(row.R, m, n_qubits);
    row.f_min = f_min(m, n_qubits, row.R);
    row.shift_bound = shift_bound(m, n_qubits, row.R);
    return row;
}

}  // namespace veriphoton
