#pragma once

// Continuous versus R-step discrete phase randomization of coherent pulses.

#include <string>
#include <vector>

namespace veriphoton {

inline constexpr int kFockCutoff = 40;

/// Single-pulse fidelity root at alpha = 1:
///   sum_{j<R} sqrt( sum_k [e^{-1} / (kR + j)!]^2 ).
double single_pulse_base(int R);

/// base^{2 m N}, evaluated in log space.
double fidelity_series(int R, int m, int n_qubits);

/// Uhlmann fidelity of the Poisson-diagonal state and the uniform mixture of
/// R phase-rotated coherent states |alpha e^{2 pi i j / R}>, built in the
/// truncated number basis.
double fock_oracle_fidelity(int R, double alpha, int cutoff = kFockCutoff);

/// 1 - 2 m N (e / (R - 1))^{R - 1}; requires R >= 9.
double f_min(int m, int n_qubits, int R);

/// max(9, ceil(ln(32 m N^3 f^2 / (N - 1)^2) + 1)).
int required_R(int m, int n_qubits, double f);

/// sqrt(1 - F_min), the bound on the acceptance-probability shift.
double shift_bound(int m, int n_qubits, int R);

/// (N - 1) / (4 N f), the shift the gap can absorb.
double shift_budget(int n_qubits, double f);

struct PhaseRandRow {
    int m = 0;
    int n_qubits = 0;
    double f = 1.0;
    int R = 9;
    double f_series = 0.0;
    double f_min = 0.0;
    double shift_bound = 0.0;
};

PhaseRandRow phaserand_row(int m, int n_qubits, double f);

}  // namespace veriphoton
