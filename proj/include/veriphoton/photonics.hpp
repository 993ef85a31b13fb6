#pragma once

// Phase-randomized coherent pulses: Poisson photon counts, Z4 polarization
// angles, QND reports and the vacuum-count threshold test.

#include <cstdint>
#include <vector>

#include "veriphoton/random.hpp"

namespace veriphoton {

/// Angle value * pi/2, kept as an exact residue mod 4.
class Angle4 {
  public:
    constexpr Angle4() = default;
    constexpr explicit Angle4(int value) : value_(static_cast<std::uint8_t>(((value % 4) + 4) % 4)) {}

    constexpr int value() const { return value_; }
    constexpr double radians() const { return value_ * 1.5707963267948966; }

    friend constexpr Angle4 operator+(Angle4 a, Angle4 b) { return Angle4(a.value_ + b.value_); }
    friend constexpr Angle4 operator-(Angle4 a) { return Angle4(-a.value_); }
    friend constexpr bool operator==(Angle4, Angle4) = default;

    static Angle4 random(Rng& rng) { return Angle4(static_cast<int>(rng() >> 62)); }

  private:
    std::uint8_t value_ = 0;
};

struct Pulse {
    Angle4 angle;
    int photon_count = 0;
};

inline constexpr int kPoissonCutoff = 32;

struct PulseBatch {
    std::vector<Pulse> pulses;
    double alpha = 1.0;
    int j = 0;

    int m() const { return static_cast<int>(pulses.size()); }
};

struct PhotonStats {
    int m0 = 0;
    int m1 = 0;
};

/// Throws QuantumError unless m >= 8 and (8/m)^{1/4} <= alpha <= 1.
void validate_pulse_params(int m, double alpha);

/// P(n) for Poisson(mean) truncated at kPoissonCutoff and renormalized.
std::vector<double> truncated_poisson_pmf(double mean);

PulseBatch sample_batch(int m, double alpha, Rng& rng, int j = 0);

PhotonStats photon_stats(const PulseBatch& batch);
PhotonStats photon_stats(const std::vector<int>& counts);

/// Honest QND readout: the sampled count of every pulse.
std::vector<int> qnd_report(const PulseBatch& batch);

/// 0-based indices of pulses reported with n >= 1, in pulse order.
std::vector<int> survivors(const std::vector<int>& reported_counts);

double vacuum_threshold(int m, double alpha);
bool threshold_check(int m0, int m, double alpha);

/// Per-repetition Hoeffding bound exp(-m e^{-2 alpha^2} alpha^4 / 2).
double hoeffding_term(int m, double alpha);
double honest_reject_bound(int m, double alpha, int n_reps);

double survivor_lower_bound(int m, double alpha);

/// Exact probability that an honest batch passes the threshold, from the
/// binomial law of the vacuum count.
double threshold_pass_probability(int m, double alpha);

}  // namespace veriphoton
