#include "veriphoton/photonics.hpp"

#include <cmath>
#include <string>

#include "veriphoton/qcore.hpp"

namespace veriphoton {

void validate_pulse_params(int m, double alpha) {
    if (m < 8) throw QuantumError("pulse count m must be at least 8, got " + std::to_string(m));
    const double floor = std::pow(8.0 / m, 0.25);
    if (!(alpha >= floor - 1e-12 && alpha <= 1.0 + 1e-12)) {
        throw QuantumError("alpha must satisfy (8/m)^(1/4) <= alpha <= 1, got " + std::to_string(alpha));
    }
}

std::vector<double> truncated_poisson_pmf(double mean) {
    std::vector<double> pmf(kPoissonCutoff + 1);
    double term = std::exp(-mean);
    double total = 0.0;
    for (int n = 0; n <= kPoissonCutoff; ++n) {
        if (n > 0) term *= mean / n;
        pmf[static_cast<std::size_t>(n)] = term;
        total += term;
    }
    for (auto& p : pmf) p /= total;
    return pmf;
}

PulseBatch sample_batch(int m, double alpha, Rng& rng, int j) {
    validate_pulse_params(m, alpha);
    const auto pmf = truncated_poisson_pmf(alpha * alpha);
    PulseBatch batch;
    batch.alpha = alpha;
    batch.j = j;
    batch.pulses.reserve(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
        Pulse p;
        p.angle = Angle4::random(rng);
        const double u = uniform01(rng);
        double cumulative = 0.0;
        p.photon_count = kPoissonCutoff;
        for (int n = 0; n <= kPoissonCutoff; ++n) {
            cumulative += pmf[static_cast<std::size_t>(n)];
            if (u < cumulative) {
                p.photon_count = n;
                break;
            }
        }
        batch.pulses.push_back(p);
    }
    return batch;
}

PhotonStats photon_stats(const std::vector<int>& counts) {
    PhotonStats s;
    for (int n : counts) {
        if (n == 0) ++s.m0;
        if (n == 1) ++s.m1;
    }
    return s;
}

PhotonStats photon_stats(const PulseBatch& batch) { return photon_stats(qnd_report(batch)); }

std::vector<int> qnd_report(const PulseBatch& batch) {
    std::vector<int> counts;
    counts.reserve(batch.pulses.size());
    for (const auto& p : batch.pulses) counts.push_back(p.photon_count);
    return counts;
}

std::vector<int> survivors(const std::vector<int>& reported_counts) {
    std::vector<int> idx;
    for (std::size_t k = 0; k < reported_counts.size(); ++k) {
        if (reported_counts[k] < 0) throw QuantumError("photon counts must be non-negative");
        if (reported_counts[k] >= 1) idx.push_back(static_cast<int>(k));
    }
    return idx;
}

double vacuum_threshold(int m, double alpha) {
    const double a2 = alpha * alpha;
    return m * std::exp(-a2) * (1.0 + a2 / 2.0);
}

bool threshold_check(int m0, int m, double alpha) {
    if (m0 < 0 || m0 > m) throw QuantumError("vacuum count must lie in [0, m]");
    return m0 <= vacuum_threshold(m, alpha);
}

double hoeffding_term(int m, double alpha) {
    const double a2 = alpha * alpha;
    return std::exp(-m * std::exp(-2.0 * a2) * a2 * a2 / 2.0);
}

double honest_reject_bound(int m, double alpha, int n_reps) {
    validate_pulse_params(m, alpha);
    if (n_reps < 1) throw QuantumError("n_reps must be at least 1");
    return n_reps * hoeffding_term(m, alpha);
}

double survivor_lower_bound(int m, double alpha) {
    validate_pulse_params(m, alpha);
    return m * std::pow(alpha, 4) / 4.0;
}

double threshold_pass_probability(int m, double alpha) {
    validate_pulse_params(m, alpha);
    const double q = std::exp(-alpha * alpha);
    const double threshold = vacuum_threshold(m, alpha);
    double total = 0.0;
    for (int k = 0; k <= m && k <= threshold; ++k) {
        const double log_term = std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0) +
                                k * std::log(q) + (m - k) * std::log1p(-q);
        total += std::exp(log_term);
    }
    return std::min(1.0, total);
}

}  // namespace veriphoton
