#include "veriphoton/selftest.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "veriphoton/hamiltonian.hpp"
#include "veriphoton/phasernd.hpp"
#include "veriphoton/photonics.hpp"
#include "veriphoton/protocol1.hpp"
#include "veriphoton/protocol2.hpp"

namespace veriphoton {

namespace {

struct Failure {
    std::string detail;
};

void require(bool ok, const std::string& detail) {
    if (!ok) throw Failure{detail};
}

std::string show(double x) {
    std::ostringstream s;
    s.precision(12);
    s << x;
    return s.str();
}

void suite_bell_completeness() {
    Rng rng(101);
    for (int t = 0; t < 50; ++t) {
        const auto p = bell_probabilities(random_state(2, rng), 0, 1);
        const double total = p[0] + p[1] + p[2] + p[3];
        require(std::abs(total - 1.0) < 1e-12, "Bell probabilities sum to " + show(total));
    }
}

void suite_operator_bounds() {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto inst = synth_instance(2 + static_cast<int>(seed % 3), seed, 0.2);
        const auto ev = spectrum(inst.hamiltonian);
        require(ev(0) >= -1e-10 && ev(ev.size() - 1) <= 1.0 + 1e-10,
                "spectrum outside [0, 1] for seed " + std::to_string(seed));
    }
}

void suite_honest_closed_form() {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto inst = synth_instance(2 + static_cast<int>(seed % 2), 500 + seed, 0.2);
        const double brute = brute_force_pacc(inst, ProverPovm::honest(*inst.witness));
        const double closed = exact_pacc_honest(inst);
        require(std::abs(brute - closed) < 1e-9,
                "brute force " + show(brute) + " vs closed form " + show(closed));
    }
}

void suite_povm_bound() {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto inst = synth_instance(2, 900 + seed, 0.2);
        const int n = inst.hamiltonian.n_qubits();
        const double ceiling = 1.0 - ground_energy(inst.hamiltonian).energy / 2.0;
        std::vector<ProverPovm> povms{
            ProverPovm(RandomOutcomePovm{n}),
            ProverPovm(ProductMeasurePovm{std::vector<ProductMeasurePovm::Qubit>(static_cast<std::size_t>(n))}),
            ProverPovm(TeleportPovm{*inst.witness, std::vector<QubitChannel>(static_cast<std::size_t>(n),
                                                                            QubitChannel::depolarizing(0.3))}),
        };
        for (const auto& povm : povms) {
            const double exact = exact_pacc_povm(inst.hamiltonian, povm);
            const double brute = brute_force_pacc(inst.hamiltonian, povm);
            require(std::abs(exact - brute) < 1e-9, std::string(povm.name()) + ": twirl " + show(exact) +
                                                        " vs enumeration " + show(brute));
            require(exact <= ceiling + 1e-9, std::string(povm.name()) + " exceeds 1 - E0/2");
        }
    }
}

void suite_i1dc_formula(const PhiFunction& phi) {
    for (int len = 2; len <= 4; ++len) {
        const int tuples = 1 << (2 * len);
        for (int code = 0; code < tuples; ++code) {
            std::vector<Angle4> angles;
            for (int l = 0; l < len; ++l) angles.emplace_back((code >> (2 * l)) & 3);
            for (const auto& branch : run_statevector_exhaustive(angles)) {
                const auto actual = angle_of(branch.final_state);
                require(actual.has_value(), "I1DC output is not an equatorial Z4 state");
                require(*actual == phi(angles, branch.outcomes),
                        "phi rule disagrees with the statevector chain at L=" + std::to_string(len));
                require(std::abs(branch.probability - std::ldexp(1.0, 1 - len)) < 1e-12,
                        "I1DC branch probability is not uniform");
            }
        }
    }
}

void suite_threshold() {
    require(std::abs(vacuum_threshold(8, 1.0) - 12.0 / std::exp(1.0)) < 1e-12, "m=8 threshold is not 12/e");
    require(threshold_check(4, 8, 1.0) && !threshold_check(5, 8, 1.0), "m=8 threshold decisions");
    require(std::abs(honest_reject_bound(75, 1.0, 2) - 2.0 * std::exp(-75.0 * std::exp(-2.0) / 2.0)) < 1e-15,
            "honest reject bound");
}

void suite_phaserand() {
    for (int R = 2; R <= 16; ++R) {
        const double base = single_pulse_base(R);
        const double oracle = fock_oracle_fidelity(R, 1.0);
        require(std::abs(base * base - oracle) < 1e-6,
                "R=" + std::to_string(R) + ": series " + show(base * base) + " vs Fock oracle " + show(oracle));
    }
    require(required_R(75, 2, 10.0) == 16, "required_R(75, 2, 10) != 16");
    require(shift_bound(75, 2, 16) <= shift_budget(2, 10.0) + 1e-12, "shift bound exceeds the gap budget");
}

void suite_p2_determinism() {
    InstanceSpec inst = synth_instance(2, 7, 0.2);
    RunConfig config{inst, 16, 1.0, 1000, 42, HonestAdversary{}};
    for (std::uint64_t t = 0; t < 20; ++t) {
        const auto a = round_to_json(run_round(config, t), true).dump();
        const auto b = round_to_json(run_round(config, t), true).dump();
        require(a == b, "run_round is not reproducible for trial " + std::to_string(t));
    }
}

}  // namespace

Angle4 phi_sign_flipped(std::span<const Angle4> angles, std::span<const std::uint8_t> outcomes) {
    std::vector<std::uint8_t> flipped(outcomes.begin(), outcomes.end());
    if (!flipped.empty()) flipped.back() ^= 1u;
    return phi_from_outcomes(angles, flipped);
}

std::vector<SuiteResult> run_selftest(const SelftestOptions& options) {
    const std::vector<std::pair<std::string, std::function<void()>>> suites{
        {"qcore.bell_completeness", suite_bell_completeness},
        {"hamiltonian.operator_bounds", suite_operator_bounds},
        {"protocol1.honest_closed_form", suite_honest_closed_form},
        {"protocol1.povm_bound", suite_povm_bound},
        {"i1dc.phi_formula", [&] { suite_i1dc_formula(options.phi); }},
        {"photonics.threshold", suite_threshold},
        {"phasernd.series_vs_oracle", suite_phaserand},
        {"protocol2.determinism", suite_p2_determinism},
    };
    std::vector<SuiteResult> results;
    for (const auto& [name, body] : suites) {
        SuiteResult r{name, true, ""};
        try {
            body();
        } catch (const Failure& f) {
            r.passed = false;
            r.detail = f.detail;
        } catch (const std::exception& e) {
            r.passed = false;
            r.detail = std::string("exception: ") + e.what();
        }
        results.push_back(r);
        if (!r.passed) break;
    }
    return results;
}

}  // namespace veriphoton
