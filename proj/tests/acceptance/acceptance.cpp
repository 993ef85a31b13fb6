// One line per acceptance criterion; exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "veriphoton/experiment.hpp"
#include "veriphoton/i1dc.hpp"
#include "veriphoton/phasernd.hpp"
#include "veriphoton/protocol1.hpp"
#include "veriphoton/protocol2.hpp"

using namespace veriphoton;

namespace {

constexpr double kR = 1.0 / std::numbers::sqrt2;

struct Outcome {
    bool ok = true;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > limit_s) {
        out.ok = false;
        out.detail += " (over the " + std::to_string(static_cast<int>(limit_s)) + " s limit)";
    }
    if (!out.ok) ++failures;
    std::printf("[%s] %2d %s: %s [%.1f s]\n", out.ok ? "PASS" : "FAIL", id, name, out.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(double x) { return format_number(x); }

InstanceSpec singlet_instance() {
    return {LocalHamiltonian(2, {{0, 1, 1.0, 1}}), 0.0, 0.1, 10.0, StateVector({0.0, kR, -kR, 0.0})};
}

// sqrt(1-t) |ground> + sqrt(t) |top>, energy exactly `target`.
StateVector state_at_energy(const LocalHamiltonian& h, double target) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_matrix(h).real());
    const auto& vecs = es.eigenvectors();
    const auto& vals = es.eigenvalues();
    const double t = (target - vals(0)) / (vals(vals.size() - 1) - vals(0));
    std::vector<Complex> amps(static_cast<std::size_t>(vecs.rows()));
    for (Eigen::Index i = 0; i < vecs.rows(); ++i) {
        amps[static_cast<std::size_t>(i)] = std::sqrt(1.0 - t) * vecs(i, 0) + std::sqrt(t) * vecs(i, vecs.cols() - 1);
    }
    return StateVector::normalized(amps);
}

std::vector<ProverPovm> povm_adversaries(const InstanceSpec& inst, Rng& rng) {
    const int n = inst.hamiltonian.n_qubits();
    const auto un = static_cast<std::size_t>(n);
    std::vector<ProverPovm> out;
    out.push_back(ProverPovm::honest(random_state(n, rng)));
    out.push_back(ProverPovm(RandomOutcomePovm{n}));
    ProductMeasurePovm product;
    for (int k = 0; k < n; ++k) {
        ProductMeasurePovm::Qubit q;
        q.basis = "XYZ"[uniform_index(rng, 3)];
        q.report = {{{random_bit(rng), random_bit(rng)}, {random_bit(rng), random_bit(rng)}}};
        product.qubits.push_back(q);
    }
    out.push_back(ProverPovm(product));
    out.push_back(ProverPovm(ConstantOutcomePovm{BellOutcomes{Bits(un, 0), Bits(un, 1)}}));
    out.push_back(ProverPovm(
        TeleportPovm{*inst.witness, std::vector<QubitChannel>(un, QubitChannel::depolarizing(uniform01(rng)))}));
    out.push_back(ProverPovm(TeleportPovm{
        *inst.witness, std::vector<QubitChannel>(un, QubitChannel::replace(random_density_matrix(2, 1, rng)))}));
    return out;
}

Outcome c1_honest_closed_form() {
    double worst = 0.0;
    Rng rng(101);
    for (std::uint64_t i = 0; i < 20; ++i) {
        const auto inst = synth_instance(2 + static_cast<int>(i % 2), 1000 + i, 0.3);
        const auto eta = i % 2 ? random_state(inst.hamiltonian.n_qubits(), rng) : *inst.witness;
        const double brute = brute_force_pacc(inst.hamiltonian, ProverPovm::honest(eta));
        worst = std::max(worst, std::abs(brute - (1.0 - energy(inst.hamiltonian, eta) / 2.0)));
    }
    return {worst <= 1e-9, "max |brute - closed form| = " + fmt(worst) + " over 20 instances"};
}

Outcome c2_malicious_bound() {
    double worst_excess = -1.0;
    double worst_ground = 0.0;
    int povms = 0;
    Rng rng(202);
    for (std::uint64_t i = 0; i < 20; ++i) {
        const auto inst = synth_instance(2 + static_cast<int>(i % 2), 2000 + i, 0.3);
        const auto ground = ground_energy(inst.hamiltonian);
        const double ceiling = 1.0 - ground.energy / 2.0;
        for (const auto& povm : povm_adversaries(inst, rng)) {
            worst_excess = std::max(worst_excess, exact_pacc_povm(inst.hamiltonian, povm) - ceiling);
            ++povms;
        }
        worst_ground = std::max(
            worst_ground, std::abs(exact_pacc_povm(inst.hamiltonian, ProverPovm::honest(ground.state)) - ceiling));
    }
    return {worst_excess <= 1e-9 && worst_ground <= 1e-9,
            std::to_string(povms) + " POVMs, max excess over 1 - E0/2 = " + fmt(worst_excess) +
                ", ground-witness deviation = " + fmt(worst_ground)};
}

Outcome c3_protocol1_gap() {
    const auto inst = synth_instance(3, 303, 0.1);
    const double gap = inst.b - inst.a;
    if (std::abs(gap - 1.0 / inst.f) > 1e-12) return {false, "instance gap is not 1/f"};
    const auto wrong = state_at_energy(inst.hamiltonian, inst.b);
    const double honest = exact_pacc_povm(inst.hamiltonian, ProverPovm::honest(*inst.witness));
    const double bad = exact_pacc_povm(inst.hamiltonian, ProverPovm::honest(wrong));
    const double diff = honest - bad;
    return {diff >= gap / 2.0 - 1e-9 && energy(inst.hamiltonian, wrong) >= inst.b - 1e-12,
            "N=3, b-a=" + fmt(gap) + ", p_honest - p_wrong = " + fmt(diff) + " vs (b-a)/2 = " + fmt(gap / 2.0)};
}

Outcome c4_teleportation() {
    const std::array<std::array<Complex, 2>, 2> x_basis{{{kR, kR}, {kR, -kR}}};
    const std::array<std::array<Complex, 2>, 2> y_basis{{{kR, Complex(0, -kR)}, {kR, Complex(0, kR)}}};
    Rng rng(404);
    const auto eta = random_state(2, rng);
    double worst = 0.0;
    for (int hv = 0; hv < 4; ++hv) {
        const Bits h{static_cast<std::uint8_t>(hv >> 1), static_cast<std::uint8_t>(hv & 1)};
        std::array<double, 4> oracle{}, empirical{};
        for (int sp = 0; sp < 4; ++sp) {
            const auto& b0 = (h[0] ? y_basis : x_basis)[static_cast<std::size_t>(sp >> 1)];
            const auto& b1 = (h[1] ? y_basis : x_basis)[static_cast<std::size_t>(sp & 1)];
            Complex amp = 0.0;
            for (std::size_t a = 0; a < 4; ++a) amp += std::conj(b0[a >> 1] * b1[a & 1]) * eta[a];
            oracle[static_cast<std::size_t>(sp)] = std::norm(amp);
        }
        const int samples = 100000;
        for (int t = 0; t < samples; ++t) {
            const VerifierSecret secret{
                h, {static_cast<std::uint8_t>(random_bit(rng)), static_cast<std::uint8_t>(random_bit(rng))}};
            const auto sp = s_prime(secret, honest_prover(prepare_verifier_state(secret), eta, rng));
            empirical[static_cast<std::size_t>(sp[0] * 2 + sp[1])] += 1.0 / samples;
        }
        double tv = 0.0;
        for (std::size_t i = 0; i < 4; ++i) tv += std::abs(oracle[i] - empirical[i]) / 2.0;
        worst = std::max(worst, tv);
    }
    return {worst < 0.02, "N=2, 10^5 samples per h, max TV = " + fmt(worst)};
}

Outcome c5_i1dc() {
    std::size_t branches = 0;
    double worst_p = 0.0;
    bool phi_ok = true;
    for (int length = 2; length <= 5; ++length) {
        const double weight = std::ldexp(1.0, -(length - 1));
        for (std::size_t idx = 0; idx < (std::size_t{1} << (2 * length)); ++idx) {
            std::vector<Angle4> angles;
            std::size_t rest = idx;
            for (int l = 0; l < length; ++l, rest /= 4) angles.emplace_back(static_cast<int>(rest % 4));
            for (const auto& b : run_statevector_exhaustive(angles)) {
                ++branches;
                worst_p = std::max(worst_p, std::abs(b.probability - weight));
                const auto found = angle_of(b.final_state);
                phi_ok &= found.has_value() && *found == phi_from_outcomes(angles, b.outcomes);
            }
        }
    }
    return {phi_ok && worst_p <= 1e-12,
            std::to_string(branches) + " branches, phi formula " + (phi_ok ? "exact" : "MISMATCH") +
                ", max |p - 2^-(L-1)| = " + fmt(worst_p)};
}

Outcome c6_hoeffding() {
    const RunConfig config{singlet_instance(), 75, 1.0, 10000, 606, HonestAdversary{}};
    std::vector<RoundTranscript> rounds;
    estimate_pacc(config, 0, &rounds);
    std::uint64_t reps = 0, fails = 0, floor_violations = 0;
    for (const auto& round : rounds) {
        for (const auto& rec : round.repetitions) {
            ++reps;
            if (!rec.threshold_pass) {
                ++fails;
            } else if (75 - rec.actual.m0 < survivor_lower_bound(75, 1.0)) {
                ++floor_violations;
            }
        }
    }
    const double freq = static_cast<double>(fails) / static_cast<double>(reps);
    const double se = std::sqrt(freq * (1.0 - freq) / static_cast<double>(reps));
    const double bound = hoeffding_term(75, 1.0);
    return {freq <= bound + 3.0 * se && floor_violations == 0,
            std::to_string(reps) + " repetitions, failure frequency " + fmt(freq) + " vs bound " + fmt(bound) +
                ", survivor-floor violations " + std::to_string(floor_violations)};
}

Outcome c7_completeness() {
    const RunConfig config{singlet_instance(), 75, 1.0, 10000, 707, HonestAdversary{}};
    const auto est = estimate_pacc(config);
    const double floor = 1.0 - 0.0125 - 3.0 * est.mc.stderr_;
    return {est.mc.estimate >= floor,
            "p_acc = " + fmt(est.mc.estimate) + " (exact " + fmt(*est.exact) + ") vs floor " + fmt(floor)};
}

Outcome c8_soundness() {
    Rng rng(808);
    const auto inst = synth_instance(2, 808, 0.3);
    const std::vector<AdversarySpec> adversaries{
        WrongWitnessAdversary{random_state(2, rng)},
        RandomOutcomesAdversary{},
        FixedStateReplaceAdversary{random_density_matrix(2, 2, rng)},
        SinglePhotonChannelAdversary{0.4},
        VacuumForgeAdversary{VacuumForgeAdversary::Strategy::Greedy, random_state(2, rng)},
        VacuumForgeAdversary{VacuumForgeAdversary::Strategy::AllOrNothing, random_state(2, rng)},
    };
    bool ok = true;
    std::ostringstream detail;
    std::uint64_t exposed = 0, exposed_accepted = 0;
    for (const auto& adv : adversaries) {
        const RunConfig config{inst, 75, 1.0, 20000, 809, adv};
        std::vector<RoundTranscript> rounds;
        const auto est = estimate_pacc(config, 0, &rounds);
        const double ceiling = 1.0 - est.b_eff / 2.0 + 0.0125 + 3.0 * est.mc.stderr_;
        ok &= est.bound_ok && est.mc.estimate <= ceiling;
        detail << adversary_name(adv) << ' ' << fmt(est.mc.estimate) << "<=" << fmt(ceiling) << "; ";
        if (std::holds_alternative<VacuumForgeAdversary>(adv)) {
            const double threshold = vacuum_threshold(75, 1.0);
            for (const auto& round : rounds) {
                bool caught = false;
                for (const auto& rec : round.repetitions) {
                    caught |= rec.m0_reported >= rec.actual.m0 + rec.actual.m1 &&
                              rec.actual.m0 + rec.actual.m1 > threshold;
                }
                if (caught) {
                    ++exposed;
                    exposed_accepted += round.verdict.accepted ? 1 : 0;
                }
            }
        }
    }
    ok &= exposed > 0 && exposed_accepted == 0;
    detail << "forge rounds with m0~ >= m0+m1 > threshold: " << exposed << ", accepted " << exposed_accepted;
    return {ok, detail.str()};
}

Outcome c9_final_gap() {
    const auto inst = singlet_instance();
    const auto& h = inst.hamiltonian;
    const auto wrong = state_at_energy(h, inst.b);
    const std::vector<AdversarySpec> adversaries{
        WrongWitnessAdversary{wrong},
        SinglePhotonChannelAdversary{0.5},
        FixedStateReplaceAdversary{DensityMatrix::maximally_mixed(2)},
        RandomOutcomesAdversary{},
        VacuumForgeAdversary{VacuumForgeAdversary::Strategy::Greedy, wrong},
    };
    const std::uint64_t trials = 100000;
    const auto honest = estimate_pacc(RunConfig{inst, 75, 1.0, trials, 909, HonestAdversary{}});
    double worst_est = -1.0;
    McEstimate worst;
    std::string worst_name;
    bool calibrated = true;
    for (const auto& adv : adversaries) {
        const auto est = estimate_pacc(RunConfig{inst, 75, 1.0, trials, 910, adv});
        calibrated &= est.b_eff >= inst.b - 1e-9;
        if (est.mc.estimate > worst_est) {
            worst_est = est.mc.estimate;
            worst = est.mc;
            worst_name = adversary_name(adv);
        }
    }
    const double gap = gap_lower_bound(2, 10.0);
    const double ci = honest.mc.half_width + worst.half_width;
    const double diff = honest.mc.estimate - worst.estimate;
    return {calibrated && diff >= gap - ci && distinguish(honest.mc, worst, 2, 10.0),
            "honest " + fmt(honest.mc.estimate) + " - worst (" + worst_name + ") " + fmt(worst.estimate) + " = " +
                fmt(diff) + " vs " + fmt(gap) + " - " + fmt(ci)};
}

Outcome c10_phase_randomization() {
    double worst = 0.0;
    for (int R = 2; R <= 16; ++R) {
        const double base = single_pulse_base(R);
        worst = std::max(worst, std::abs(base * base - fock_oracle_fidelity(R, 1.0)));
    }
    bool lower_ok = true;
    for (int R = 9; R <= 24; ++R) {
        for (int m = 8; m <= 200; m += 8) {
            for (int n = 1; n <= 6; ++n) lower_ok &= fidelity_series(R, m, n) >= f_min(m, n, R) - 1e-9;
        }
    }
    const int r = required_R(75, 2, 10.0);
    const double shift = shift_bound(75, 2, r);
    const double budget = shift_budget(2, 10.0);
    return {worst <= 1e-6 && lower_ok && r == 16 && shift <= budget,
            "max |series - oracle| = " + fmt(worst) + ", F_min grid " + (lower_ok ? "holds" : "VIOLATED") +
                ", required_R = " + std::to_string(r) + ", shift " + fmt(shift) + " <= " + fmt(budget)};
}

Outcome c11_reproducibility() {
    const auto inst = singlet_instance();
    bool ok = true;
    std::string detail;
    for (ProtocolKind kind : {ProtocolKind::P1, ProtocolKind::P2}) {
        ExperimentConfig config{kind, RunConfig{inst, 75, 1.0, 3000, 1111, SinglePhotonChannelAdversary{0.3}},
                                10.0, true, kind == ProtocolKind::P2, std::nullopt};
        const auto a = run_experiment(config, 1);
        const auto b = run_experiment(config, 4);
        const auto c = run_experiment(config, 3);
        const bool same = a.summary_csv == b.summary_csv && a.results_jsonl == b.results_jsonl &&
                          a.transcripts_jsonl == b.transcripts_jsonl && a.summary_csv == c.summary_csv &&
                          a.transcripts_jsonl == c.transcripts_jsonl;
        ok &= same;
        detail += std::string(kind == ProtocolKind::P1 ? "p1" : "p2") + (same ? " identical" : " DIFFERS") +
                  " at 1/3/4 workers; ";
    }
    return {ok, detail};
}

}  // namespace

int main() {
    criterion(1, "honest closed form", 10, c1_honest_closed_form);
    criterion(2, "malicious POVM bound", 30, c2_malicious_bound);
    criterion(3, "Protocol 1 gap", 10, c3_protocol1_gap);
    criterion(4, "teleportation statistics", 30, c4_teleportation);
    criterion(5, "I1DC equivalence", 60, c5_i1dc);
    criterion(6, "Hoeffding bounds", 60, c6_hoeffding);
    criterion(7, "end-to-end completeness", 120, c7_completeness);
    criterion(8, "end-to-end soundness", 300, c8_soundness);
    criterion(9, "final gap", 300, c9_final_gap);
    criterion(10, "phase randomization", 30, c10_phase_randomization);
    criterion(11, "reproducibility", 120, c11_reproducibility);
    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
