#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "veriphoton/protocol1.hpp"

using namespace veriphoton;

namespace {

constexpr double kR = 1.0 / std::numbers::sqrt2;

const StateVector& singlet() {
    static const StateVector s({0.0, kR, -kR, 0.0});
    return s;
}

LocalHamiltonian single_term(int c) { return LocalHamiltonian(2, {{0, 1, 1.0, c}}); }

CVector bell_from_paulis(int w, int z) {
    CVector phi = CVector::Zero(4);
    phi(0) = kR;
    phi(3) = kR;
    CMatrix local = CMatrix::Identity(2, 2);
    if (w) local = pauli_x() * local;
    if (z) local = pauli_z() * local;
    return kron(local, CMatrix::Identity(2, 2)) * phi;
}

// Born table of the pairwise Bell measurement: reorder eta (x) psi into
// (eta_0, v_0, eta_1, v_1, ...) and project onto products of Bell vectors.
std::vector<double> born_table(const StateVector& eta, const StateVector& psi) {
    const int n = eta.n_qubits();
    const std::size_t dim = std::size_t{1} << (2 * n);
    CVector paired = CVector::Zero(static_cast<Eigen::Index>(dim));
    for (std::size_t a = 0; a < (std::size_t{1} << n); ++a) {
        for (std::size_t v = 0; v < (std::size_t{1} << n); ++v) {
            std::size_t idx = 0;
            for (int k = 0; k < n; ++k) {
                idx = (idx << 2) | (((a >> (n - 1 - k)) & 1u) << 1) | ((v >> (n - 1 - k)) & 1u);
            }
            paired(static_cast<Eigen::Index>(idx)) = eta[a] * psi[v];
        }
    }
    std::vector<double> table(dim);
    for (std::size_t o = 0; o < dim; ++o) {
        const BellOutcomes out = outcome_from_index(o, n);
        CMatrix bell = CMatrix::Identity(1, 1);
        for (int k = 0; k < n; ++k) {
            bell = kron(bell, bell_from_paulis(out.w[static_cast<std::size_t>(k)], out.z[static_cast<std::size_t>(k)]));
        }
        table[o] = std::norm(bell.col(0).dot(paired));
    }
    return table;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    double tv = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
    return tv / 2.0;
}

ProverPovm random_product_povm(int n, Rng& rng) {
    ProductMeasurePovm p;
    const char bases[] = {'X', 'Y', 'Z'};
    for (int k = 0; k < n; ++k) {
        ProductMeasurePovm::Qubit q;
        q.basis = bases[uniform_index(rng, 3)];
        for (auto& r : q.report) r = {random_bit(rng), random_bit(rng)};
        p.qubits.push_back(q);
    }
    return ProverPovm(p);
}

std::vector<ProverPovm> povm_family(const InstanceSpec& inst, Rng& rng) {
    const int n = inst.hamiltonian.n_qubits();
    std::vector<ProverPovm> out;
    out.push_back(ProverPovm::honest(*inst.witness));
    out.push_back(ProverPovm::honest(random_state(n, rng)));
    out.push_back(ProverPovm(RandomOutcomePovm{n}));
    out.push_back(random_product_povm(n, rng));
    BellOutcomes constant{Bits(static_cast<std::size_t>(n)), Bits(static_cast<std::size_t>(n))};
    for (auto& b : constant.z) b = static_cast<std::uint8_t>(random_bit(rng));
    out.push_back(ProverPovm(ConstantOutcomePovm{constant}));
    out.push_back(ProverPovm(TeleportPovm{*inst.witness, std::vector<QubitChannel>(static_cast<std::size_t>(n),
                                                                                   QubitChannel::depolarizing(uniform01(rng)))}));
    out.push_back(ProverPovm(TeleportPovm{random_state(n, rng),
                                          std::vector<QubitChannel>(static_cast<std::size_t>(n),
                                                                    QubitChannel::replace(random_density_matrix(2, 2, rng)))}));
    return out;
}

}  // namespace

TEST(PrepareVerifierState, Examples) {
    const auto plus = prepare_verifier_state({{0}, {0}});
    EXPECT_NEAR(std::abs(plus[0] - Complex(kR, 0)), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(plus[1] - Complex(kR, 0)), 0.0, 1e-15);
    const auto plus_i = prepare_verifier_state({{1}, {0}});
    EXPECT_NEAR(std::abs(plus_i[1] - Complex(0, kR)), 0.0, 1e-15);
    const auto minus_i = prepare_verifier_state({{1}, {1}});
    EXPECT_NEAR(std::abs(minus_i[1] - Complex(0, -kR)), 0.0, 1e-15);
}

TEST(PrepareVerifierState, ProductOfQubits) {
    const auto psi = prepare_verifier_state({{0, 1}, {1, 0}});
    // |-> (x) |+i>
    const std::vector<Complex> ref{0.5, Complex(0, 0.5), -0.5, Complex(0, -0.5)};
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(psi[i] - ref[i]), 0.0, 1e-15);
}

TEST(SPrime, Examples) {
    EXPECT_EQ(s_prime({{1}, {0}}, {{1}, {0}}), Bits{1});
    EXPECT_EQ(s_prime({{0}, {1}}, {{1}, {1}}), Bits{0});
    EXPECT_EQ(s_prime({{1}, {1}}, {{0}, {0}}), Bits{1});
}

TEST(Decide, AutoAcceptWhenBasesDiffer) {
    const VerifierSecret secret{{0, 1}, {0, 0}};
    for (int o = 0; o < 16; ++o) {
        const auto v = decide(secret, outcome_from_index(static_cast<std::size_t>(o), 2), {0, 1, 1.0, 1});
        EXPECT_TRUE(v.accepted);
        EXPECT_EQ(v.branch, Branch::AutoAccept);
    }
}

TEST(Decide, ParityRule) {
    const VerifierSecret secret{{0, 0}, {0, 1}};
    const BellOutcomes none{{0, 0}, {0, 0}};
    const auto accept = decide(secret, none, {0, 1, 1.0, 1});
    EXPECT_TRUE(accept.accepted);
    EXPECT_EQ(accept.branch, Branch::ParityAccept);
    const VerifierSecret same{{0, 0}, {0, 0}};
    const auto reject = decide(same, none, {0, 1, 1.0, 1});
    EXPECT_FALSE(reject.accepted);
    EXPECT_EQ(reject.branch, Branch::ParityReject);
    ASSERT_TRUE(reject.sampled_pair.has_value());
    EXPECT_EQ(*reject.sampled_pair, std::make_pair(0, 1));
}

TEST(Decide, RejectsMismatchedSizes) {
    Rng rng(1);
    EXPECT_THROW(verdict({{0}, {0}}, {{0, 0}, {0, 0}}, single_term(1), rng), QuantumError);
    EXPECT_THROW(s_prime({{0, 0}, {0}}, {{0, 0}, {0, 0}}), QuantumError);
}

TEST(HonestProver, ZeroZeroOutcomes) {
    const auto zero = StateVector::basis(1, 0);
    const auto dist = ProverPovm::honest(zero).outcome_distribution(std::vector<StateVector>{zero});
    EXPECT_NEAR(dist[outcome_index({{0}, {0}})], 0.5, 1e-15);
    EXPECT_NEAR(dist[outcome_index({{0}, {1}})], 0.5, 1e-15);
    Rng rng(4);
    for (int t = 0; t < 100; ++t) EXPECT_EQ(honest_prover(zero, zero, rng).w, Bits{0});
}

TEST(HonestProver, PlusPlusCompleteness) {
    const auto plus = StateVector({kR, kR});
    const auto dist = ProverPovm::honest(plus).outcome_distribution(std::vector<StateVector>{plus});
    double total = 0.0;
    for (double p : dist) total += p;
    EXPECT_NEAR(total, 1.0, 1e-12);
    const auto table = born_table(plus, plus);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(dist[i], table[i], 1e-14);
}

TEST(HonestProver, SampledDistributionMatchesBornTable) {
    Rng rng(19);
    for (int trial = 0; trial < 3; ++trial) {
        const auto eta = random_state(2, rng);
        const std::vector<StateVector> qubits{random_state(1, rng), random_state(1, rng)};
        const auto psi = tensor(qubits[0], qubits[1]);
        const auto table = born_table(eta, psi);
        const auto forward = ProverPovm::honest(eta).outcome_distribution(qubits);
        EXPECT_LT(total_variation(table, forward), 1e-12);
        const int samples = 100000;
        std::vector<double> empirical(16, 0.0);
        for (int t = 0; t < samples; ++t) empirical[outcome_index(honest_prover(psi, eta, rng))] += 1.0 / samples;
        EXPECT_LT(total_variation(table, empirical), 0.02);
    }
}

TEST(HonestProver, RejectsSizeMismatch) {
    Rng rng(1);
    EXPECT_THROW(honest_prover(StateVector::basis(2, 0), StateVector::basis(3, 0), rng), QuantumError);
}

TEST(TeleportationStatistics, SPrimeMatchesPauliMeasurementOfWitness) {
    // Oracle: measure each qubit of eta directly, X for h=0 and Y for h=1;
    // s'=0 labels |+> for X and the -1 eigenvector |-i> for Y.
    const std::array<std::array<Complex, 2>, 2> x_basis{{{kR, kR}, {kR, -kR}}};
    const std::array<std::array<Complex, 2>, 2> y_basis{{{kR, Complex(0, -kR)}, {kR, Complex(0, kR)}}};
    Rng rng(2718);
    const auto eta = random_state(2, rng);
    for (int hv = 0; hv < 4; ++hv) {
        const Bits h{static_cast<std::uint8_t>(hv >> 1), static_cast<std::uint8_t>(hv & 1)};
        std::vector<double> oracle(4, 0.0);
        for (int sp = 0; sp < 4; ++sp) {
            const auto& b0 = (h[0] ? y_basis : x_basis)[static_cast<std::size_t>(sp >> 1)];
            const auto& b1 = (h[1] ? y_basis : x_basis)[static_cast<std::size_t>(sp & 1)];
            Complex amp = 0.0;
            for (int a = 0; a < 4; ++a) {
                amp += std::conj(b0[static_cast<std::size_t>(a >> 1)] * b1[static_cast<std::size_t>(a & 1)]) *
                       eta[static_cast<std::size_t>(a)];
            }
            oracle[static_cast<std::size_t>(sp)] = std::norm(amp);
        }
        const int samples = 100000;
        std::vector<double> empirical(4, 0.0);
        for (int t = 0; t < samples; ++t) {
            VerifierSecret secret{h, {static_cast<std::uint8_t>(random_bit(rng)), static_cast<std::uint8_t>(random_bit(rng))}};
            const auto out = honest_prover(prepare_verifier_state(secret), eta, rng);
            const auto sp = s_prime(secret, out);
            empirical[static_cast<std::size_t>(sp[0] * 2 + sp[1])] += 1.0 / samples;
        }
        EXPECT_LT(total_variation(oracle, empirical), 0.02) << "h = " << hv;
    }
}

TEST(Channels, DepolarizingFormula) {
    Rng rng(5);
    const auto rho = random_density_matrix(2, 2, rng);
    const auto out = QubitChannel::depolarizing(0.3).apply(rho.matrix());
    const CMatrix ref = 0.7 * rho.matrix() + 0.3 * CMatrix::Identity(2, 2) / 2.0;
    EXPECT_NEAR((out - ref).cwiseAbs().maxCoeff(), 0.0, 1e-15);
    EXPECT_THROW(QubitChannel::depolarizing(1.5), QuantumError);
}

TEST(Channels, ReplaceOutputsFixedState) {
    Rng rng(6);
    const auto sigma = random_density_matrix(2, 2, rng);
    const auto ch = QubitChannel::replace(sigma);
    for (int t = 0; t < 5; ++t) {
        const auto rho = random_density_matrix(2, 1 + t % 2, rng);
        EXPECT_NEAR((ch.apply(rho.matrix()) - sigma.matrix()).cwiseAbs().maxCoeff(), 0.0, 1e-14);
    }
}

TEST(Channels, AdjointDuality) {
    Rng rng(7);
    const auto channels = {QubitChannel::depolarizing(0.4), QubitChannel::replace(random_density_matrix(2, 2, rng))};
    for (const auto& ch : channels) {
        const auto rho = random_density_matrix(4, 2, rng);
        CMatrix op = CMatrix::Random(4, 4);
        op = (op + op.adjoint()).eval();
        // Tr[A (F (x) I)(rho)] via an explicit Kraus sum on qubit 0.
        CMatrix forward = CMatrix::Zero(4, 4);
        for (const auto& k : ch.kraus()) {
            const CMatrix e = kron(k, CMatrix::Identity(2, 2));
            forward += e * rho.matrix() * e.adjoint();
        }
        const Complex lhs = (op * forward).trace();
        const Complex rhs = (ch.adjoint_on(op, 0, 2) * rho.matrix()).trace();
        EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-12);
    }
}

TEST(Channels, SampledBranchesAverageToChannel) {
    Rng rng(8);
    const auto q = random_state(1, rng);
    const auto ch = QubitChannel::depolarizing(0.6);
    CMatrix avg = CMatrix::Zero(2, 2);
    const int samples = 40000;
    for (int t = 0; t < samples; ++t) {
        const CVector v = ch.sample(q, rng).to_eigen();
        avg += v * v.adjoint() / static_cast<double>(samples);
    }
    const CVector v = q.to_eigen();
    EXPECT_LT((avg - ch.apply(v * v.adjoint())).cwiseAbs().maxCoeff(), 0.01);
}

TEST(Povm, ElementsSumToIdentityAndRoutesAgree) {
    Rng rng(9);
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto inst = synth_instance(2 + static_cast<int>(seed % 2), 40 + seed, 0.3);
        const int n = inst.hamiltonian.n_qubits();
        for (const auto& povm : povm_family(inst, rng)) {
            std::vector<StateVector> received;
            for (int k = 0; k < n; ++k) received.push_back(random_state(1, rng));
            StateVector joint = received[0];
            for (int k = 1; k < n; ++k) joint = tensor(joint, received[static_cast<std::size_t>(k)]);
            const CVector v = joint.to_eigen();
            const auto forward = povm.outcome_distribution(received);
            double total = 0.0;
            povm.for_each_element([&](std::size_t idx, const CMatrix& element) {
                const double p = v.dot(element * v).real();
                EXPECT_NEAR(p, forward[idx], 1e-12) << povm.name();
            });
            for (double p : forward) total += p;
            EXPECT_NEAR(total, 1.0, 1e-10) << povm.name();
            EXPECT_NO_THROW(twirled_state(povm));
        }
    }
}

TEST(ExactPacc, HonestExamples) {
    EXPECT_NEAR(exact_pacc_honest({single_term(1), 0.0, 0.1, 10.0, singlet()}), 1.0, 1e-15);
    const InstanceSpec product{single_term(1), 0.5, 1.0, 2.0, StateVector::basis(2, 0)};
    EXPECT_NEAR(exact_pacc_honest(product), 0.75, 1e-15);
    EXPECT_THROW(exact_pacc_honest({single_term(1), 0.0, 0.1, 10.0, std::nullopt}), QuantumError);
}

TEST(ExactPacc, BruteForceMatchesHonestClosedForm) {
    Rng rng(10);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto inst = synth_instance(2 + static_cast<int>(seed % 2), 60 + seed, 0.3);
        const auto eta = seed % 3 == 0 ? random_state(inst.hamiltonian.n_qubits(), rng) : *inst.witness;
        const double closed = 1.0 - energy(inst.hamiltonian, eta) / 2.0;
        EXPECT_NEAR(brute_force_pacc(inst.hamiltonian, ProverPovm::honest(eta)), closed, 1e-9);
        EXPECT_NEAR(exact_pacc_povm(inst.hamiltonian, ProverPovm::honest(eta)), closed, 1e-9);
    }
}

TEST(ExactPacc, RandomOutcomesGiveMeanEnergy) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto inst = synth_instance(2 + static_cast<int>(seed % 2), 80 + seed, 0.3);
        const auto& h = inst.hamiltonian;
        const ProverPovm povm(RandomOutcomePovm{h.n_qubits()});
        const std::size_t dim = std::size_t{1} << h.n_qubits();
        const double closed = 1.0 - dense_matrix(h).trace().real() / static_cast<double>(2 * dim);
        EXPECT_NEAR(exact_pacc_povm(h, povm), closed, 1e-9);
        EXPECT_NEAR(brute_force_pacc(h, povm), closed, 1e-9);
        EXPECT_NEAR(closed, 0.75, 1e-12);
    }
}

TEST(ExactPacc, GroundWitnessSaturatesBound) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto inst = synth_instance(2 + static_cast<int>(seed % 2), 90 + seed, 0.3);
        const auto g = ground_energy(inst.hamiltonian);
        EXPECT_NEAR(exact_pacc_povm(inst.hamiltonian, ProverPovm::honest(g.state)), 1.0 - g.energy / 2.0, 1e-9);
    }
}

TEST(ExactPacc, GapBetweenHonestAndRandom) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto inst = synth_instance(3, 120 + seed, 0.3);
        const auto& h = inst.hamiltonian;
        const double e0 = ground_energy(h).energy;
        const double honest = brute_force_pacc(h, ProverPovm::honest(*inst.witness));
        const double random = brute_force_pacc(h, ProverPovm(RandomOutcomePovm{3}));
        EXPECT_NEAR(honest - random, (h.mean_energy() - e0) / 2.0, 1e-9);
    }
}

TEST(ExactPacc, TwirlMatchesEnumerationOverFamily) {
    Rng rng(11);
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto inst = synth_instance(2 + static_cast<int>(seed % 2), 140 + seed, 0.3);
        for (const auto& povm : povm_family(inst, rng)) {
            EXPECT_NEAR(exact_pacc_povm(inst.hamiltonian, povm), brute_force_pacc(inst.hamiltonian, povm), 1e-9)
                << povm.name();
        }
    }
}

TEST(ExactPacc, BruteForceRejectsLargeN) {
    const auto inst = synth_instance(4, 1, 0.3);
    EXPECT_THROW(brute_force_pacc(inst, ProverPovm::honest(*inst.witness)), QuantumError);
}

TEST(Properties, SoundnessSupremum) {
    Rng rng(12);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto inst = synth_instance(2 + static_cast<int>(seed % 3), 160 + seed, 0.3);
        const double ceiling = 1.0 - ground_energy(inst.hamiltonian).energy / 2.0;
        for (const auto& povm : povm_family(inst, rng)) {
            EXPECT_LE(exact_pacc_povm(inst.hamiltonian, povm), ceiling + 1e-9) << povm.name();
        }
    }
}

TEST(Properties, HonestCompleteness) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto inst = synth_instance(2 + static_cast<int>(seed % 4), 180 + seed, 0.3);
        EXPECT_GE(exact_pacc_honest(inst), 1.0 - inst.a / 2.0 - 1e-12);
    }
}

TEST(Properties, GapRealization) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto inst = synth_instance(2 + static_cast<int>(seed % 3), 200 + seed, 0.25);
        const auto& h = inst.hamiltonian;
        // Mix ground and top eigenvectors to get a state of energy exactly b.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_matrix(h).real());
        const Eigen::VectorXd lo = es.eigenvectors().col(0);
        const Eigen::VectorXd hi = es.eigenvectors().col(es.eigenvectors().cols() - 1);
        const double e_lo = es.eigenvalues()(0);
        const double e_hi = es.eigenvalues()(es.eigenvalues().size() - 1);
        const double t = (inst.b - e_lo) / (e_hi - e_lo);
        std::vector<Complex> amps(static_cast<std::size_t>(lo.size()));
        for (Eigen::Index i = 0; i < lo.size(); ++i) {
            amps[static_cast<std::size_t>(i)] = std::sqrt(1.0 - t) * lo(i) + std::sqrt(t) * hi(i);
        }
        const auto wrong = StateVector::normalized(amps);
        EXPECT_NEAR(energy(h, wrong), inst.b, 1e-9);
        const double gap = exact_pacc_honest(inst) - exact_pacc_povm(h, ProverPovm::honest(wrong));
        EXPECT_GE(gap, (inst.b - inst.a) / 2.0 - 1e-9);
    }
}

TEST(MonteCarlo, SingletHonestAlwaysAccepts) {
    const auto est = monte_carlo_pacc(single_term(1), ProverPovm::honest(singlet()), 5000, 1);
    EXPECT_EQ(est.accepts, 5000u);
    EXPECT_DOUBLE_EQ(est.estimate, 1.0);
    EXPECT_DOUBLE_EQ(est.half_width, 0.0);
}

TEST(MonteCarlo, DeterministicAcrossRunsAndThreads) {
    const auto inst = synth_instance(3, 5, 0.3);
    const auto povm = ProverPovm::honest(*inst.witness);
    const auto a = monte_carlo_pacc(inst.hamiltonian, povm, 4000, 99, 1);
    const auto b = monte_carlo_pacc(inst.hamiltonian, povm, 4000, 99, 1);
    const auto c = monte_carlo_pacc(inst.hamiltonian, povm, 4000, 99, 4);
    EXPECT_EQ(a.accepts, b.accepts);
    EXPECT_EQ(a.accepts, c.accepts);
}

TEST(MonteCarlo, RejectsTooFewTrials) {
    EXPECT_THROW(monte_carlo_pacc(single_term(1), ProverPovm::honest(singlet()), 50, 1), QuantumError);
}

TEST(MonteCarlo, CoverageOfThreeStandardErrors) {
    const auto inst = synth_instance(2, 3, 0.3);
    Rng rng(13);
    const auto eta = random_state(2, rng);
    const auto povm = ProverPovm::honest(eta);
    const double exact = exact_pacc_povm(inst.hamiltonian, povm);
    int covered = 0;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        const auto est = monte_carlo_pacc(inst.hamiltonian, povm, 10000, 1000 + rep);
        if (std::abs(est.estimate - exact) <= 3.0 * est.stderr_) ++covered;
    }
    EXPECT_GE(covered, 99);
}

TEST(MonteCarlo, AdversariesMatchExactValues) {
    Rng rng(14);
    const auto inst = synth_instance(2, 21, 0.3);
    for (const auto& povm : povm_family(inst, rng)) {
        const auto est = monte_carlo_pacc(inst.hamiltonian, povm, 20000, 77);
        const double exact = exact_pacc_povm(inst.hamiltonian, povm);
        EXPECT_LE(std::abs(est.estimate - exact), 4.0 * est.stderr_ + 1e-12) << povm.name();
    }
}
