#include "veriphoton/protocol1.hpp"

#include <bit>
#include <cmath>
#include <numbers>

#include "veriphoton/parallel.hpp"

namespace veriphoton {

namespace {

constexpr double kZ99 = 2.5758293035489004;

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

std::uint64_t pack_bits(const Bits& bits) {
    std::uint64_t v = 0;
    for (auto b : bits) v = (v << 1) | (b & 1u);
    return v;
}

Bits unpack_bits(std::uint64_t v, int n) {
    Bits bits(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) bits[static_cast<std::size_t>(k)] = (v >> (n - 1 - k)) & 1u;
    return bits;
}

// Eigenbasis vector for outcome r of a single-qubit Pauli measurement.
std::array<Complex, 2> basis_vector(char basis, int r) {
    const double a = 1.0 / std::numbers::sqrt2;
    switch (basis) {
        case 'Z': return r == 0 ? std::array<Complex, 2>{1.0, 0.0} : std::array<Complex, 2>{0.0, 1.0};
        case 'X': return {a, r == 0 ? a : -a};
        case 'Y': return {a, r == 0 ? Complex(0, a) : Complex(0, -a)};
        default: throw QuantumError(std::string("unknown measurement basis '") + basis + "'");
    }
}

CMatrix projector(const std::array<Complex, 2>& v) {
    CMatrix m(2, 2);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) m(i, j) = v[static_cast<std::size_t>(i)] * std::conj(v[static_cast<std::size_t>(j)]);
    }
    return m;
}

StateVector assemble(std::span<const StateVector> qubits) {
    if (qubits.empty()) throw QuantumError("no received qubits");
    StateVector joint = qubits[0];
    for (std::size_t k = 1; k < qubits.size(); ++k) joint = tensor(joint, qubits[k]);
    return joint;
}

void check_received(std::span<const StateVector> received, int n) {
    if (static_cast<int>(received.size()) != n) {
        throw QuantumError("prover expects " + std::to_string(n) + " received qubits, got " +
                           std::to_string(received.size()));
    }
    for (const auto& q : received) {
        if (q.n_qubits() != 1) throw QuantumError("received states must be single qubits");
    }
}

// Joint Bell-outcome probabilities of eta (x) psi with pairs (k, N + k), by
// collapsing every qubit onto the product of Bell vectors.
std::vector<double> teleport_distribution(const StateVector& eta, const StateVector& psi) {
    const int n = eta.n_qubits();
    const StateVector joint = tensor(eta, psi);
    std::vector<int> order;
    for (int k = 0; k < n; ++k) {
        order.push_back(k);
        order.push_back(n + k);
    }
    const std::size_t outcomes = std::size_t{1} << (2 * n);
    std::vector<double> dist(outcomes);
    for (std::size_t idx = 0; idx < outcomes; ++idx) {
        const BellOutcomes out = outcome_from_index(idx, n);
        std::vector<Complex> bra{1.0};
        for (int k = 0; k < n; ++k) {
            const auto bv = bell_vector(out.w[static_cast<std::size_t>(k)], out.z[static_cast<std::size_t>(k)]);
            std::vector<Complex> next;
            next.reserve(bra.size() * 4);
            for (const auto& x : bra) {
                for (const auto& y : bv) next.push_back(x * y);
            }
            bra = std::move(next);
        }
        dist[idx] = collapse(joint, order, bra).probability;
    }
    return dist;
}

// Element of the Bell product basis on 2N qubits, eta qubits first.
CVector bell_product_vector(int n, const BellOutcomes& out) {
    const std::size_t dim = std::size_t{1} << (2 * n);
    CVector phi(static_cast<Eigen::Index>(dim));
    for (std::size_t idx = 0; idx < dim; ++idx) {
        const std::uint64_t a_eta = idx >> n;
        const std::uint64_t a_v = idx & ((std::uint64_t{1} << n) - 1);
        Complex amp = 1.0;
        for (int k = 0; k < n; ++k) {
            const int e = static_cast<int>((a_eta >> (n - 1 - k)) & 1u);
            const int v = static_cast<int>((a_v >> (n - 1 - k)) & 1u);
            amp *= bell_vector(out.w[static_cast<std::size_t>(k)],
                               out.z[static_cast<std::size_t>(k)])[static_cast<std::size_t>(2 * e + v)];
        }
        phi(static_cast<Eigen::Index>(idx)) = amp;
    }
    return phi;
}

}  // namespace

VerifierSecret VerifierSecret::random(int n, Rng& rng) {
    VerifierSecret secret{Bits(static_cast<std::size_t>(n)), Bits(static_cast<std::size_t>(n))};
    for (auto& b : secret.h) b = static_cast<std::uint8_t>(random_bit(rng));
    for (auto& b : secret.s) b = static_cast<std::uint8_t>(random_bit(rng));
    return secret;
}

std::size_t outcome_index(const BellOutcomes& out) {
    const auto n = out.w.size();
    return static_cast<std::size_t>((pack_bits(out.w) << n) | pack_bits(out.z));
}

BellOutcomes outcome_from_index(std::size_t index, int n) {
    const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
    return BellOutcomes{unpack_bits(index >> n, n), unpack_bits(index & mask, n)};
}

std::string_view to_string(Branch branch) {
    switch (branch) {
        case Branch::AutoAccept: return "auto-accept";
        case Branch::ParityAccept: return "parity-accept";
        case Branch::ParityReject: return "parity-reject";
        case Branch::ThresholdReject: return "threshold-reject";
    }
    return "unknown";
}

QubitChannel::QubitChannel(Kind kind, double strength, std::optional<DensityMatrix> replacement,
                           std::vector<CMatrix> kraus)
    : kind_(kind), strength_(strength), replacement_(std::move(replacement)), kraus_(std::move(kraus)) {
    CMatrix total = CMatrix::Zero(2, 2);
    for (const auto& k : kraus_) total += k.adjoint() * k;
    if ((total - CMatrix::Identity(2, 2)).cwiseAbs().maxCoeff() > kExactTol) {
        throw QuantumError("channel Kraus operators are not trace preserving");
    }
}

QubitChannel QubitChannel::identity() {
    return QubitChannel(Kind::Identity, 0.0, std::nullopt, {pauli_i()});
}

QubitChannel QubitChannel::depolarizing(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw QuantumError("depolarizing strength must lie in [0, 1]");
    std::vector<CMatrix> kraus{std::sqrt(1.0 - 0.75 * p) * pauli_i()};
    if (p > 0.0) {
        const double q = std::sqrt(p / 4.0);
        kraus.push_back(q * pauli_x());
        kraus.push_back(q * pauli_y());
        kraus.push_back(q * pauli_z());
    }
    return QubitChannel(Kind::Depolarizing, p, std::nullopt, std::move(kraus));
}

QubitChannel QubitChannel::replace(const DensityMatrix& sigma) {
    if (sigma.dim() != 2) throw QuantumError("replacement state must be a single qubit");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(sigma.matrix());
    std::vector<CMatrix> kraus;
    for (int a = 0; a < 2; ++a) {
        const double lambda = std::max(0.0, es.eigenvalues()(a));
        if (lambda <= 0.0) continue;
        const CVector e = es.eigenvectors().col(a);
        for (int b = 0; b < 2; ++b) {
            CMatrix k = CMatrix::Zero(2, 2);
            k.col(b) = std::sqrt(lambda) * e;
            kraus.push_back(std::move(k));
        }
    }
    // Absorb eigenvalue roundoff so the Kraus set is exactly trace preserving.
    CMatrix total = CMatrix::Zero(2, 2);
    for (const auto& k : kraus) total += k.adjoint() * k;
    const double scale = 1.0 / std::sqrt(total(0, 0).real());
    for (auto& k : kraus) k *= scale;
    return QubitChannel(Kind::Replace, 1.0, sigma, std::move(kraus));
}

CMatrix QubitChannel::apply(const CMatrix& rho) const {
    CMatrix out = CMatrix::Zero(2, 2);
    for (const auto& k : kraus_) out += k * rho * k.adjoint();
    return out;
}

CMatrix QubitChannel::adjoint_on(const CMatrix& op, int qubit, int n_qubits) const {
    if (kind_ == Kind::Identity) return op;
    CMatrix out = CMatrix::Zero(op.rows(), op.cols());
    for (const auto& k : kraus_) {
        const CMatrix e = embed(k, qubit, n_qubits);
        out += e.adjoint() * op * e;
    }
    return out;
}

StateVector QubitChannel::sample(const StateVector& qubit, Rng& rng) const {
    if (kind_ == Kind::Identity) return qubit;
    const CVector v = qubit.to_eigen();
    const double u = uniform01(rng);
    double cumulative = 0.0;
    std::optional<CVector> last;
    for (const auto& k : kraus_) {
        CVector out = k * v;
        const double p = out.squaredNorm();
        if (p <= 0.0) continue;
        cumulative += p;
        last = std::move(out);
        if (u < cumulative) break;
    }
    std::vector<Complex> amps(last->data(), last->data() + last->size());
    return StateVector::normalized(std::move(amps));
}

ProverPovm::ProverPovm(PovmFamily family) : family_(std::move(family)), n_qubits_(0) {
    n_qubits_ = std::visit(
        Overloaded{
            [](const TeleportPovm& p) {
                const int n = p.witness.n_qubits();
                if (!p.channels.empty() && static_cast<int>(p.channels.size()) != n) {
                    throw QuantumError("teleport prover needs one channel per qubit");
                }
                return n;
            },
            [](const RandomOutcomePovm& p) { return p.n_qubits; },
            [](const ProductMeasurePovm& p) {
                for (const auto& q : p.qubits) {
                    (void)basis_vector(q.basis, 0);
                    for (const auto& [w, z] : q.report) {
                        if ((w & ~1) || (z & ~1)) throw QuantumError("reported bits must be 0 or 1");
                    }
                }
                return static_cast<int>(p.qubits.size());
            },
            [](const ConstantOutcomePovm& p) {
                if (p.outcome.w.size() != p.outcome.z.size()) {
                    throw QuantumError("constant outcome has mismatched w and z");
                }
                return p.outcome.size();
            },
        },
        family_);
    if (n_qubits_ < 1 || n_qubits_ > 6) throw QuantumError("prover supports 1 to 6 qubits");
}

ProverPovm ProverPovm::honest(const StateVector& witness) {
    return ProverPovm(TeleportPovm{witness, {}});
}

std::string_view ProverPovm::name() const {
    return std::visit(Overloaded{
                          [](const TeleportPovm& p) -> std::string_view {
                              return p.channels.empty() ? "teleport" : "teleport-channel";
                          },
                          [](const RandomOutcomePovm&) -> std::string_view { return "random-outcome"; },
                          [](const ProductMeasurePovm&) -> std::string_view { return "product-measure"; },
                          [](const ConstantOutcomePovm&) -> std::string_view { return "constant-outcome"; },
                      },
                      family_);
}

std::vector<double> ProverPovm::outcome_distribution(std::span<const StateVector> received) const {
    check_received(received, n_qubits_);
    const int n = n_qubits_;
    const std::size_t outcomes = std::size_t{1} << (2 * n);
    return std::visit(
        Overloaded{
            [&](const TeleportPovm& p) {
                if (p.channels.empty()) return teleport_distribution(p.witness, assemble(received));
                // Channel outputs as eigen-ensembles; the product ensemble has
                // at most 2^N pure members.
                std::vector<std::vector<std::pair<double, StateVector>>> ensembles;
                for (int k = 0; k < n; ++k) {
                    const CVector v = received[static_cast<std::size_t>(k)].to_eigen();
                    const CMatrix rho = p.channels[static_cast<std::size_t>(k)].apply(v * v.adjoint());
                    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho);
                    std::vector<std::pair<double, StateVector>> members;
                    for (int a = 0; a < 2; ++a) {
                        const double w = es.eigenvalues()(a);
                        if (w <= 1e-15) continue;
                        const CVector e = es.eigenvectors().col(a);
                        members.emplace_back(w, StateVector::normalized({e(0), e(1)}));
                    }
                    ensembles.push_back(std::move(members));
                }
                std::vector<double> dist(outcomes, 0.0);
                std::vector<std::size_t> choice(static_cast<std::size_t>(n), 0);
                for (;;) {
                    double weight = 1.0;
                    std::vector<StateVector> pure;
                    for (int k = 0; k < n; ++k) {
                        const auto& m = ensembles[static_cast<std::size_t>(k)][choice[static_cast<std::size_t>(k)]];
                        weight *= m.first;
                        pure.push_back(m.second);
                    }
                    const auto part = teleport_distribution(p.witness, assemble(pure));
                    for (std::size_t i = 0; i < outcomes; ++i) dist[i] += weight * part[i];
                    int k = n - 1;
                    while (k >= 0) {
                        auto& c = choice[static_cast<std::size_t>(k)];
                        if (++c < ensembles[static_cast<std::size_t>(k)].size()) break;
                        c = 0;
                        --k;
                    }
                    if (k < 0) break;
                }
                return dist;
            },
            [&](const RandomOutcomePovm&) {
                return std::vector<double>(outcomes, 1.0 / static_cast<double>(outcomes));
            },
            [&](const ProductMeasurePovm& p) {
                std::vector<double> dist(outcomes, 0.0);
                for (std::uint64_t r = 0; r < (std::uint64_t{1} << n); ++r) {
                    double prob = 1.0;
                    BellOutcomes out{Bits(static_cast<std::size_t>(n)), Bits(static_cast<std::size_t>(n))};
                    for (int k = 0; k < n; ++k) {
                        const int bit = static_cast<int>((r >> (n - 1 - k)) & 1u);
                        const auto& q = p.qubits[static_cast<std::size_t>(k)];
                        const auto bv = basis_vector(q.basis, bit);
                        const auto& v = received[static_cast<std::size_t>(k)];
                        prob *= std::norm(std::conj(bv[0]) * v[0] + std::conj(bv[1]) * v[1]);
                        out.w[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(q.report[static_cast<std::size_t>(bit)].first);
                        out.z[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(q.report[static_cast<std::size_t>(bit)].second);
                    }
                    dist[outcome_index(out)] += prob;
                }
                return dist;
            },
            [&](const ConstantOutcomePovm& p) {
                std::vector<double> dist(outcomes, 0.0);
                dist[outcome_index(p.outcome)] = 1.0;
                return dist;
            },
        },
        family_);
}

void ProverPovm::for_each_element(
    const std::function<void(std::size_t, const CMatrix&)>& visit) const {
    const int n = n_qubits_;
    const std::size_t outcomes = std::size_t{1} << (2 * n);
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
    std::visit(
        Overloaded{
            [&](const TeleportPovm& p) {
                const CVector eta = p.witness.to_eigen();
                for (std::size_t idx = 0; idx < outcomes; ++idx) {
                    const CVector phi = bell_product_vector(n, outcome_from_index(idx, n));
                    // chi = (<eta| (x) I)|Phi>, Pi = |chi><chi|.
                    CVector chi = CVector::Zero(dim);
                    for (Eigen::Index a = 0; a < dim; ++a) {
                        chi += std::conj(eta(a)) * phi.segment(a * dim, dim);
                    }
                    CMatrix element = chi * chi.adjoint();
                    for (std::size_t k = 0; k < p.channels.size(); ++k) {
                        element = p.channels[k].adjoint_on(element, static_cast<int>(k), n);
                    }
                    visit(idx, element);
                }
            },
            [&](const RandomOutcomePovm&) {
                const CMatrix element = CMatrix::Identity(dim, dim) / static_cast<double>(outcomes);
                for (std::size_t idx = 0; idx < outcomes; ++idx) visit(idx, element);
            },
            [&](const ProductMeasurePovm& p) {
                for (std::size_t idx = 0; idx < outcomes; ++idx) {
                    const BellOutcomes out = outcome_from_index(idx, n);
                    CMatrix element = CMatrix::Identity(1, 1);
                    for (int k = 0; k < n; ++k) {
                        const auto& q = p.qubits[static_cast<std::size_t>(k)];
                        CMatrix local = CMatrix::Zero(2, 2);
                        for (int r = 0; r < 2; ++r) {
                            const auto& rep = q.report[static_cast<std::size_t>(r)];
                            if (rep.first == out.w[static_cast<std::size_t>(k)] &&
                                rep.second == out.z[static_cast<std::size_t>(k)]) {
                                local += projector(basis_vector(q.basis, r));
                            }
                        }
                        element = kron(element, local);
                    }
                    visit(idx, element);
                }
            },
            [&](const ConstantOutcomePovm& p) {
                const std::size_t hit = outcome_index(p.outcome);
                const CMatrix zero = CMatrix::Zero(dim, dim);
                const CMatrix id = CMatrix::Identity(dim, dim);
                for (std::size_t idx = 0; idx < outcomes; ++idx) visit(idx, idx == hit ? id : zero);
            },
        },
        family_);
}

BellOutcomes ProverPovm::sample(std::span<const StateVector> received, Rng& rng) const {
    check_received(received, n_qubits_);
    const int n = n_qubits_;
    return std::visit(
        Overloaded{
            [&](const TeleportPovm& p) {
                if (p.channels.empty()) return honest_prover(assemble(received), p.witness, rng);
                std::vector<StateVector> noisy;
                for (int k = 0; k < n; ++k) {
                    noisy.push_back(p.channels[static_cast<std::size_t>(k)].sample(
                        received[static_cast<std::size_t>(k)], rng));
                }
                return honest_prover(assemble(noisy), p.witness, rng);
            },
            [&](const RandomOutcomePovm&) {
                BellOutcomes out{Bits(static_cast<std::size_t>(n)), Bits(static_cast<std::size_t>(n))};
                for (auto& b : out.w) b = static_cast<std::uint8_t>(random_bit(rng));
                for (auto& b : out.z) b = static_cast<std::uint8_t>(random_bit(rng));
                return out;
            },
            [&](const ProductMeasurePovm& p) {
                BellOutcomes out{Bits(static_cast<std::size_t>(n)), Bits(static_cast<std::size_t>(n))};
                for (int k = 0; k < n; ++k) {
                    const auto& q = p.qubits[static_cast<std::size_t>(k)];
                    const auto& v = received[static_cast<std::size_t>(k)];
                    const auto b0 = basis_vector(q.basis, 0);
                    const double p0 = std::norm(std::conj(b0[0]) * v[0] + std::conj(b0[1]) * v[1]);
                    const int r = uniform01(rng) < p0 ? 0 : 1;
                    out.w[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(q.report[static_cast<std::size_t>(r)].first);
                    out.z[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(q.report[static_cast<std::size_t>(r)].second);
                }
                return out;
            },
            [&](const ConstantOutcomePovm& p) { return p.outcome; },
        },
        family_);
}

std::vector<StateVector> verifier_qubits(const VerifierSecret& secret) {
    if (secret.h.size() != secret.s.size()) throw QuantumError("secret tuples differ in length");
    std::vector<StateVector> qubits;
    for (std::size_t k = 0; k < secret.h.size(); ++k) {
        StateVector q = StateVector::basis(1, secret.s[k]);
        q = apply_gate(q, GateSpec::single(GateKind::H, 0));
        if (secret.h[k]) q = apply_gate(q, GateSpec::single(GateKind::S, 0));
        qubits.push_back(std::move(q));
    }
    return qubits;
}

StateVector prepare_verifier_state(const VerifierSecret& secret) {
    const auto qubits = verifier_qubits(secret);
    return assemble(qubits);
}

BellOutcomes honest_prover(const StateVector& psi_v, const StateVector& eta, Rng& rng) {
    const int n = psi_v.n_qubits();
    if (eta.n_qubits() != n) throw QuantumError("witness and received state differ in size");
    BellOutcomes out{Bits(static_cast<std::size_t>(n)), Bits(static_cast<std::size_t>(n))};
    StateVector state = tensor(eta, psi_v);
    // After k pairs are consumed, eta qubit k sits at 0 and psi_V qubit k at n - k.
    for (int k = 0; k < n; ++k) {
        BellResult r = bell_measure(state, 0, n - k, rng);
        out.w[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(r.w);
        out.z[static_cast<std::size_t>(k)] = static_cast<std::uint8_t>(r.z);
        state = std::move(r.post);
    }
    return out;
}

Bits s_prime(const VerifierSecret& secret, const BellOutcomes& out) {
    const std::size_t n = secret.h.size();
    if (secret.s.size() != n || out.w.size() != n || out.z.size() != n) {
        throw QuantumError("secret and outcomes differ in length");
    }
    Bits sp(n);
    for (std::size_t k = 0; k < n; ++k) {
        sp[k] = static_cast<std::uint8_t>(secret.s[k] ^ out.z[k] ^ (secret.h[k] & out.w[k]));
    }
    return sp;
}

Verdict decide(const VerifierSecret& secret, const BellOutcomes& out, const HamiltonianTerm& term) {
    const auto i = static_cast<std::size_t>(term.i);
    const auto j = static_cast<std::size_t>(term.j);
    Verdict v;
    v.sampled_pair = std::make_pair(term.i, term.j);
    if (secret.h[i] != secret.h[j]) {
        v.accepted = true;
        v.branch = Branch::AutoAccept;
        return v;
    }
    const Bits sp = s_prime(secret, out);
    const int parity = ((sp[i] + sp[j]) & 1) ? -1 : 1;
    v.accepted = parity == -term.c;
    v.branch = v.accepted ? Branch::ParityAccept : Branch::ParityReject;
    return v;
}

Verdict verdict(const VerifierSecret& secret, const BellOutcomes& out, const LocalHamiltonian& h,
                Rng& rng) {
    if (secret.size() != h.n_qubits() || out.size() != h.n_qubits()) {
        throw QuantumError("round size does not match the Hamiltonian");
    }
    return decide(secret, out, h.terms()[sample_term_index(h, rng)]);
}

double acceptance_given(const VerifierSecret& secret, const BellOutcomes& out,
                        const LocalHamiltonian& h) {
    double p = 0.0;
    for (const auto& t : h.terms()) {
        if (decide(secret, out, t).accepted) p += t.p;
    }
    return p;
}

double exact_pacc_honest(const InstanceSpec& inst) {
    if (!inst.witness) throw QuantumError("instance has no witness state");
    return 1.0 - energy(inst.hamiltonian, *inst.witness) / 2.0;
}

DensityMatrix twirled_state(const ProverPovm& povm) {
    const int n = povm.n_qubits();
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
    const std::uint64_t low = (std::uint64_t{1} << n) - 1;
    CMatrix total = CMatrix::Zero(dim, dim);
    CMatrix twirl = CMatrix::Zero(dim, dim);
    povm.for_each_element([&](std::size_t idx, const CMatrix& element) {
        total += element;
        const std::uint64_t w = idx >> n;
        const std::uint64_t z = idx & low;
        // (X^w Z^z) Pi (Z^z X^w): X^w Z^z |b> = (-1)^{z.b} |b xor w>.
        for (Eigen::Index a = 0; a < dim; ++a) {
            const auto ua = static_cast<std::uint64_t>(a);
            const double sa = (std::popcount(z & ua) & 1) ? -1.0 : 1.0;
            for (Eigen::Index b = 0; b < dim; ++b) {
                const auto ub = static_cast<std::uint64_t>(b);
                const double sb = (std::popcount(z & ub) & 1) ? -1.0 : 1.0;
                twirl(static_cast<Eigen::Index>(ua ^ w), static_cast<Eigen::Index>(ub ^ w)) +=
                    sa * sb * element(a, b);
            }
        }
    });
    if ((total - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-10) {
        throw QuantumError("POVM elements do not sum to the identity");
    }
    return DensityMatrix(twirl / static_cast<double>(dim));
}

double effective_energy(const LocalHamiltonian& h, const ProverPovm& povm) {
    if (povm.n_qubits() != h.n_qubits()) throw QuantumError("POVM size does not match Hamiltonian");
    return energy(h, twirled_state(povm));
}

double exact_pacc_povm(const LocalHamiltonian& h, const ProverPovm& povm) {
    return 0.5 + 0.5 * (1.0 - effective_energy(h, povm));
}

double brute_force_pacc(const LocalHamiltonian& h, const ProverPovm& povm) {
    const int n = h.n_qubits();
    if (n > kBruteForceMaxQubits) {
        throw QuantumError("brute-force enumeration supports at most " +
                           std::to_string(kBruteForceMaxQubits) + " qubits");
    }
    if (povm.n_qubits() != n) throw QuantumError("POVM size does not match Hamiltonian");
    const std::uint64_t secrets = std::uint64_t{1} << n;
    double total = 0.0;
    for (std::uint64_t hv = 0; hv < secrets; ++hv) {
        for (std::uint64_t sv = 0; sv < secrets; ++sv) {
            const VerifierSecret secret{unpack_bits(hv, n), unpack_bits(sv, n)};
            const auto dist = povm.outcome_distribution(verifier_qubits(secret));
            for (std::size_t idx = 0; idx < dist.size(); ++idx) {
                if (dist[idx] == 0.0) continue;
                total += dist[idx] * acceptance_given(secret, outcome_from_index(idx, n), h);
            }
        }
    }
    return total / static_cast<double>(secrets * secrets);
}

double brute_force_pacc(const InstanceSpec& inst, const ProverPovm& povm) {
    return brute_force_pacc(inst.hamiltonian, povm);
}

McEstimate make_estimate(std::uint64_t accepts, std::uint64_t trials) {
    McEstimate e;
    e.trials = trials;
    e.accepts = accepts;
    if (trials == 0) return e;
    e.estimate = static_cast<double>(accepts) / static_cast<double>(trials);
    e.stderr_ = std::sqrt(e.estimate * (1.0 - e.estimate) / static_cast<double>(trials));
    e.half_width = kZ99 * e.stderr_;
    return e;
}

P1Round run_protocol1_round(const LocalHamiltonian& h, const ProverPovm& povm, Rng& rng) {
    P1Round round;
    round.secret = VerifierSecret::random(h.n_qubits(), rng);
    round.outcomes = povm.sample(verifier_qubits(round.secret), rng);
    round.verdict = verdict(round.secret, round.outcomes, h, rng);
    return round;
}

McEstimate monte_carlo_pacc(const LocalHamiltonian& h, const ProverPovm& povm,
                            std::uint64_t trials, std::uint64_t seed, int threads) {
    if (trials < 100) throw QuantumError("Monte Carlo estimation needs at least 100 trials");
    if (povm.n_qubits() != h.n_qubits()) throw QuantumError("POVM size does not match Hamiltonian");
    std::vector<std::uint8_t> accepted(trials, 0);
    parallel_for(trials, threads, [&](std::uint64_t t) {
        Rng rng(derive_seed(seed, t));
        accepted[t] = run_protocol1_round(h, povm, rng).verdict.accepted ? 1 : 0;
    });
    std::uint64_t accepts = 0;
    for (auto a : accepted) accepts += a;
    return make_estimate(accepts, trials);
}

}  // namespace veriphoton
