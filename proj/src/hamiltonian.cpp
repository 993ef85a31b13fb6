#include "veriphoton/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace veriphoton {

namespace {

std::uint64_t qubit_mask(int q, int n) { return std::uint64_t{1} << (n - 1 - q); }

void check_size(const LocalHamiltonian& h) {
    if (h.n_qubits() > kMaxHamiltonianQubits) {
        throw QuantumError("Hamiltonian on " + std::to_string(h.n_qubits()) +
                           " qubits is too large for dense evaluation");
    }
}

}  // namespace

LocalHamiltonian::LocalHamiltonian(int n_qubits, std::vector<HamiltonianTerm> terms)
    : n_qubits_(n_qubits), terms_(std::move(terms)) {
    if (n_qubits_ < 2 || n_qubits_ > kMaxQubits) {
        throw QuantumError("Hamiltonian needs 2 <= N <= " + std::to_string(kMaxQubits));
    }
    if (terms_.empty()) throw QuantumError("Hamiltonian has no terms");
    std::set<std::pair<int, int>> seen;
    double total = 0.0;
    for (const auto& t : terms_) {
        if (t.i < 0 || t.i >= t.j || t.j >= n_qubits_) {
            throw QuantumError("term (" + std::to_string(t.i) + "," + std::to_string(t.j) +
                               ") must satisfy 0 <= i < j < N");
        }
        if (!seen.emplace(t.i, t.j).second) {
            throw QuantumError("duplicate term (" + std::to_string(t.i) + "," +
                               std::to_string(t.j) + ")");
        }
        if (!(t.p >= 0.0) || !std::isfinite(t.p)) throw QuantumError("term weight must be >= 0");
        if (t.c != 1 && t.c != -1) throw QuantumError("term sign must be +1 or -1");
        total += t.p;
    }
    if (std::abs(total - 1.0) > kExactTol) {
        throw QuantumError("term weights sum to " + std::to_string(total) + ", not 1");
    }
}

std::vector<Complex> LocalHamiltonian::apply(std::span<const Complex> v) const {
    const std::size_t dim = std::size_t{1} << n_qubits_;
    if (v.size() != dim) throw QuantumError("vector dimension does not match Hamiltonian");
    // Every term contributes p/2 on the diagonal and sum p = 1.
    std::vector<Complex> out(dim);
    for (std::size_t b = 0; b < dim; ++b) out[b] = 0.5 * v[b];
    for (const auto& t : terms_) {
        if (t.p == 0.0) continue;
        const std::uint64_t mi = qubit_mask(t.i, n_qubits_);
        const std::uint64_t mj = qubit_mask(t.j, n_qubits_);
        const double hop = 0.5 * t.p * t.c;
        for (std::size_t b = 0; b < dim; ++b) {
            if (((b & mi) != 0) != ((b & mj) != 0)) out[b ^ mi ^ mj] += hop * v[b];
        }
    }
    return out;
}

double LocalHamiltonian::mean_energy() const {
    // The XX and YY parts are traceless; only the identity parts survive.
    double total = 0.0;
    for (const auto& t : terms_) total += t.p / 2.0;
    return total;
}

CMatrix dense_matrix(const LocalHamiltonian& h) {
    check_size(h);
    const int n = h.n_qubits();
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
    CMatrix out = CMatrix::Zero(dim, dim);
    const CMatrix id = CMatrix::Identity(dim, dim);
    // Built from Pauli embeddings rather than apply(), so the two stay independent.
    for (const auto& t : h.terms()) {
        const CMatrix xx = embed(pauli_x(), t.i, n) * embed(pauli_x(), t.j, n);
        const CMatrix yy = embed(pauli_y(), t.i, n) * embed(pauli_y(), t.j, n);
        out += (t.p / 2.0) * ((id + t.c * xx) / 2.0 + (id + t.c * yy) / 2.0);
    }
    return out;
}

double energy(const LocalHamiltonian& h, const StateVector& state) {
    if (state.n_qubits() != h.n_qubits()) throw QuantumError("state size does not match Hamiltonian");
    const auto hv = h.apply(state.amplitudes());
    Complex acc = 0.0;
    for (std::size_t b = 0; b < hv.size(); ++b) acc += std::conj(state[b]) * hv[b];
    if (std::abs(acc.imag()) > 1e-10) throw QuantumError("energy has imaginary residue");
    return acc.real();
}

double energy(const LocalHamiltonian& h, const DensityMatrix& rho) {
    if (rho.n_qubits() != h.n_qubits()) throw QuantumError("state size does not match Hamiltonian");
    return expectation(rho, dense_matrix(h));
}

Eigen::VectorXd spectrum(const LocalHamiltonian& h) {
    const CMatrix m = dense_matrix(h);
    // H is real symmetric in the computational basis.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.real(), Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

GroundState ground_energy(const LocalHamiltonian& h) {
    const CMatrix m = dense_matrix(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.real());
    const Eigen::VectorXd v = es.eigenvectors().col(0);
    std::vector<Complex> amps(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) amps[static_cast<std::size_t>(i)] = v(i);
    return GroundState{es.eigenvalues()(0), StateVector::normalized(std::move(amps))};
}

std::size_t sample_term_index(const LocalHamiltonian& h, Rng& rng) {
    const double u = uniform01(rng);
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    const auto& terms = h.terms();
    for (std::size_t k = 0; k < terms.size(); ++k) {
        if (terms[k].p <= 0.0) continue;
        cumulative += terms[k].p;
        last_positive = k;
        if (u < cumulative) return k;
    }
    return last_positive;
}

std::pair<int, int> sample_term(const LocalHamiltonian& h, Rng& rng) {
    const auto& t = h.terms()[sample_term_index(h, rng)];
    return {t.i, t.j};
}

void InstanceSpec::validate() const {
    if (!(f >= 1.0)) throw QuantumError("gap polynomial value f must be >= 1");
    if (a < 0.0 || b < 0.0) throw QuantumError("energy bounds a, b must be non-negative");
    const double gap = b - a;
    if (gap > 1.0 + kExactTol) throw QuantumError("b - a must be at most 1");
    if (gap < 1.0 / f - kExactTol) throw QuantumError("b - a must be at least 1/f");
    if (witness) {
        const double e = energy(hamiltonian, *witness);
        if (e > a + 1e-9) {
            throw QuantumError("witness energy " + std::to_string(e) + " exceeds a = " +
                               std::to_string(a));
        }
    }
}

InstanceSpec synth_instance(int n_qubits, std::uint64_t seed, double gap_target) {
    if (n_qubits < 2 || n_qubits > 6) throw QuantumError("synth_instance needs 2 <= N <= 6");
    if (!(gap_target > 0.0 && gap_target <= 1.0)) {
        throw QuantumError("gap_target must lie in (0, 1]");
    }
    Rng rng(seed);
    for (;;) {
        std::vector<HamiltonianTerm> terms;
        double total = 0.0;
        for (int i = 0; i < n_qubits; ++i) {
            for (int j = i + 1; j < n_qubits; ++j) {
                HamiltonianTerm t;
                t.i = i;
                t.j = j;
                t.p = uniform01(rng);
                t.c = random_bit(rng) ? -1 : 1;
                total += t.p;
                terms.push_back(t);
            }
        }
        if (!(total > 0.0)) continue;
        for (auto& t : terms) t.p /= total;
        // Absorb the roundoff of the division into the largest weight.
        const double drift =
            1.0 - std::accumulate(terms.begin(), terms.end(), 0.0,
                                  [](double s, const HamiltonianTerm& t) { return s + t.p; });
        std::max_element(terms.begin(), terms.end(), [](const auto& x, const auto& y) {
            return x.p < y.p;
        })->p += drift;

        LocalHamiltonian h(n_qubits, std::move(terms));
        const Eigen::VectorXd ev = spectrum(h);
        const double spread = ev(ev.size() - 1) - ev(0);
        if (spread < 1e-6) continue;
        auto ground = ground_energy(h);
        const double gap = std::min({gap_target, 1.0, spread});
        // E0 can come out as -1e-17; the bounds themselves must be non-negative.
        const double a = std::max(0.0, ground.energy);
        InstanceSpec inst{h, a, a + gap, 0.0, std::move(ground.state)};
        inst.f = 1.0 / (inst.b - inst.a);
        if (inst.f < 1.0) inst.f = 1.0;
        inst.validate();
        return inst;
    }
}

InstanceSpec instance_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw QuantumError("instance must be a JSON object");
    static const std::set<std::string> allowed{"n", "terms", "a", "b", "f", "witness"};
    for (const auto& [key, _] : doc.items()) {
        if (!allowed.contains(key)) throw QuantumError("unknown instance key '" + key + "'");
    }
    for (const char* key : {"n", "terms", "a", "b", "f"}) {
        if (!doc.contains(key)) throw QuantumError(std::string("instance is missing '") + key + "'");
    }
    const int n = doc.at("n").get<int>();
    std::vector<HamiltonianTerm> terms;
    double total = 0.0;
    for (const auto& jt : doc.at("terms")) {
        HamiltonianTerm t;
        t.i = jt.at("i").get<int>();
        t.j = jt.at("j").get<int>();
        t.p = jt.at("p").get<double>();
        t.c = jt.at("c").get<int>();
        total += t.p;
        terms.push_back(t);
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw QuantumError("instance term weights sum to " + std::to_string(total) + ", not 1");
    }
    for (auto& t : terms) t.p /= total;

    std::optional<StateVector> witness;
    if (doc.contains("witness")) {
        std::vector<Complex> amps;
        for (const auto& pair : doc.at("witness")) {
            if (!pair.is_array() || pair.size() != 2) {
                throw QuantumError("witness entries must be [re, im] pairs");
            }
            amps.emplace_back(pair[0].get<double>(), pair[1].get<double>());
        }
        double nrm = 0.0;
        for (const auto& a : amps) nrm += std::norm(a);
        if (std::abs(nrm - 1.0) > 1e-9) throw QuantumError("witness is not normalized");
        witness = StateVector::normalized(std::move(amps));
        if (witness->n_qubits() != n) throw QuantumError("witness size does not match n");
    }
    InstanceSpec inst{LocalHamiltonian(n, std::move(terms)), doc.at("a").get<double>(),
                      doc.at("b").get<double>(), doc.at("f").get<double>(), std::move(witness)};
    inst.validate();
    return inst;
}

nlohmann::json instance_to_json(const InstanceSpec& inst) {
    nlohmann::json doc;
    doc["n"] = inst.hamiltonian.n_qubits();
    auto& terms = doc["terms"] = nlohmann::json::array();
    for (const auto& t : inst.hamiltonian.terms()) {
        terms.push_back({{"i", t.i}, {"j", t.j}, {"p", t.p}, {"c", t.c}});
    }
    doc["a"] = inst.a;
    doc["b"] = inst.b;
    doc["f"] = inst.f;
    if (inst.witness) {
        auto& w = doc["witness"] = nlohmann::json::array();
        for (const auto& amp : inst.witness->amplitudes()) w.push_back({amp.real(), amp.imag()});
    }
    return doc;
}

}  // namespace veriphoton
