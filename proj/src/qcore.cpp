#include "veriphoton/qcore.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace veriphoton {

struct StateAccess {
    static StateVector make(std::vector<Complex> amps) {
        return StateVector(std::move(amps), StateVector::Unchecked{});
    }
};

namespace {

int qubits_for_dim(std::size_t dim) {
    if (dim == 0 || !std::has_single_bit(dim)) {
        throw QuantumError("dimension " + std::to_string(dim) +
                           " is not a power of two");
    }
    const int n = std::countr_zero(dim);
    if (n > kMaxQubits) {
        throw QuantumError("system of " + std::to_string(n) +
                           " qubits exceeds the dense limit of " +
                           std::to_string(kMaxQubits));
    }
    return n;
}

void check_qubit(int q, int n) {
    if (q < 0 || q >= n) {
        throw QuantumError("qubit index " + std::to_string(q) +
                           " out of range for " + std::to_string(n) + " qubits");
    }
}

void check_distinct(std::span<const int> qubits, int n) {
    for (std::size_t a = 0; a < qubits.size(); ++a) {
        check_qubit(qubits[a], n);
        for (std::size_t b = a + 1; b < qubits.size(); ++b) {
            if (qubits[a] == qubits[b]) {
                throw QuantumError("repeated qubit index " +
                                   std::to_string(qubits[a]));
            }
        }
    }
}

double sum_norm(std::span<const Complex> v) {
    double s = 0.0;
    for (const auto& a : v) s += std::norm(a);
    return s;
}

double max_hermitian_defect(const CMatrix& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// Bit mask of qubit q in an n-qubit index.
inline std::uint64_t mask_of(int q, int n) {
    return std::uint64_t{1} << (n - 1 - q);
}

}  // namespace

StateVector::StateVector(std::vector<Complex> amplitudes)
    : n_qubits_(qubits_for_dim(amplitudes.size())), amps_(std::move(amplitudes)) {
    const double nrm = sum_norm(amps_);
    if (std::abs(nrm - 1.0) > kExactTol) {
        throw QuantumError("state vector squared norm " + std::to_string(nrm) +
                           " differs from 1");
    }
}

StateVector::StateVector(std::vector<Complex> amplitudes, Unchecked)
    : n_qubits_(qubits_for_dim(amplitudes.size())), amps_(std::move(amplitudes)) {}

StateVector StateVector::normalized(std::vector<Complex> amplitudes) {
    const double nrm = sum_norm(amplitudes);
    if (!(nrm > 0.0) || !std::isfinite(nrm)) {
        throw QuantumError("cannot normalize a zero or non-finite vector");
    }
    const double scale = 1.0 / std::sqrt(nrm);
    for (auto& a : amplitudes) a *= scale;
    return StateAccess::make(std::move(amplitudes));
}

StateVector StateVector::basis(int n_qubits, std::uint64_t index) {
    if (n_qubits < 0 || n_qubits > kMaxQubits) {
        throw QuantumError("unsupported qubit count " + std::to_string(n_qubits));
    }
    const std::uint64_t dim = std::uint64_t{1} << n_qubits;
    if (index >= dim) throw QuantumError("basis index out of range");
    std::vector<Complex> amps(dim);
    amps[index] = 1.0;
    return StateAccess::make(std::move(amps));
}

double StateVector::norm_squared() const { return sum_norm(amps_); }

CVector StateVector::to_eigen() const {
    return Eigen::Map<const CVector>(amps_.data(),
                                     static_cast<Eigen::Index>(amps_.size()));
}

DensityMatrix::DensityMatrix(CMatrix entries) : rho_(std::move(entries)) {
    if (rho_.rows() == 0 || rho_.rows() != rho_.cols()) {
        throw QuantumError("density matrix must be square and non-empty");
    }
    if (max_hermitian_defect(rho_) > kExactTol) {
        throw QuantumError("density matrix is not Hermitian");
    }
    rho_ = (0.5 * (rho_ + rho_.adjoint())).eval();
    const Complex tr = rho_.trace();
    if (std::abs(tr - 1.0) > kExactTol) {
        throw QuantumError("density matrix trace " + std::to_string(tr.real()) +
                           " differs from 1");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho_);
    const auto& ev = es.eigenvalues();
    if (ev.minCoeff() < -kPsdClip) {
        throw QuantumError("density matrix has eigenvalue " +
                           std::to_string(ev.minCoeff()) + " below tolerance");
    }
    if (ev.minCoeff() < 0.0) {
        Eigen::VectorXd clipped = ev.cwiseMax(0.0);
        clipped /= clipped.sum();
        rho_ = es.eigenvectors() * clipped.cast<Complex>().asDiagonal() *
               es.eigenvectors().adjoint();
    }
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
    const CVector v = psi.to_eigen();
    return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
    const auto d = static_cast<Eigen::Index>(dim);
    return DensityMatrix(CMatrix::Identity(d, d) / static_cast<double>(dim));
}

int DensityMatrix::n_qubits() const { return qubits_for_dim(dim()); }

CMatrix pauli_i() { return CMatrix::Identity(2, 2); }

CMatrix pauli_x() {
    CMatrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

CMatrix pauli_y() {
    CMatrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

CMatrix pauli_z() {
    CMatrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

CMatrix hadamard() {
    CMatrix m(2, 2);
    m << 1, 1, 1, -1;
    return m / std::numbers::sqrt2;
}

CMatrix phase_s() {
    CMatrix m(2, 2);
    m << 1, 0, 0, Complex(0, 1);
    return m;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

CMatrix embed(const CMatrix& op, int qubit, int n_qubits) {
    check_qubit(qubit, n_qubits);
    CMatrix out = CMatrix::Identity(1, 1);
    for (int q = 0; q < n_qubits; ++q) {
        out = kron(out, q == qubit ? op : pauli_i());
    }
    return out;
}

GateSpec GateSpec::single(GateKind kind, int target) {
    if (kind == GateKind::CZ || kind == GateKind::Custom) {
        throw QuantumError("single() takes a named one-qubit gate");
    }
    return GateSpec{kind, {target}, {}};
}

GateSpec GateSpec::cz(int a, int b) {
    if (a == b) throw QuantumError("CZ requires two distinct targets");
    return GateSpec{GateKind::CZ, {a, b}, {}};
}

GateSpec GateSpec::make_custom(CMatrix unitary, std::vector<int> targets) {
    return GateSpec{GateKind::Custom, std::move(targets), std::move(unitary)};
}

CMatrix GateSpec::matrix() const {
    switch (kind) {
        case GateKind::I: return pauli_i();
        case GateKind::X: return pauli_x();
        case GateKind::Y: return pauli_y();
        case GateKind::Z: return pauli_z();
        case GateKind::H: return hadamard();
        case GateKind::S: return phase_s();
        case GateKind::Sdg: return phase_s().adjoint();
        case GateKind::CZ: {
            CMatrix m = CMatrix::Identity(4, 4);
            m(3, 3) = -1.0;
            return m;
        }
        case GateKind::Custom: return custom;
    }
    throw QuantumError("unknown gate kind");
}

StateVector apply_gate(const StateVector& state, const GateSpec& gate) {
    const int n = state.n_qubits();
    const auto& targets = gate.targets;
    const std::size_t k = targets.size();
    if (k == 0) throw QuantumError("gate has no targets");
    if (gate.kind == GateKind::CZ && k != 2) {
        throw QuantumError("CZ requires exactly two targets");
    }
    if (gate.kind != GateKind::CZ && gate.kind != GateKind::Custom && k != 1) {
        throw QuantumError("named one-qubit gate requires exactly one target");
    }
    check_distinct(targets, n);
    const CMatrix u = gate.matrix();
    const auto sub = static_cast<Eigen::Index>(std::size_t{1} << k);
    if (u.rows() != sub || u.cols() != sub) {
        throw QuantumError("gate matrix dimension does not match its targets");
    }
    if (gate.kind == GateKind::Custom &&
        (u.adjoint() * u - CMatrix::Identity(sub, sub)).cwiseAbs().maxCoeff() >
            kExactTol) {
        throw QuantumError("custom gate is not unitary");
    }

    std::vector<std::uint64_t> masks(k);
    std::uint64_t all = 0;
    for (std::size_t t = 0; t < k; ++t) {
        masks[t] = mask_of(targets[t], n);
        all |= masks[t];
    }
    // Offset of each local basis index |b_0 ... b_{k-1}> within the register.
    std::vector<std::uint64_t> offset(static_cast<std::size_t>(sub), 0);
    for (std::size_t local = 0; local < offset.size(); ++local) {
        for (std::size_t t = 0; t < k; ++t) {
            if (local & (std::size_t{1} << (k - 1 - t))) offset[local] |= masks[t];
        }
    }

    auto in = state.amplitudes();
    std::vector<Complex> out(in.begin(), in.end());
    std::vector<Complex> buf(offset.size());
    for (std::uint64_t base = 0; base < in.size(); ++base) {
        if (base & all) continue;
        for (std::size_t r = 0; r < offset.size(); ++r) {
            Complex acc = 0.0;
            for (std::size_t c = 0; c < offset.size(); ++c) {
                acc += u(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) *
                       in[base | offset[c]];
            }
            buf[r] = acc;
        }
        for (std::size_t r = 0; r < offset.size(); ++r) out[base | offset[r]] = buf[r];
    }
    return StateAccess::make(std::move(out));
}

Collapse collapse(const StateVector& state, std::span<const int> qubits,
                  std::span<const Complex> bra) {
    const int n = state.n_qubits();
    const std::size_t k = qubits.size();
    check_distinct(qubits, n);
    if (bra.size() != (std::size_t{1} << k)) {
        throw QuantumError("bra length does not match the measured qubits");
    }
    std::vector<int> rest;
    for (int q = 0; q < n; ++q) {
        if (std::find(qubits.begin(), qubits.end(), q) == qubits.end()) rest.push_back(q);
    }
    const int n_rest = static_cast<int>(rest.size());
    std::vector<Complex> out(std::size_t{1} << n_rest);
    auto in = state.amplitudes();
    for (std::uint64_t r = 0; r < out.size(); ++r) {
        std::uint64_t base = 0;
        for (int t = 0; t < n_rest; ++t) {
            if (r & (std::uint64_t{1} << (n_rest - 1 - t))) base |= mask_of(rest[t], n);
        }
        Complex acc = 0.0;
        for (std::size_t local = 0; local < bra.size(); ++local) {
            std::uint64_t idx = base;
            for (std::size_t t = 0; t < k; ++t) {
                if (local & (std::size_t{1} << (k - 1 - t))) idx |= mask_of(qubits[t], n);
            }
            acc += std::conj(bra[local]) * in[idx];
        }
        out[r] = acc;
    }
    Collapse result;
    result.probability = sum_norm(out);
    if (result.probability > 1e-300) {
        result.state = StateVector::normalized(std::move(out));
    }
    return result;
}

std::array<Complex, 4> bell_vector(int w, int z) {
    // (Z^z X^w (x) I)(|00> + |11>) = (-1)^{zw}|w,0> + (-1)^{z(1-w)}|1-w,1>.
    std::array<Complex, 4> v{};
    const double amp = 1.0 / std::numbers::sqrt2;
    v[static_cast<std::size_t>(2 * w + 0)] = (z & w) ? -amp : amp;
    v[static_cast<std::size_t>(2 * (1 - w) + 1)] = (z & (1 - w)) ? -amp : amp;
    return v;
}

std::array<double, 4> bell_probabilities(const StateVector& state, int first,
                                         int second) {
    if (first == second) throw QuantumError("Bell measurement needs two distinct qubits");
    const std::array<int, 2> pair{first, second};
    std::array<double, 4> probs{};
    for (int w = 0; w < 2; ++w) {
        for (int z = 0; z < 2; ++z) {
            const auto bra = bell_vector(w, z);
            probs[static_cast<std::size_t>(2 * w + z)] =
                collapse(state, pair, bra).probability;
        }
    }
    return probs;
}

BellResult bell_measure(const StateVector& state, int first, int second, Rng& rng) {
    if (first == second) throw QuantumError("Bell measurement needs two distinct qubits");
    const std::array<int, 2> pair{first, second};
    const double u = uniform01(rng);
    double cumulative = 0.0;
    std::optional<BellResult> last;
    for (int idx = 0; idx < 4; ++idx) {
        const int w = idx >> 1;
        const int z = idx & 1;
        const auto bra = bell_vector(w, z);
        Collapse c = collapse(state, pair, bra);
        if (!c.state) continue;
        cumulative += c.probability;
        last = BellResult{w, z, std::move(*c.state)};
        if (u < cumulative) return std::move(*last);
    }
    // Roundoff left u above the accumulated mass; take the last nonzero outcome.
    if (!last) throw QuantumError("Bell measurement on a zero state");
    return std::move(*last);
}

double expectation(const StateVector& state, const CMatrix& observable) {
    const auto d = static_cast<Eigen::Index>(state.dim());
    if (observable.rows() != d || observable.cols() != d) {
        throw QuantumError("observable dimension does not match the state");
    }
    if (max_hermitian_defect(observable) > 1e-10) {
        throw QuantumError("observable is not Hermitian");
    }
    const CVector v = state.to_eigen();
    const Complex e = v.dot(observable * v);
    if (std::abs(e.imag()) > 1e-10) throw QuantumError("expectation has imaginary residue");
    return e.real();
}

double expectation(const DensityMatrix& rho, const CMatrix& observable) {
    const auto d = static_cast<Eigen::Index>(rho.dim());
    if (observable.rows() != d || observable.cols() != d) {
        throw QuantumError("observable dimension does not match the state");
    }
    if (max_hermitian_defect(observable) > 1e-10) {
        throw QuantumError("observable is not Hermitian");
    }
    const Complex e = (rho.matrix() * observable).trace();
    if (std::abs(e.imag()) > 1e-10) throw QuantumError("expectation has imaginary residue");
    return e.real();
}

double matrix_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
    if (rho.dim() != sigma.dim()) throw QuantumError("fidelity of mismatched dimensions");
    // Roundoff-level eigenvalues of rank-deficient inputs would otherwise
    // leak sqrt(1e-16) terms into the trace.
    constexpr double kZeroEig = 1e-14;
    const auto clip = [](const Eigen::VectorXd& ev) {
        return ev.unaryExpr([](double x) { return x < kZeroEig ? 0.0 : std::sqrt(x); }).eval();
    };
    Eigen::SelfAdjointEigenSolver<CMatrix> es(rho.matrix());
    const Eigen::VectorXd root = clip(es.eigenvalues());
    const CMatrix sqrt_rho =
        es.eigenvectors() * root.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    CMatrix inner = sqrt_rho * sigma.matrix() * sqrt_rho;
    inner = (0.5 * (inner + inner.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> es_inner(inner, Eigen::EigenvaluesOnly);
    const double tr = clip(es_inner.eigenvalues()).sum();
    return std::clamp(tr * tr, 0.0, 1.0);
}

StateVector tensor(const StateVector& a, const StateVector& b) {
    if (a.n_qubits() + b.n_qubits() > kMaxQubits) {
        throw QuantumError("tensor product exceeds the dense qubit limit");
    }
    std::vector<Complex> out;
    out.reserve(a.dim() * b.dim());
    for (const auto& x : a.amplitudes()) {
        for (const auto& y : b.amplitudes()) out.push_back(x * y);
    }
    return StateAccess::make(std::move(out));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dim() * b.dim() > (std::size_t{1} << kMaxQubits)) {
        throw QuantumError("tensor product exceeds the dense qubit limit");
    }
    return DensityMatrix(kron(a.matrix(), b.matrix()));
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const int> keep) {
    const int n = rho.n_qubits();
    check_distinct(keep, n);
    std::vector<int> traced;
    for (int q = 0; q < n; ++q) {
        if (std::find(keep.begin(), keep.end(), q) == keep.end()) traced.push_back(q);
    }
    const auto place = [n](std::uint64_t local, std::span<const int> qs) {
        std::uint64_t idx = 0;
        const auto k = qs.size();
        for (std::size_t t = 0; t < k; ++t) {
            if (local & (std::uint64_t{1} << (k - 1 - t))) idx |= mask_of(qs[t], n);
        }
        return idx;
    };
    const std::uint64_t dk = std::uint64_t{1} << keep.size();
    const std::uint64_t dt = std::uint64_t{1} << traced.size();
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
    for (std::uint64_t i = 0; i < dk; ++i) {
        const std::uint64_t bi = place(i, keep);
        for (std::uint64_t j = 0; j < dk; ++j) {
            const std::uint64_t bj = place(j, keep);
            Complex acc = 0.0;
            for (std::uint64_t t = 0; t < dt; ++t) {
                const std::uint64_t bt = place(t, traced);
                acc += rho.matrix()(static_cast<Eigen::Index>(bi | bt),
                                    static_cast<Eigen::Index>(bj | bt));
            }
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = acc;
        }
    }
    return DensityMatrix(std::move(out));
}

double gaussian(Rng& rng) {
    // Box-Muller; 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

StateVector random_state(int n_qubits, Rng& rng) {
    if (n_qubits < 0 || n_qubits > kMaxQubits) throw QuantumError("unsupported qubit count");
    std::vector<Complex> amps(std::size_t{1} << n_qubits);
    for (auto& a : amps) {
        const double re = gaussian(rng);
        a = Complex(re, gaussian(rng));
    }
    return StateVector::normalized(std::move(amps));
}

DensityMatrix random_density_matrix(std::size_t dim, std::size_t rank, Rng& rng) {
    if (dim == 0 || rank == 0) throw QuantumError("random density matrix needs dim, rank > 0");
    CMatrix a(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(rank));
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            const double re = gaussian(rng);
            a(i, j) = Complex(re, gaussian(rng));
        }
    }
    CMatrix rho = a * a.adjoint();
    rho /= rho.trace();
    return DensityMatrix(std::move(rho));
}

}  // namespace veriphoton
