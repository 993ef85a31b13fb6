#include "veriphoton/protocol2.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "veriphoton/parallel.hpp"

namespace veriphoton {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};

constexpr int kMaxP2Qubits = 4;

std::vector<int> forge_report(const VacuumForgeAdversary& adv, const PulseBatch& batch, double threshold) {
    std::vector<int> vacuums;
    std::vector<int> singles;
    for (int k = 0; k < batch.m(); ++k) {
        const int n = batch.pulses[static_cast<std::size_t>(k)].photon_count;
        if (n == 0) vacuums.push_back(k);
        if (n == 1) singles.push_back(k);
    }
    const int unknown = static_cast<int>(vacuums.size() + singles.size());
    const int hide = adv.strategy == VacuumForgeAdversary::Strategy::AllOrNothing
                         ? unknown
                         : std::min(unknown, static_cast<int>(std::floor(threshold)));
    std::vector<int> reported = qnd_report(batch);
    int hidden = 0;
    for (int k : vacuums) {
        reported[static_cast<std::size_t>(k)] = hidden < hide ? 0 : 1;
        ++hidden;
    }
    for (int k : singles) {
        reported[static_cast<std::size_t>(k)] = hidden < hide ? 0 : 1;
        ++hidden;
    }
    return reported;
}

// Outcome that makes s' the classical string accepted with the highest
// probability given h.
BellOutcomes best_classical_outcome(const VerifierSecret& secret, const LocalHamiltonian& h) {
    const int n = secret.size();
    BellOutcomes best;
    double best_p = -1.0;
    for (std::uint64_t target = 0; target < (std::uint64_t{1} << n); ++target) {
        BellOutcomes out{Bits(static_cast<std::size_t>(n), 0), Bits(static_cast<std::size_t>(n))};
        for (int k = 0; k < n; ++k) {
            const auto bit = static_cast<std::uint8_t>((target >> (n - 1 - k)) & 1u);
            out.z[static_cast<std::size_t>(k)] = secret.s[static_cast<std::size_t>(k)] ^ bit;
        }
        const double p = acceptance_given(secret, out, h);
        if (p > best_p + 1e-15) {
            best_p = p;
            best = std::move(out);
        }
    }
    return best;
}

RoundTranscript run_round_with(const RunConfig& config, const std::optional<ProverPovm>& povm,
                               std::uint64_t trial) {
    const int n = config.n_qubits();
    const double threshold = vacuum_threshold(config.m, config.alpha);
    const auto* forge = std::get_if<VacuumForgeAdversary>(&config.adversary);

    RoundTranscript round;
    VerifierSecret secret{Bits(static_cast<std::size_t>(n)), Bits(static_cast<std::size_t>(n))};
    bool all_pass = true;
    bool all_known = forge != nullptr;
    std::vector<QubitChannel> forge_channels;

    for (int j = 1; j <= n; ++j) {
        Rng rng(derive_seed(config.seed, trial, static_cast<std::uint64_t>(j)));
        const PulseBatch batch = sample_batch(config.m, config.alpha, rng, j);
        RepetitionRecord rec;
        rec.pulses = batch.pulses;
        rec.actual = photon_stats(batch);
        rec.reported = forge ? forge_report(*forge, batch, threshold) : qnd_report(batch);
        rec.m0_reported = photon_stats(rec.reported).m0;
        rec.threshold_pass = threshold_check(rec.m0_reported, config.m, config.alpha);
        if (rec.actual.m0 + rec.actual.m1 <= threshold) round.case_i = true;

        if (rec.threshold_pass) {
            const std::vector<int> kept = survivors(rec.reported);
            std::vector<Angle4> sigma;
            bool vacuum_inside = false;
            bool unknown_inside = false;
            for (int k : kept) {
                const Pulse& p = batch.pulses[static_cast<std::size_t>(k)];
                sigma.push_back(p.angle);
                vacuum_inside |= p.photon_count == 0;
                unknown_inside |= p.photon_count <= 1;
            }
            rec.i1dc = run_symbolic(sigma, rng);
            const auto [hj, sj] = phi_to_hs(rec.i1dc->phi);
            secret.h[static_cast<std::size_t>(j - 1)] = static_cast<std::uint8_t>(hj);
            secret.s[static_cast<std::size_t>(j - 1)] = static_cast<std::uint8_t>(sj);
            all_known &= !unknown_inside;
            if (forge) {
                forge_channels.push_back(vacuum_inside
                                             ? QubitChannel::replace(DensityMatrix::maximally_mixed(2))
                                             : QubitChannel::identity());
            }
        } else {
            all_pass = false;
        }
        round.repetitions.push_back(std::move(rec));
    }

    if (!all_pass) {
        round.verdict.accepted = false;
        round.verdict.branch = Branch::ThresholdReject;
        return round;
    }

    Rng rng(derive_seed(config.seed, trial, 0));
    const auto qubits = verifier_qubits(secret);
    BellOutcomes out;
    if (forge && all_known) {
        out = best_classical_outcome(secret, config.instance.hamiltonian);
    } else if (forge) {
        out = ProverPovm(TeleportPovm{forge->fallback, forge_channels}).sample(qubits, rng);
    } else {
        out = povm->sample(qubits, rng);
    }
    round.verdict = verdict(secret, out, config.instance.hamiltonian, rng);
    round.secret = std::move(secret);
    round.outcomes = std::move(out);
    return round;
}

nlohmann::json bits_json(const Bits& bits) {
    nlohmann::json a = nlohmann::json::array();
    for (auto b : bits) a.push_back(static_cast<int>(b));
    return a;
}

}  // namespace

std::string adversary_name(const AdversarySpec& adversary) {
    return std::visit(Overloaded{
                          [](const HonestAdversary&) { return std::string("honest"); },
                          [](const WrongWitnessAdversary&) { return std::string("wrong_witness"); },
                          [](const RandomOutcomesAdversary&) { return std::string("random_outcomes"); },
                          [](const VacuumForgeAdversary& a) {
                              return std::string(a.strategy == VacuumForgeAdversary::Strategy::Greedy
                                                     ? "vacuum_forge_greedy"
                                                     : "vacuum_forge_all_or_nothing");
                          },
                          [](const FixedStateReplaceAdversary&) { return std::string("fixed_state_replace"); },
                          [](const SinglePhotonChannelAdversary&) {
                              return std::string("single_photon_channel");
                          },
                      },
                      adversary);
}

void RunConfig::validate() const {
    const int n = n_qubits();
    if (n > kMaxP2Qubits) {
        throw QuantumError("end-to-end runs support at most " + std::to_string(kMaxP2Qubits) + " qubits");
    }
    validate_pulse_params(m, alpha);
    std::visit(Overloaded{
                   [&](const HonestAdversary&) {
                       if (!instance.witness) throw QuantumError("honest prover needs an instance witness");
                   },
                   [&](const WrongWitnessAdversary& a) {
                       if (a.state.n_qubits() != n) throw QuantumError("wrong witness has the wrong size");
                   },
                   [](const RandomOutcomesAdversary&) {},
                   [&](const VacuumForgeAdversary& a) {
                       if (a.fallback.n_qubits() != n) throw QuantumError("forge fallback has the wrong size");
                   },
                   [](const FixedStateReplaceAdversary& a) {
                       if (a.rho.dim() != 2) throw QuantumError("replacement state must be a single qubit");
                   },
                   [](const SinglePhotonChannelAdversary& a) {
                       if (!(a.p >= 0.0 && a.p <= 1.0)) {
                           throw QuantumError("depolarizing strength p must lie in [0, 1]");
                       }
                   },
               },
               adversary);
}

ProverPovm induced_povm(const RunConfig& config) {
    const int n = config.n_qubits();
    return std::visit(
        Overloaded{
            [&](const HonestAdversary&) { return ProverPovm::honest(*config.instance.witness); },
            [&](const WrongWitnessAdversary& a) { return ProverPovm::honest(a.state); },
            [&](const RandomOutcomesAdversary&) { return ProverPovm(RandomOutcomePovm{n}); },
            [&](const VacuumForgeAdversary& a) { return ProverPovm::honest(a.fallback); },
            [&](const FixedStateReplaceAdversary& a) {
                return ProverPovm(TeleportPovm{*config.instance.witness,
                                               std::vector<QubitChannel>(static_cast<std::size_t>(n),
                                                                         QubitChannel::replace(a.rho))});
            },
            [&](const SinglePhotonChannelAdversary& a) {
                return ProverPovm(TeleportPovm{*config.instance.witness,
                                               std::vector<QubitChannel>(static_cast<std::size_t>(n),
                                                                         QubitChannel::depolarizing(a.p))});
            },
        },
        config.adversary);
}

double effective_adversary_energy(const RunConfig& config) {
    const auto& h = config.instance.hamiltonian;
    const auto* forge = std::get_if<VacuumForgeAdversary>(&config.adversary);
    if (!forge) return effective_energy(h, induced_povm(config));
    const int n = config.n_qubits();
    double lowest = 1.0;
    for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << n); ++pattern) {
        std::vector<QubitChannel> channels;
        for (int k = 0; k < n; ++k) {
            channels.push_back((pattern >> k) & 1u ? QubitChannel::replace(DensityMatrix::maximally_mixed(2))
                                                   : QubitChannel::identity());
        }
        lowest = std::min(lowest, effective_energy(h, ProverPovm(TeleportPovm{forge->fallback, channels})));
    }
    return lowest;
}

RoundTranscript run_round(const RunConfig& config, std::uint64_t trial) {
    config.validate();
    std::optional<ProverPovm> povm;
    if (!std::holds_alternative<VacuumForgeAdversary>(config.adversary)) povm = induced_povm(config);
    return run_round_with(config, povm, trial);
}

nlohmann::json round_to_json(const RoundTranscript& round, bool with_pulses) {
    nlohmann::json doc;
    if (round.secret) {
        doc["h"] = bits_json(round.secret->h);
        doc["s"] = bits_json(round.secret->s);
    } else {
        doc["h"] = nullptr;
        doc["s"] = nullptr;
    }
    if (round.outcomes) {
        doc["w"] = bits_json(round.outcomes->w);
        doc["z"] = bits_json(round.outcomes->z);
    } else {
        doc["w"] = nullptr;
        doc["z"] = nullptr;
    }
    if (round.verdict.sampled_pair) {
        doc["pair"] = {round.verdict.sampled_pair->first, round.verdict.sampled_pair->second};
    } else {
        doc["pair"] = nullptr;
    }
    doc["branch"] = std::string(to_string(round.verdict.branch));
    doc["accepted"] = round.verdict.accepted;
    doc["case_i"] = round.case_i;
    auto& reps = doc["reps"] = nlohmann::json::array();
    for (std::size_t j = 0; j < round.repetitions.size(); ++j) {
        const auto& rec = round.repetitions[j];
        nlohmann::json r{{"j", j + 1},
                         {"m0", rec.actual.m0},
                         {"m1", rec.actual.m1},
                         {"m0_reported", rec.m0_reported},
                         {"threshold_pass", rec.threshold_pass}};
        if (rec.i1dc) r["i1dc"] = transcript_to_json(*rec.i1dc);
        if (with_pulses) {
            auto& pulses = r["pulses"] = nlohmann::json::array();
            for (std::size_t k = 0; k < rec.pulses.size(); ++k) {
                pulses.push_back({{"k", k}, {"angle", rec.pulses[k].angle.value()}, {"n", rec.pulses[k].photon_count}});
            }
            r["reported"] = rec.reported;
        }
        reps.push_back(std::move(r));
    }
    return doc;
}

P2Estimate estimate_pacc(const RunConfig& config, int threads, std::vector<RoundTranscript>* transcripts) {
    config.validate();
    if (config.trials < 1000) throw QuantumError("estimate_pacc needs at least 1000 trials");
    std::optional<ProverPovm> povm;
    if (!std::holds_alternative<VacuumForgeAdversary>(config.adversary)) povm = induced_povm(config);

    struct Outcome {
        std::uint8_t accepted = 0;
        std::uint8_t case_i = 0;
        std::uint8_t threshold_reject = 0;
    };
    std::vector<Outcome> outcomes(config.trials);
    if (transcripts) transcripts->assign(config.trials, RoundTranscript{});
    parallel_for(config.trials, threads, [&](std::uint64_t t) {
        RoundTranscript round = run_round_with(config, povm, t);
        outcomes[t] = Outcome{static_cast<std::uint8_t>(round.verdict.accepted),
                              static_cast<std::uint8_t>(round.case_i),
                              static_cast<std::uint8_t>(round.verdict.branch == Branch::ThresholdReject)};
        if (transcripts) (*transcripts)[t] = std::move(round);
    });

    P2Estimate est;
    std::uint64_t accepts = 0;
    for (const auto& o : outcomes) {
        accepts += o.accepted;
        est.case_i += o.case_i;
        est.case_i_accepts += o.case_i & o.accepted;
        est.threshold_rejects += o.threshold_reject;
    }
    est.mc = make_estimate(accepts, config.trials);

    const int n = config.n_qubits();
    const double union_term = n * hoeffding_term(config.m, config.alpha);
    const double slack = 3.0 * est.mc.stderr_;
    if (std::holds_alternative<HonestAdversary>(config.adversary)) {
        est.b_eff = energy(config.instance.hamiltonian, *config.instance.witness);
        est.bound = 1.0 - config.instance.a / 2.0 - union_term;
        est.bound_ok = est.mc.estimate + slack >= est.bound;
    } else {
        est.b_eff = effective_adversary_energy(config);
        est.bound = 1.0 - est.b_eff / 2.0 + union_term;
        est.bound_ok = est.mc.estimate - slack <= est.bound;
    }
    if (povm) {
        est.exact = std::pow(threshold_pass_probability(config.m, config.alpha), n) *
                    exact_pacc_povm(config.instance.hamiltonian, *povm);
    }
    return est;
}

RecommendedParams recommended_params(int n_qubits, double f) {
    if (n_qubits < 2) throw QuantumError("recommended parameters need N >= 2");
    if (!(f >= 1.0)) throw QuantumError("f must be at least 1");
    const double e2 = std::exp(2.0);
    const double raw = 2.0 * e2 * std::log(4.0 * n_qubits * n_qubits * f);
    return RecommendedParams{1.0, std::max(8, static_cast<int>(std::ceil(raw)))};
}

double gap_lower_bound(int n_qubits, double f) {
    if (n_qubits < 2) throw QuantumError("the gap bound needs N >= 2");
    if (!(f >= 1.0)) throw QuantumError("f must be at least 1");
    return (n_qubits - 1.0) / (2.0 * n_qubits * f);
}

bool distinguish(const McEstimate& honest, const McEstimate& adversary, int n_qubits, double f) {
    return honest.estimate - adversary.estimate >=
           gap_lower_bound(n_qubits, f) - (honest.half_width + adversary.half_width);
}

}  // namespace veriphoton
