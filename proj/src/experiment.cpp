#include "veriphoton/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "veriphoton/parallel.hpp"

namespace veriphoton {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ValidationError(where + " must be a JSON object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.contains(key)) throw ValidationError("unknown key '" + key + "' in " + where);
    }
}

template <class T>
T get_field(const json& obj, const std::string& key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ValidationError("'" + key + "' in " + where + " is missing or has the wrong type");
    }
}

std::vector<Complex> parse_amplitudes(const json& doc, const std::string& where) {
    if (!doc.is_array()) throw ValidationError(where + " must be an array of [re, im] pairs");
    std::vector<Complex> amps;
    for (const auto& pair : doc) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
            throw ValidationError(where + " entries must be [re, im] pairs");
        }
        amps.emplace_back(pair[0].get<double>(), pair[1].get<double>());
    }
    return amps;
}

StateVector parse_state(const json& doc, const std::string& where) {
    auto amps = parse_amplitudes(doc, where);
    double nrm = 0.0;
    for (const auto& a : amps) nrm += std::norm(a);
    if (std::abs(nrm - 1.0) > 1e-9) throw ValidationError(where + " is not normalized");
    return StateVector::normalized(std::move(amps));
}

json state_json(const StateVector& s) {
    json a = json::array();
    for (const auto& x : s.amplitudes()) a.push_back({x.real(), x.imag()});
    return a;
}

AdversarySpec parse_adversary(const json& doc) {
    const std::string where = "adversary";
    if (!doc.is_object()) throw ValidationError("adversary must be a JSON object");
    const auto type = get_field<std::string>(doc, "type", where);
    if (type == "honest") {
        reject_unknown(doc, {"type"}, where);
        return HonestAdversary{};
    }
    if (type == "random_outcomes") {
        reject_unknown(doc, {"type"}, where);
        return RandomOutcomesAdversary{};
    }
    if (type == "wrong_witness") {
        reject_unknown(doc, {"type", "state"}, where);
        return WrongWitnessAdversary{parse_state(doc.at("state"), "adversary.state")};
    }
    if (type == "vacuum_forge") {
        reject_unknown(doc, {"type", "strategy", "fallback"}, where);
        const auto strategy = doc.contains("strategy") ? get_field<std::string>(doc, "strategy", where)
                                                       : std::string("greedy");
        VacuumForgeAdversary a{VacuumForgeAdversary::Strategy::Greedy,
                               parse_state(doc.at("fallback"), "adversary.fallback")};
        if (strategy == "all_or_nothing") {
            a.strategy = VacuumForgeAdversary::Strategy::AllOrNothing;
        } else if (strategy != "greedy") {
            throw ValidationError("adversary.strategy must be 'greedy' or 'all_or_nothing'");
        }
        return a;
    }
    if (type == "fixed_state_replace") {
        reject_unknown(doc, {"type", "rho"}, where);
        const json& rows = doc.at("rho");
        if (!rows.is_array() || rows.size() != 2) throw ValidationError("adversary.rho must be a 2x2 matrix");
        CMatrix rho(2, 2);
        for (int r = 0; r < 2; ++r) {
            const auto row = parse_amplitudes(rows[static_cast<std::size_t>(r)], "adversary.rho row");
            if (row.size() != 2) throw ValidationError("adversary.rho must be a 2x2 matrix");
            rho(r, 0) = row[0];
            rho(r, 1) = row[1];
        }
        return FixedStateReplaceAdversary{DensityMatrix(rho)};
    }
    if (type == "single_photon_channel") {
        reject_unknown(doc, {"type", "p"}, where);
        return SinglePhotonChannelAdversary{get_field<double>(doc, "p", where)};
    }
    throw ValidationError("unknown adversary type '" + type + "'");
}

json adversary_json(const AdversarySpec& adversary) {
    return std::visit(
        [](const auto& a) -> json {
            using T = std::decay_t<decltype(a)>;
            if constexpr (std::is_same_v<T, HonestAdversary>) {
                return {{"type", "honest"}};
            } else if constexpr (std::is_same_v<T, RandomOutcomesAdversary>) {
                return {{"type", "random_outcomes"}};
            } else if constexpr (std::is_same_v<T, WrongWitnessAdversary>) {
                return {{"type", "wrong_witness"}, {"state", state_json(a.state)}};
            } else if constexpr (std::is_same_v<T, VacuumForgeAdversary>) {
                return {{"type", "vacuum_forge"},
                        {"strategy", a.strategy == VacuumForgeAdversary::Strategy::Greedy ? "greedy"
                                                                                          : "all_or_nothing"},
                        {"fallback", state_json(a.fallback)}};
            } else if constexpr (std::is_same_v<T, FixedStateReplaceAdversary>) {
                json rows = json::array();
                for (int r = 0; r < 2; ++r) {
                    json row = json::array();
                    for (int c = 0; c < 2; ++c) {
                        const Complex x = a.rho.matrix()(r, c);
                        row.push_back({x.real(), x.imag()});
                    }
                    rows.push_back(row);
                }
                return {{"type", "fixed_state_replace"}, {"rho", rows}};
            } else {
                return {{"type", "single_photon_channel"}, {"p", a.p}};
            }
        },
        adversary);
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(path.string() + " is not valid JSON: " + e.what());
    }
}

double round12(double x) { return std::stod(format_number(x)); }

json bits_json(const Bits& bits) {
    json a = json::array();
    for (auto b : bits) a.push_back(static_cast<int>(b));
    return a;
}

json p1_round_json(const P1Round& r) {
    return {{"h", bits_json(r.secret.h)},
            {"s", bits_json(r.secret.s)},
            {"w", bits_json(r.outcomes.w)},
            {"z", bits_json(r.outcomes.z)},
            {"pair", {r.verdict.sampled_pair->first, r.verdict.sampled_pair->second}},
            {"branch", std::string(to_string(r.verdict.branch))},
            {"accepted", r.verdict.accepted}};
}

}  // namespace

std::string format_number(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

ExperimentConfig parse_experiment(const json& doc, const std::filesystem::path& base_dir) {
    reject_unknown(doc, {"protocol", "instance", "adversary", "trials", "seed", "m", "alpha", "f", "outputs"},
                   "experiment");
    const auto protocol = get_field<std::string>(doc, "protocol", "experiment");
    if (protocol != "p1" && protocol != "p2") throw ValidationError("protocol must be 'p1' or 'p2'");
    if (!doc.contains("instance")) throw ValidationError("experiment is missing 'instance'");

    json inst_doc = doc.at("instance");
    if (inst_doc.is_string()) {
        std::filesystem::path p = inst_doc.get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        inst_doc = read_json_file(p);
    }
    std::optional<InstanceSpec> instance;
    try {
        instance = instance_from_json(inst_doc);
    } catch (const QuantumError& e) {
        throw ValidationError(std::string("instance: ") + e.what());
    } catch (const json::exception& e) {
        throw ValidationError(std::string("instance: ") + e.what());
    }

    AdversarySpec adversary = HonestAdversary{};
    try {
        if (doc.contains("adversary")) adversary = parse_adversary(doc.at("adversary"));
    } catch (const QuantumError& e) {
        throw ValidationError(std::string("adversary: ") + e.what());
    } catch (const json::exception& e) {
        throw ValidationError(std::string("adversary: ") + e.what());
    }

    const double f = doc.contains("f") ? get_field<double>(doc, "f", "experiment") : instance->f;
    ExperimentConfig config{protocol == "p1" ? ProtocolKind::P1 : ProtocolKind::P2,
                            RunConfig{*instance, 75, 1.0, 1000, 0, adversary}, f, false, false, std::nullopt};
    if (doc.contains("trials")) {
        const auto trials = get_field<std::int64_t>(doc, "trials", "experiment");
        if (trials < 1) throw ValidationError("trials must be positive");
        config.run.trials = static_cast<std::uint64_t>(trials);
    }
    if (doc.contains("seed")) config.run.seed = get_field<std::uint64_t>(doc, "seed", "experiment");
    if (doc.contains("m")) config.run.m = get_field<int>(doc, "m", "experiment");
    if (doc.contains("alpha")) config.run.alpha = get_field<double>(doc, "alpha", "experiment");
    if (doc.contains("outputs")) {
        const json& out = doc.at("outputs");
        reject_unknown(out, {"dir", "transcripts", "pulses"}, "outputs");
        if (out.contains("dir")) config.out_dir = get_field<std::string>(out, "dir", "outputs");
        if (out.contains("transcripts")) config.transcripts = get_field<bool>(out, "transcripts", "outputs");
        if (out.contains("pulses")) config.pulses = get_field<bool>(out, "pulses", "outputs");
    }
    if (!(config.f >= 1.0)) throw ValidationError("f must be at least 1");
    if (config.protocol == ProtocolKind::P1 && std::holds_alternative<VacuumForgeAdversary>(adversary)) {
        throw ValidationError("vacuum_forge needs the photonic protocol (p2)");
    }
    try {
        config.run.validate();
    } catch (const QuantumError& e) {
        throw ValidationError(e.what());
    }
    return config;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
    return parse_experiment(read_json_file(path), path.parent_path());
}

json canonical_config(const ExperimentConfig& config) {
    json doc;
    doc["protocol"] = config.protocol == ProtocolKind::P1 ? "p1" : "p2";
    doc["instance"] = instance_to_json(config.run.instance);
    doc["adversary"] = adversary_json(config.run.adversary);
    doc["trials"] = config.run.trials;
    doc["seed"] = config.run.seed;
    doc["f"] = config.f;
    if (config.protocol == ProtocolKind::P2) {
        doc["m"] = config.run.m;
        doc["alpha"] = config.run.alpha;
    }
    return doc;
}

std::string config_hash(const ExperimentConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical_config(config).dump()) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ExperimentOutput run_experiment(const ExperimentConfig& config, int threads) {
    const RunConfig& run = config.run;
    const auto& h = run.instance.hamiltonian;
    json record;
    record["config_hash"] = config_hash(config);
    record["protocol"] = config.protocol == ProtocolKind::P1 ? "p1" : "p2";
    record["adversary"] = adversary_name(run.adversary);

    McEstimate mc;
    double bound = 0.0;
    bool bound_ok = false;
    double b_eff = 0.0;
    std::optional<double> exact;
    std::ostringstream transcripts;

    if (config.protocol == ProtocolKind::P1) {
        if (run.trials < 100) throw ValidationError("p1 runs need at least 100 trials");
        const ProverPovm povm = induced_povm(run);
        std::vector<P1Round> rounds(run.trials);
        parallel_for(run.trials, threads, [&](std::uint64_t t) {
            Rng rng(derive_seed(run.seed, t));
            rounds[t] = run_protocol1_round(h, povm, rng);
        });
        std::uint64_t accepts = 0;
        for (const auto& r : rounds) accepts += r.verdict.accepted ? 1 : 0;
        mc = make_estimate(accepts, run.trials);
        b_eff = effective_energy(h, povm);
        exact = exact_pacc_povm(h, povm);
        const double slack = 3.0 * mc.stderr_;
        if (std::holds_alternative<HonestAdversary>(run.adversary)) {
            bound = 1.0 - run.instance.a / 2.0;
            bound_ok = mc.estimate + slack >= bound;
        } else {
            bound = 1.0 - b_eff / 2.0;
            bound_ok = mc.estimate - slack <= bound;
        }
        if (config.transcripts) {
            for (std::uint64_t t = 0; t < rounds.size(); ++t) {
                json line = p1_round_json(rounds[t]);
                line["trial"] = t;
                transcripts << line.dump() << '\n';
            }
        }
    } else {
        if (run.trials < 1000) throw ValidationError("p2 runs need at least 1000 trials");
        std::vector<RoundTranscript> rounds;
        const P2Estimate est = estimate_pacc(run, threads, config.transcripts ? &rounds : nullptr);
        mc = est.mc;
        bound = est.bound;
        bound_ok = est.bound_ok;
        b_eff = est.b_eff;
        exact = est.exact;
        record["case_i"] = est.case_i;
        record["case_i_accepts"] = est.case_i_accepts;
        record["threshold_rejects"] = est.threshold_rejects;
        for (std::uint64_t t = 0; t < rounds.size(); ++t) {
            json line = round_to_json(rounds[t], config.pulses);
            line["trial"] = t;
            transcripts << line.dump() << '\n';
        }
    }

    record["trials"] = mc.trials;
    record["accepts"] = mc.accepts;
    record["estimate"] = round12(mc.estimate);
    record["stderr"] = round12(mc.stderr_);
    record["ci"] = {round12(mc.estimate - mc.half_width), round12(mc.estimate + mc.half_width)};
    record["b_eff"] = round12(b_eff);
    record["bound"] = round12(bound);
    record["bound_check"] = bound_ok ? "pass" : "fail";
    record["exact"] = exact ? json(round12(*exact)) : json(nullptr);
    record["gap_lower_bound"] = round12(gap_lower_bound(run.n_qubits(), config.f));

    ExperimentOutput out;
    out.record = record;
    out.results_jsonl = record.dump() + "\n";
    std::ostringstream csv;
    csv << "config_hash,protocol,adversary,trials,accepts,estimate,stderr,ci_low,ci_high,b_eff,bound,"
           "bound_check,exact\n";
    csv << record["config_hash"].get<std::string>() << ',' << record["protocol"].get<std::string>() << ','
        << record["adversary"].get<std::string>() << ',' << mc.trials << ',' << mc.accepts << ','
        << format_number(mc.estimate) << ',' << format_number(mc.stderr_) << ','
        << format_number(mc.estimate - mc.half_width) << ',' << format_number(mc.estimate + mc.half_width)
        << ',' << format_number(b_eff) << ',' << format_number(bound) << ',' << (bound_ok ? "pass" : "fail")
        << ',' << (exact ? format_number(*exact) : std::string()) << '\n';
    out.summary_csv = csv.str();
    out.transcripts_jsonl = transcripts.str();
    return out;
}

void write_outputs(const ExperimentOutput& output, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    auto write = [&](const char* name, const std::string& text) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw IoError("cannot write " + (dir / name).string());
        f << text;
        if (!f) throw IoError("failed writing " + (dir / name).string());
    };
    write("summary.csv", output.summary_csv);
    write("results.jsonl", output.results_jsonl);
    if (!output.transcripts_jsonl.empty()) write("transcripts.jsonl", output.transcripts_jsonl);
}

}  // namespace veriphoton
