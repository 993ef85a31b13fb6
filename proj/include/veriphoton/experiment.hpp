#pragma once

// Experiment files, seeded runs and result serialization shared by the CLI
// and the acceptance harness.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "veriphoton/protocol2.hpp"

namespace veriphoton {

/// A config value outside its allowed schema or range (CLI exit code 2).
class ValidationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A file could not be read or written (CLI exit code 3).
class IoError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class ProtocolKind { P1, P2 };

struct ExperimentConfig {
    ProtocolKind protocol = ProtocolKind::P1;
    RunConfig run;
    double f = 1.0;
    bool transcripts = false;
    bool pulses = false;
    std::optional<std::filesystem::path> out_dir;
};

/// Experiment document:
///   {"protocol": "p1"|"p2", "instance": {...} | "path.json",
///    "adversary": {"type": ...}, "trials", "seed", "m", "alpha", "f",
///    "outputs": {"dir", "transcripts", "pulses"}}
/// Unknown keys and out-of-range values raise ValidationError. Relative
/// instance paths resolve against `base_dir`.
ExperimentConfig parse_experiment(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ExperimentConfig load_experiment(const std::filesystem::path& path);

/// Canonical JSON of the effective configuration (outputs excluded).
nlohmann::json canonical_config(const ExperimentConfig& config);
/// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

struct ExperimentOutput {
    nlohmann::json record;
    std::string summary_csv;
    std::string results_jsonl;
    std::string transcripts_jsonl;  // empty unless transcripts were requested
};

ExperimentOutput run_experiment(const ExperimentConfig& config, int threads = 0);

/// Writes summary.csv, results.jsonl and (when present) transcripts.jsonl.
void write_outputs(const ExperimentOutput& output, const std::filesystem::path& dir);

/// %.12g.
std::string format_number(double x);

}  // namespace veriphoton
