#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dioph/errors.hpp"
#include "dioph/linear_system.hpp"
#include "dioph/precision.hpp"

namespace dioph {

/// Flat key = value manifest. Values are checked against a fixed schema of
/// typed keys; unknown keys are rejected.
class ExperimentManifest {
public:
    static const std::vector<std::string>& kinds();

    static ExperimentManifest parse(const std::string& text);
    static ExperimentManifest load(const std::string& path);
    /// Template with every key the kind uses, filled with working defaults.
    static ExperimentManifest template_for(const std::string& kind);

    /// Throws InvalidManifest.
    void validate() const;

    const std::string& kind() const;
    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value);
    void erase(const std::string& key) { values_.erase(key); }

    std::string text(const std::string& key, const std::string& fallback = "") const;
    std::int64_t integer(const std::string& key, std::int64_t fallback = 0) const;
    double real(const std::string& key, double fallback = 0) const;
    std::vector<std::int64_t> int_list(const std::string& key) const;

    const std::map<std::string, std::string>& values() const { return values_; }
    std::string to_text() const;

    friend bool operator==(const ExperimentManifest&, const ExperimentManifest&) = default;

private:
    std::map<std::string, std::string> values_;
};

struct Verdict {
    std::string name;
    std::string anchor;
    bool pass = false;
    double margin = 0;  // kept at 15 significant digits
    std::string detail;

    friend bool operator==(const Verdict&, const Verdict&) = default;
};

Verdict make_verdict(std::string name, std::string anchor, bool pass, double margin, std::string detail = "");

struct Report {
    ExperimentManifest manifest_echo;
    std::vector<std::pair<std::string, std::string>> tables;  // name, csv with header row
    std::vector<Verdict> verdicts;
    std::vector<std::pair<std::string, double>> timing;       // phase, seconds

    bool all_pass() const;
    const std::string* table(const std::string& name) const;
};

/// Effective global settings after environment overrides (DLAB_BUDGET, DLAB_PRECISION).
struct RunSettings {
    std::uint64_t budget = 1'000'000'000;
    int precision = 128;
    std::string budget_source = "default";
    std::string precision_source = "default";
};

RunSettings settings_for(const ExperimentManifest& manifest);

/// A module error, tagged with the phase in which it happened.
class RunFailure : public Error {
public:
    RunFailure(std::string phase, const std::string& what, int exit_code)
        : Error(phase + ": " + what), phase_(std::move(phase)), exit_code_(exit_code) {}
    const std::string& phase() const noexcept { return phase_; }
    int exit_code() const noexcept { return exit_code_; }

private:
    std::string phase_;
    int exit_code_;
};

/// The system named by the manifest's system.* keys.
LinearSystem build_system(const ExperimentManifest& manifest, const PrecisionContext& ctx);

/// Runs the experiment. Deterministic given the manifest and environment.
/// Writes to output_dir when the manifest names one.
Report run(const ExperimentManifest& manifest);

enum class ReportFormat { csv, structured_text };

/// Writes the report under `dir`; returns the written paths.
std::vector<std::string> emit_report(const Report& report, ReportFormat format, const std::string& dir);

std::string report_to_text(const Report& report);
Report parse_report(const std::string& text);

struct VerifyResult {
    bool reproduced = false;  // tables and verdicts equal after a re-run
    bool all_pass = false;
    std::vector<std::string> differences;
};

/// Re-runs the manifest echoed in a stored report and compares.
VerifyResult verify_report(const Report& stored);

/// 0 all verdicts pass, 2 some verdict fails.
int exit_code_for(const Report& report);

}  // namespace dioph
