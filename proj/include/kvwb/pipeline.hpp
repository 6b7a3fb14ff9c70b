#pragma once

// The full derivation pipeline on one model: validation, bi-symmetry,
// irreducibility, SPIN form, conjugate, self-duality, sharpness,
// homogeneity, Jordan recovery and identification.

#include "kvwb/io.hpp"
#include "kvwb/model.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kvwb {

enum class StageStatus { Pass, Fail, NotApplicable, Unknown };

std::string to_string(StageStatus s);

struct Stage {
    std::string name;
    std::string negative;  // expectation token for a failure, e.g. "not-self-dual"
    StageStatus status = StageStatus::Unknown;
    Json detail;
};

struct PipelineOptions {
    std::uint64_t seed = 42;
    double tol = 1e-9;
    std::vector<std::string> expectations;  // negative tokens
};

struct PipelineReport {
    Json model;
    std::uint64_t seed = 0;
    double tol = 0;
    std::vector<Stage> stages;
    std::vector<std::string> expectations;
    std::vector<std::string> unexpected_failures;
    std::vector<std::string> unmet_expectations;

    /// 0 when every failure was expected and every expectation happened.
    int exit_code() const;
    const Stage& stage(const std::string& name) const;
};

/// Every accepted expectation token.
std::vector<std::string> expectation_tokens();

/// Throws ParseError for unknown expectation tokens and CapExceeded from
/// group enumeration; other errors inside a stage mark it failed.
PipelineReport run_pipeline(const Model& m, const PipelineOptions& options);

Json to_json(const PipelineReport& r);

/// One heading per stage and one bullet per JSON field, in JSON order.
std::string json_to_markdown(const Json& report);

struct RecheckItem {
    std::string name;
    bool agrees = false;
    std::string detail;
};

/// Re-verifies every certificate embedded in a JSON report against the
/// embedded model: validation, form flags, duality and weak-duality
/// certificates, the conjugate table, and the recovered product.
std::vector<RecheckItem> recheck_report(const Json& report);

}  // namespace kvwb
