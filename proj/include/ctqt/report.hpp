#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ctqt/protocol.hpp"

namespace ctqt {

inline constexpr const char* kArtifactVersion = "1.0.0";

// One experiment batch: a RunConfig template executed `trials` times with
// per-trial seeds derived from the master seed.
struct ExperimentSpec {
    RunConfig base;
    int trials = 1;
    int random_agree_t = -1;  // >= 0: draw a fresh t-subset per trial
    std::string out;          // empty = stdout
    std::string format = "json";
    bool full_transcript = false;
    int verbosity = 0;

    void validate() const;  // throws ValidationError
};

struct Aggregates {
    double mean_fidelity = 0.0;
    double success_rate = 0.0;
    double prep_single_ops = 0.0;  // means; integral for fixed configs
    double prep_two_ops = 0.0;
    double bob_alice_ops = 0.0;
    double bob_controller_ops_mean = 0.0;
    double bob_controller_ops_var = 0.0;
    double solicits_mean = 0.0;
    long aborts = 0;
    std::map<std::string, long> abort_reasons;
    // econ-bob only: the exact per-trial expectation averaged over trials,
    // and the coarse m - t/2 estimate
    double expected_controller_ops_mean = 0.0;
    double naive_controller_ops_estimate = 0.0;
};

struct TrialRecord {
    std::uint64_t seed = 0;
    std::vector<int> agree;
    RunResult result;
};

struct Report {
    ExperimentSpec spec;
    std::uint64_t seed = 0;
    Aggregates aggregates;
    std::vector<TrialRecord> runs;  // populated when full_transcript is set
};

Report run_experiments(const ExperimentSpec& spec);

// Recompute aggregates from per-run records (consistency checks).
Aggregates aggregate_trials(const ExperimentSpec& spec, const std::vector<TrialRecord>& runs);

// Serialization. The timestamp is the only nondeterministic field; pass
// with_timestamp = false for byte-stable output.
std::string report_to_json(const Report& report, bool with_timestamp = true);
std::string report_to_csv(const Report& report);

}  // namespace ctqt
