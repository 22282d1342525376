#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ctqt/sharing.hpp"
#include "ctqt/sim.hpp"

namespace ctqt {

// The five control schemes. GhzMm is the standard (m,m) GHZ control;
// QuditPoly shares p-dimensional qudits via polynomial coding; Classical
// uses classical keys only; EconQubit is the qubit-key hybrid; EconBob adds
// the +/- basis economization over multiple channels.
enum class SchemeKind { GhzMm, QuditPoly, Classical, EconQubit, EconBob };

enum class ScenarioKind { Honest, BobStealsKeys, ScheduleViolation, WrongOutcome, WrongKey };

std::string to_string(SchemeKind s);
std::string to_string(ScenarioKind s);
SchemeKind scheme_from_string(const std::string& s);    // throws ParseError
ScenarioKind scenario_from_string(const std::string& s);

struct Scenario {
    ScenarioKind kind = ScenarioKind::Honest;
    std::vector<int> members;  // stolen key holders / friendly controllers, 1-based
    int liar = 0;              // WrongOutcome / WrongKey
};

struct Message {
    enum class Kind { BellOutcomes, AgreeReport, Solicit, SolicitReply, ClassicalKey, Abort };

    int seq = 0;
    std::string sender;
    std::string receiver;
    Kind kind = Kind::Abort;
    std::vector<std::pair<int, int>> bell;  // BellOutcomes payload
    int s = 0;                              // controller index
    std::int64_t outcome = 0;               // r_s / u_s / v_s / measured digit
    std::int64_t key = -1;                  // c_s, -1 when the message carries none
    std::string reason;                     // Abort payload
};

std::string to_string(Message::Kind k);
std::string transcript_to_string(const std::vector<Message>& transcript);

struct Metrics {
    long prep_single_qubit_ops = 0;
    long prep_two_qubit_ops = 0;
    long bell_measurements = 0;
    long controller_measurements = 0;
    long bob_alice_recovery_ops = 0;
    long bob_controller_recovery_ops = 0;
    long solicits_sent = 0;
};

struct RunConfig {
    SchemeKind scheme = SchemeKind::EconQubit;
    int n = 1;
    int m = 2;
    int k = 2;
    std::int64_t p = 0;  // 0 = smallest prime >= m
    std::vector<int> agree;
    std::vector<int> channels;  // per-controller channel (EconBob); empty = all on n
    Scenario scenario;
    std::uint64_t seed = 0;
    std::vector<Complex> input;        // 2^n amplitudes; empty = random input
    std::vector<std::int64_t> secret;  // length k; empty = dealer draws
    std::vector<BasisSpec> bases;      // length m; empty = Haar at setup

    std::int64_t effective_p() const;
    std::vector<int> effective_channels() const;
    void validate() const;  // throws ValidationError
};

inline constexpr const char* kAbortInsufficientAgreement = "AbortInsufficientAgreement";
inline constexpr const char* kAbortSolicitCapExceeded = "AbortSolicitCapExceeded";
inline constexpr const char* kAbortInconsistentShares = "InconsistentShares";
inline constexpr const char* kFlagScheduleViolation = "schedule-violation-completed";

struct RunResult {
    double fidelity = 0.0;
    bool success = false;  // fidelity > 1 - 1e-9
    std::vector<Message> transcript;
    std::vector<MeasurementRecord> records;
    Metrics metrics;
    std::optional<std::string> abort_reason;
    std::vector<std::string> flags;
};

// One protocol instance under a deterministic phase-ordered scheduler:
// dealer setup -> preparation -> Alice -> agreeing controllers -> Bob partial
// -> solicits/replies -> Bob finish. run() composes the stages; they are also
// public so tests can drive and inspect a run stepwise.
class ProtocolRun {
public:
    explicit ProtocolRun(RunConfig cfg);

    RunResult run();

    void dealer_setup();          // secret, shares, bases, input
    void prepare_shared_state();  // register + preparation circuit, prep metrics
    void alice_run();             // n Bell measurements, BellOutcomes message
    void controller_act(int s, bool forced_by_solicit = false);
    RunResult bob_recover_and_finish();

    const StateVector& state() const { return *state_; }
    const std::vector<Complex>& input() const { return input_; }
    const ShareSet& shares() const { return shares_; }
    const std::vector<BasisSpec>& bases() const { return bases_; }
    const Metrics& metrics() const { return metrics_; }
    const std::vector<std::pair<int, int>>& bell_outcomes() const { return bell_; }
    const ThresholdConfig* threshold_config() const {
        return tcfg_ ? &*tcfg_ : nullptr;
    }

    // site indices (1-based l and s)
    int site_ap(int l) const { return l - 1; }
    int site_a(int l) const { return cfg_.n + l - 1; }
    int site_b(int l) const { return 2 * cfg_.n + l - 1; }
    int site_c(int s) const { return 3 * cfg_.n + s - 1; }

private:
    void prepare_econ_controller(int s, int channel);
    void apply_alice_pauli(int l);
    RunResult abort(const std::string& reason);
    RunResult finalize();
    Message& post(Message msg);

    RunConfig cfg_;
    RngStream rng_;
    std::optional<ThresholdConfig> tcfg_;
    SecretVector secret_;
    ShareSet shares_;
    std::vector<BasisSpec> bases_;
    std::vector<Complex> input_;
    std::optional<StateVector> state_;
    std::vector<int> channel_of_;  // per controller, 1-based channels

    Metrics metrics_;
    std::vector<Message> transcript_;
    std::vector<MeasurementRecord> records_;
    int seq_ = 0;

    std::vector<std::pair<int, int>> bell_;
    std::set<int> acting_;                       // controllers reporting unprompted
    std::set<int> measured_;                     // controllers that have measured/reported
    std::map<int, std::int64_t> reported_keys_;  // as Bob received them
    std::map<int, std::int64_t> reported_outcomes_;
    int solicit_count_ = 0;
    bool setup_done_ = false;
    bool prepared_ = false;
    bool alice_done_ = false;
};

RunResult run_protocol(const RunConfig& cfg);

// Exact expectation of Bob's per-controller recovery operations for EconBob:
// sum over agreeing controllers of sin^2(pi c_s / p), plus one operation per
// disagreeing controller. Throws WrongScheme for other schemes.
double expected_controller_recovery_ops(const RunConfig& cfg, const ShareSet& shares);

// The m - t/2 estimate, valid when every agreeing controller's "-" outcome
// has probability 1/2.
inline double paper_recovery_estimate(int m, int t) { return m - t / 2.0; }

}  // namespace ctqt
