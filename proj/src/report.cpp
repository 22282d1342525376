#include "ctqt/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "json.hpp"

namespace ctqt {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<int> draw_agree_subset(int m, int t, RngStream& rng) {
    std::vector<int> pool(m);
    std::iota(pool.begin(), pool.end(), 1);
    // partial Fisher-Yates, then sort for a canonical report
    for (int i = 0; i < t; ++i) {
        int j = i + static_cast<int>(rng.uniform_int(m - i));
        std::swap(pool[i], pool[j]);
    }
    std::vector<int> out(pool.begin(), pool.begin() + t);
    std::sort(out.begin(), out.end());
    return out;
}

std::string timestamp_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

ordered_json config_json(const ExperimentSpec& spec) {
    const RunConfig& c = spec.base;
    ordered_json j;
    j["scheme"] = to_string(c.scheme);
    j["n"] = c.n;
    j["m"] = c.m;
    j["k"] = c.k;
    j["p"] = c.effective_p();
    if (spec.random_agree_t >= 0)
        j["agree"] = "random:" + std::to_string(spec.random_agree_t);
    else
        j["agree"] = c.agree;
    j["channels"] = c.effective_channels();
    j["scenario"] = ordered_json{{"kind", to_string(c.scenario.kind)},
                                 {"members", c.scenario.members},
                                 {"liar", c.scenario.liar}};
    j["trials"] = spec.trials;
    j["full_transcript"] = spec.full_transcript;
    return j;
}

ordered_json metrics_json(const Metrics& m) {
    return ordered_json{{"prep_single_qubit_ops", m.prep_single_qubit_ops},
                        {"prep_two_qubit_ops", m.prep_two_qubit_ops},
                        {"bell_measurements", m.bell_measurements},
                        {"controller_measurements", m.controller_measurements},
                        {"bob_alice_recovery_ops", m.bob_alice_recovery_ops},
                        {"bob_controller_recovery_ops", m.bob_controller_recovery_ops},
                        {"solicits_sent", m.solicits_sent}};
}

ordered_json aggregates_json(const Aggregates& a) {
    ordered_json j;
    j["mean_fidelity"] = a.mean_fidelity;
    j["success_rate"] = a.success_rate;
    j["prep_single_ops"] = a.prep_single_ops;
    j["prep_two_ops"] = a.prep_two_ops;
    j["bob_alice_ops"] = a.bob_alice_ops;
    j["bob_controller_ops_mean"] = a.bob_controller_ops_mean;
    j["bob_controller_ops_var"] = a.bob_controller_ops_var;
    j["solicits_mean"] = a.solicits_mean;
    j["aborts"] = a.aborts;
    j["abort_reasons"] = a.abort_reasons;
    j["expected_controller_ops_mean"] = a.expected_controller_ops_mean;
    j["naive_controller_ops_estimate"] = a.naive_controller_ops_estimate;
    return j;
}

}  // namespace

void ExperimentSpec::validate() const {
    if (trials < 1) throw ValidationError("trials must be >= 1");
    if (format != "json" && format != "csv")
        throw ValidationError("format must be json or csv");
    if (random_agree_t >= 0) {
        if (random_agree_t > base.m)
            throw ValidationError("random agree size exceeds m");
        RunConfig probe = base;
        probe.agree.resize(static_cast<std::size_t>(random_agree_t));
        std::iota(probe.agree.begin(), probe.agree.end(), 1);
        probe.validate();
    } else {
        base.validate();
    }
}

Aggregates aggregate_trials(const ExperimentSpec& spec, const std::vector<TrialRecord>& runs) {
    Aggregates a;
    if (runs.empty()) return a;
    double n = static_cast<double>(runs.size());
    double ctrl_sq = 0.0;
    for (const TrialRecord& tr : runs) {
        const RunResult& r = tr.result;
        a.mean_fidelity += r.fidelity;
        a.success_rate += r.success ? 1.0 : 0.0;
        a.prep_single_ops += static_cast<double>(r.metrics.prep_single_qubit_ops);
        a.prep_two_ops += static_cast<double>(r.metrics.prep_two_qubit_ops);
        a.bob_alice_ops += static_cast<double>(r.metrics.bob_alice_recovery_ops);
        double c = static_cast<double>(r.metrics.bob_controller_recovery_ops);
        a.bob_controller_ops_mean += c;
        ctrl_sq += c * c;
        a.solicits_mean += static_cast<double>(r.metrics.solicits_sent);
        if (r.abort_reason) {
            ++a.aborts;
            ++a.abort_reasons[*r.abort_reason];
        }
    }
    a.mean_fidelity /= n;
    a.success_rate /= n;
    a.prep_single_ops /= n;
    a.prep_two_ops /= n;
    a.bob_alice_ops /= n;
    a.bob_controller_ops_mean /= n;
    a.bob_controller_ops_var =
        std::max(0.0, ctrl_sq / n - a.bob_controller_ops_mean * a.bob_controller_ops_mean);
    a.solicits_mean /= n;
    return a;
}

Report run_experiments(const ExperimentSpec& spec) {
    spec.validate();
    Report report;
    report.spec = spec;
    report.seed = spec.base.seed;

    std::vector<TrialRecord> trials;
    trials.reserve(static_cast<std::size_t>(spec.trials));
    double expected_sum = 0.0;
    bool econ_bob = spec.base.scheme == SchemeKind::EconBob;

    for (int t = 0; t < spec.trials; ++t) {
        RunConfig cfg = spec.base;
        cfg.seed = RngStream::derive(spec.base.seed, 2 * static_cast<std::uint64_t>(t));
        if (spec.random_agree_t >= 0) {
            RngStream pick(RngStream::derive(spec.base.seed,
                                             2 * static_cast<std::uint64_t>(t) + 1));
            cfg.agree = draw_agree_subset(cfg.m, spec.random_agree_t, pick);
        }
        TrialRecord rec;
        rec.seed = cfg.seed;
        rec.agree = cfg.agree;
        ProtocolRun run(cfg);
        run.dealer_setup();
        if (econ_bob)
            expected_sum += expected_controller_recovery_ops(cfg, run.shares());
        rec.result = run.run();
        trials.push_back(std::move(rec));
    }

    report.aggregates = aggregate_trials(spec, trials);
    if (econ_bob) {
        report.aggregates.expected_controller_ops_mean =
            expected_sum / static_cast<double>(spec.trials);
        int t = spec.random_agree_t >= 0 ? spec.random_agree_t
                                         : static_cast<int>(spec.base.agree.size());
        report.aggregates.naive_controller_ops_estimate =
            paper_recovery_estimate(spec.base.m, t);
    }
    if (spec.full_transcript) report.runs = std::move(trials);
    return report;
}

std::string report_to_json(const Report& report, bool with_timestamp) {
    ordered_json j;
    j["version"] = kArtifactVersion;
    if (with_timestamp) j["timestamp"] = timestamp_now();
    j["config"] = config_json(report.spec);
    j["seed"] = report.seed;
    j["aggregates"] = aggregates_json(report.aggregates);
    if (report.spec.full_transcript) {
        ordered_json runs = ordered_json::array();
        for (const TrialRecord& tr : report.runs) {
            ordered_json r;
            r["seed"] = tr.seed;
            r["agree"] = tr.agree;
            r["fidelity"] = tr.result.fidelity;
            r["success"] = tr.result.success;
            if (tr.result.abort_reason) r["abort_reason"] = *tr.result.abort_reason;
            r["flags"] = tr.result.flags;
            r["metrics"] = metrics_json(tr.result.metrics);
            ordered_json lines = ordered_json::array();
            std::istringstream is(transcript_to_string(tr.result.transcript));
            for (std::string line; std::getline(is, line);) lines.push_back(line);
            r["transcript"] = std::move(lines);
            runs.push_back(std::move(r));
        }
        j["runs"] = std::move(runs);
    }
    return j.dump(2) + "\n";
}

std::string report_to_csv(const Report& report) {
    const Aggregates& a = report.aggregates;
    std::ostringstream os;
    os << std::setprecision(17);
    os << "scheme,n,m,k,p,trials,seed,mean_fidelity,success_rate,prep_single_ops,"
          "prep_two_ops,bob_alice_ops,bob_controller_ops_mean,bob_controller_ops_var,"
          "solicits_mean,aborts,expected_controller_ops_mean,"
          "naive_controller_ops_estimate\n";
    const RunConfig& c = report.spec.base;
    os << to_string(c.scheme) << ',' << c.n << ',' << c.m << ',' << c.k << ','
       << c.effective_p() << ',' << report.spec.trials << ',' << report.seed << ','
       << a.mean_fidelity << ',' << a.success_rate << ',' << a.prep_single_ops << ','
       << a.prep_two_ops << ',' << a.bob_alice_ops << ',' << a.bob_controller_ops_mean
       << ',' << a.bob_controller_ops_var << ',' << a.solicits_mean << ',' << a.aborts
       << ',' << a.expected_controller_ops_mean << ','
       << a.naive_controller_ops_estimate << '\n';
    return os.str();
}

}  // namespace ctqt
