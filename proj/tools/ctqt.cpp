#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ctqt/report.hpp"
#include "ctqt/verify.hpp"

namespace {

using ctqt::ExperimentSpec;
using ctqt::ParseError;
using ctqt::ValidationError;

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        if (item.empty()) continue;
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw ParseError("bad integer in list: " + item);
        }
    }
    return out;
}

void apply_agree(ExperimentSpec& spec, const std::string& text) {
    if (text.rfind("random:", 0) == 0) {
        try {
            spec.random_agree_t = std::stoi(text.substr(7));
        } catch (const std::exception&) {
            throw ParseError("bad agree spec: " + text);
        }
        spec.base.agree.clear();
    } else {
        spec.random_agree_t = -1;
        spec.base.agree = parse_int_list(text);
    }
}

void load_config_file(ExperimentSpec& spec, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("config file " + path + ": " + e.what());
    }
    try {
        if (j.contains("scheme"))
            spec.base.scheme = ctqt::scheme_from_string(j["scheme"].get<std::string>());
        if (j.contains("n")) spec.base.n = j["n"].get<int>();
        if (j.contains("m")) spec.base.m = j["m"].get<int>();
        if (j.contains("k")) spec.base.k = j["k"].get<int>();
        if (j.contains("p")) spec.base.p = j["p"].get<std::int64_t>();
        if (j.contains("agree")) {
            if (j["agree"].is_string())
                apply_agree(spec, j["agree"].get<std::string>());
            else
                spec.base.agree = j["agree"].get<std::vector<int>>();
        }
        if (j.contains("channels")) spec.base.channels = j["channels"].get<std::vector<int>>();
        if (j.contains("scenario"))
            spec.base.scenario.kind =
                ctqt::scenario_from_string(j["scenario"].get<std::string>());
        if (j.contains("scenario_members"))
            spec.base.scenario.members = j["scenario_members"].get<std::vector<int>>();
        if (j.contains("liar")) spec.base.scenario.liar = j["liar"].get<int>();
        if (j.contains("trials")) spec.trials = j["trials"].get<int>();
        if (j.contains("seed")) spec.base.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("out")) spec.out = j["out"].get<std::string>();
        if (j.contains("format")) spec.format = j["format"].get<std::string>();
        if (j.contains("full_transcript"))
            spec.full_transcript = j["full_transcript"].get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("config file " + path + ": " + e.what());
    }
}

int run_batch(const ExperimentSpec& spec) {
    ctqt::Report report = ctqt::run_experiments(spec);
    std::string body =
        spec.format == "csv" ? ctqt::report_to_csv(report) : ctqt::report_to_json(report);
    if (spec.out.empty()) {
        std::cout << body;
    } else {
        std::ofstream out(spec.out);
        if (!out) {
            std::cerr << "error: cannot write " << spec.out << "\n";
            return 2;
        }
        out << body;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"(k,m)-threshold controlled teleportation simulator"};
    app.require_subcommand(0, 1);

    std::string config_path, scheme, agree, scenario, channels, members, out, format;
    ExperimentSpec spec;
    spec.base.agree.clear();

    app.add_option("--config", config_path, "JSON config file; flags override it");
    app.add_option("--scheme", scheme, "ghz|qudit-poly|classical|econ-qubit|econ-bob");
    app.add_option("--n", spec.base.n, "teleported qubits");
    app.add_option("--m", spec.base.m, "controllers");
    app.add_option("--k", spec.base.k, "threshold");
    app.add_option("--p", spec.base.p, "prime modulus (0 = smallest prime >= m)");
    app.add_option("--agree", agree, "comma list of controller indices, or random:t");
    app.add_option("--scenario", scenario,
                   "honest|bob-steals-keys|schedule-violation|wrong-outcome|wrong-key");
    app.add_option("--scenario-members", members,
                   "comma list of controllers involved in the scenario");
    app.add_option("--liar", spec.base.scenario.liar, "lying controller index");
    app.add_option("--channels", channels, "comma list: channel per controller (econ-bob)");
    app.add_option("--trials", spec.trials, "trials per batch");
    app.add_option("--seed", spec.base.seed, "master seed");
    app.add_option("--out", out, "output path (default stdout)");
    app.add_option("--format", format, "json|csv");
    app.add_flag("--full-transcript", spec.full_transcript, "include per-run records");

    CLI::App* verify = app.add_subcommand("verify", "run built-in invariant suites");
    std::string suite = "all";
    verify->add_option("suite", suite, "field|sharing|sim|protocol|all");

    CLI11_PARSE(app, argc, argv);

    try {
        if (verify->parsed()) {
            int failures = ctqt::verify_suite(suite, std::cout);
            return failures == 0 ? 0 : 3;
        }

        if (!config_path.empty()) {
            ExperimentSpec from_file;
            from_file.base.agree.clear();
            load_config_file(from_file, config_path);
            // flags override the file
            if (!app.count("--n")) spec.base.n = from_file.base.n;
            if (!app.count("--m")) spec.base.m = from_file.base.m;
            if (!app.count("--k")) spec.base.k = from_file.base.k;
            if (!app.count("--p")) spec.base.p = from_file.base.p;
            if (!app.count("--trials")) spec.trials = from_file.trials;
            if (!app.count("--seed")) spec.base.seed = from_file.base.seed;
            if (!app.count("--liar")) spec.base.scenario.liar = from_file.base.scenario.liar;
            if (!app.count("--full-transcript"))
                spec.full_transcript = from_file.full_transcript;
            if (scheme.empty()) spec.base.scheme = from_file.base.scheme;
            if (agree.empty()) {
                spec.base.agree = from_file.base.agree;
                spec.random_agree_t = from_file.random_agree_t;
            }
            if (scenario.empty()) spec.base.scenario.kind = from_file.base.scenario.kind;
            spec.base.scenario.members = from_file.base.scenario.members;
            if (channels.empty()) spec.base.channels = from_file.base.channels;
            if (out.empty()) out = from_file.out;
            if (format.empty()) format = from_file.format;
        }
        if (!scheme.empty()) spec.base.scheme = ctqt::scheme_from_string(scheme);
        if (!agree.empty()) apply_agree(spec, agree);
        if (!scenario.empty())
            spec.base.scenario.kind = ctqt::scenario_from_string(scenario);
        if (!channels.empty()) spec.base.channels = parse_int_list(channels);
        if (!members.empty()) spec.base.scenario.members = parse_int_list(members);
        if (!format.empty()) spec.format = format;
        spec.out = out;

        spec.validate();
        return run_batch(spec);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
}
