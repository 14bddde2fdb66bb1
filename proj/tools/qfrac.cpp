// Batch driver: loads scenario configs, runs identity verifications and
// convergence ladders, writes JSON/CSV reports.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <thread>
#include <vector>

#include "qfrac/report.hpp"
#include "qfrac/scenario.hpp"
#include "qfrac/verify.hpp"

namespace fs = std::filesystem;
using qfrac::verify::Scenario;
using qfrac::verify::VerificationReport;

namespace {

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

struct Job {
    std::string identity;
    const Scenario* scenario;
};

int cmd_list(const std::string& what, const fs::path& dir) {
    if (what == "identities") {
        for (const auto& id : qfrac::verify::identity_ids())
            std::cout << id << "  -  " << qfrac::verify::identity_description(id) << "\n";
        return 0;
    }
    if (what == "scenarios") {
        for (const auto& id : qfrac::scenario::list_scenario_ids(dir)) {
            try {
                std::cout << qfrac::scenario::summary_line(
                                 qfrac::scenario::scenario_path(dir, id))
                          << "\n";
            } catch (const std::exception& e) {
                std::cout << id << "  (unreadable: " << e.what() << ")\n";
            }
        }
        return 0;
    }
    std::cerr << "list: expected 'identities' or 'scenarios'\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical verification driver for the quaternionic proportional "
                 "fractional operator calculus"};
    app.require_subcommand(1);

    const char* env_dir = std::getenv("QFRAC_SCENARIOS");
    std::string scenarios_dir = env_dir != nullptr ? env_dir : "scenarios";

    // list ------------------------------------------------------------------
    auto* list_cmd = app.add_subcommand("list", "list identities or scenarios");
    std::string list_what;
    list_cmd->add_option("what", list_what, "identities | scenarios")->required();
    list_cmd->add_option("--scenarios-dir", scenarios_dir, "scenario catalog directory");

    // run -------------------------------------------------------------------
    auto* run_cmd = app.add_subcommand("run", "run identity verifications");
    std::vector<std::string> identity_args, scenario_args;
    std::string ladder_arg, out_dir = "out";
    int parallel = 1;
    bool strict = false;
    unsigned long long seed = 0;
    run_cmd->add_option("--identity", identity_args,
                        "identity id(s), comma separated or repeated");
    run_cmd->add_option("--scenario", scenario_args,
                        "scenario id(s) or file path(s); default: whole catalog");
    run_cmd->add_option("--ladder", ladder_arg,
                        "refinement ladder, e.g. 8,12,16 (nodes per axis, or mesh "
                        "size for the 1D identities)");
    run_cmd->add_option("--out", out_dir, "output directory");
    run_cmd->add_option("--parallel", parallel, "scenario-level worker pool width")
        ->check(CLI::PositiveNumber);
    run_cmd->add_flag("--strict", strict, "treat skipped scenarios as failures");
    run_cmd->add_option("--seed", seed, "seed for randomized catalog fields");
    run_cmd->add_option("--scenarios-dir", scenarios_dir, "scenario catalog directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (list_cmd->parsed()) return cmd_list(list_what, scenarios_dir);

    // resolve identities
    std::vector<std::string> identities;
    for (const auto& arg : identity_args)
        for (const auto& id : split_csv(arg)) identities.push_back(id);
    if (identities.empty()) identities = qfrac::verify::identity_ids();
    const auto known = qfrac::verify::identity_ids();
    for (const auto& id : identities) {
        if (std::find(known.begin(), known.end(), id) == known.end()) {
            std::cerr << "unknown identity id '" << id << "'\n";
            return 2;
        }
    }
    std::sort(identities.begin(), identities.end());

    // resolve scenario files
    std::vector<fs::path> files;
    if (scenario_args.empty()) {
        for (const auto& id : qfrac::scenario::list_scenario_ids(scenarios_dir))
            files.push_back(qfrac::scenario::scenario_path(scenarios_dir, id));
    } else {
        for (const auto& arg : scenario_args) {
            for (const auto& token : split_csv(arg)) {
                fs::path p = token;
                if (!fs::exists(p)) p = qfrac::scenario::scenario_path(scenarios_dir, token);
                if (!fs::exists(p)) {
                    std::cerr << "scenario '" << token << "' not found\n";
                    return 2;
                }
                files.push_back(p);
            }
        }
    }

    std::vector<int> ladder;
    for (const auto& tok : split_csv(ladder_arg)) ladder.push_back(std::stoi(tok));

    // load scenarios and build the job list
    std::vector<Scenario> scenarios;
    scenarios.reserve(files.size());
    for (const auto& f : files) {
        try {
            scenarios.push_back(qfrac::scenario::load_scenario(f, seed));
        } catch (const std::exception& e) {
            std::cerr << "failed to load " << f << ": " << e.what() << "\n";
            return 2;
        }
    }
    std::vector<Job> jobs;
    for (const auto& s : scenarios) {
        for (const auto& id : identities) {
            const bool declared =
                s.identities.empty() ||
                std::find(s.identities.begin(), s.identities.end(), id) != s.identities.end();
            if (declared) jobs.push_back({id, &s});
        }
    }

    // run jobs on a bounded worker pool; results land in preassigned slots so
    // the output bytes do not depend on the pool width
    std::vector<std::vector<VerificationReport>> results(jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) break;
            const Job& job = jobs[i];
            try {
                if (ladder.empty()) {
                    results[i].push_back(qfrac::verify::run_identity(job.identity, *job.scenario));
                } else {
                    results[i] =
                        qfrac::verify::convergence_study(job.identity, *job.scenario, ladder);
                }
            } catch (const std::exception& e) {
                VerificationReport rep;
                rep.identity_id = job.identity;
                rep.scenario_id = job.scenario->id;
                rep.grid = "-";
                rep.skipped = true;
                rep.skip_reason = std::string("error: ") + e.what();
                rep.passed = false;
                results[i].push_back(rep);
            }
        }
    };
    const int width = std::max(1, parallel);
    if (width == 1 || jobs.size() <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < width; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    // write outputs serially, in job order
    fs::create_directories(out_dir);
    std::string csv = qfrac::report::csv_header();
    std::string human;
    bool any_fail = false, any_skip = false;
    for (const auto& reports : results) {
        for (const auto& rep : reports) {
            qfrac::report::write_file(fs::path(out_dir) /
                                          (qfrac::report::file_stem(rep) + ".json"),
                                      qfrac::report::to_json(rep));
            csv += qfrac::report::csv_row(rep);
            const std::string line = qfrac::report::human_line(rep);
            human += line + "\n";
            std::cout << line << "\n";
            if (rep.skipped)
                any_skip = true;
            else if (!rep.passed)
                any_fail = true;
        }
    }
    qfrac::report::write_file(fs::path(out_dir) / "summary.csv", csv);
    qfrac::report::write_file(fs::path(out_dir) / "summary.txt", human);

    if (any_fail) return 1;
    if (any_skip && strict) return 1;
    return 0;
}
