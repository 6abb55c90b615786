#pragma once

// Command-line surface: compile, synthesize, simulate, report.
//
// Exit codes: 0 success, 1 usage, 2 parse/validation failure,
// 3 unrealizable specification, 4 bounded-verification violation,
// 5 controller dead end during simulation.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "awaresynth/report.hpp"
#include "awaresynth/sim.hpp"
#include "awaresynth/synth.hpp"
#include "awaresynth/verify.hpp"

namespace aware::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitUnrealizable = 3;
inline constexpr int kExitVerification = 4;
inline constexpr int kExitDeadEnd = 5;

struct RunConfig {
    std::string ontology;
    std::vector<std::string> strategies = {"base", "ptree", "aware"};
    std::vector<int> profiles = {1, 2, 3};
    std::size_t runs = 10000;
    std::uint64_t seed = 42;
    std::vector<std::string> tree_order;
    std::string out_dir = "out";
    std::string in_dir = "out";
    std::size_t state_cap = default_state_cap();
    std::size_t verify_depth = 15;
    bool fts_dump = false;
    bool no_env_assumptions = false;
    std::string scenario_object;
    double p1_start = 0.5;
    double p1_sign_start = -1.0;  // <0: same as p1_start
    int gap_max = 2;
    int lead_gap_max = 3;
};

inline void diag(const std::string& kind, const std::string& message) {
    std::cerr << "awaresynth: error[" << kind << "]: " << message << "\n";
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline OntologyModel load_model_or_throw(const std::string& path) {
    return load_ontology(read_file(path));
}

inline SynthesisOptions synth_options(const RunConfig& cfg) {
    SynthesisOptions opts;
    opts.tree_order = cfg.tree_order;
    opts.scenario_object = cfg.scenario_object;
    opts.with_env_assumptions = !cfg.no_env_assumptions;
    opts.state_cap = cfg.state_cap;
    return opts;
}

inline TraceProfile profile_config(const RunConfig& cfg, int id,
                                   const std::vector<std::string>& features) {
    TraceProfile p;
    p.kind = id == 1 ? ProfileKind::P1_LinearPdf
             : id == 2 ? ProfileKind::P2_ConsecutiveRandom
                       : ProfileKind::P3_LooseRandom;
    p.features = features;
    p.p1_start = cfg.p1_start;
    if (cfg.p1_sign_start >= 0.0) {
        p.p1_start_per_feature.assign(features.size(), cfg.p1_start);
        if (!features.empty()) p.p1_start_per_feature[0] = cfg.p1_sign_start;
    }
    p.gap_max = cfg.gap_max;
    p.lead_gap_max = cfg.lead_gap_max;
    return p;
}

// ---------------------------------------------------------------------------

inline int cmd_compile(const RunConfig& cfg) {
    try {
        OntologyModel model = load_model_or_throw(cfg.ontology);
        for (const auto& s : cfg.strategies) {
            CompiledSpec spec =
                compile(model, parse_strategy(s), cfg.tree_order, !cfg.no_env_assumptions);
            write_file_atomic(std::filesystem::path(cfg.out_dir) / ("spec_" + s + ".spec"),
                              dump_compiled(spec));
        }
        return kExitOk;
    } catch (const OntologyError& e) {
        diag("ontology", e.what());
        return kExitParse;
    } catch (const MissingTreeOrder& e) {
        diag("tree-order", e.what());
        return kExitParse;
    } catch (const std::exception& e) {
        diag("io", e.what());
        return kExitParse;
    }
}

inline int cmd_synthesize(const RunConfig& cfg) {
    try {
        OntologyModel model = load_model_or_throw(cfg.ontology);
        for (const auto& s : cfg.strategies) {
            SynthesisProduct p = synthesize_strategy(model, parse_strategy(s), synth_options(cfg));
            write_file_atomic(std::filesystem::path(cfg.out_dir) / ("spec_" + s + ".spec"),
                              dump_compiled(p.compiled));
            if (cfg.fts_dump)
                write_file_atomic(std::filesystem::path(cfg.out_dir) / "car.fts",
                                  dump_fts(*p.fts));
            if (!p.result.realizable) {
                std::ostringstream msg;
                msg << "strategy " << s << " is unrealizable; losing initial states:";
                for (std::size_t sid : p.result.counter_initial)
                    msg << ' ' << p.game->describe(sid);
                diag("unrealizable", msg.str());
                return kExitUnrealizable;
            }
            VerifyOptions vopts;
            vopts.depth = cfg.verify_depth;
            auto violation = verify_bounded(*p.game, *p.controller, vopts);
            std::ostringstream report;
            report << "strategy " << s << "\nrealizable: yes\nverify depth: " << cfg.verify_depth
                   << "\n";
            if (violation) {
                report << "violation: " << violation->detail << "\n";
                for (const auto& step : violation->trace) report << "  " << step << "\n";
                write_file_atomic(std::filesystem::path(cfg.out_dir) / ("verify_" + s + ".txt"),
                                  report.str());
                diag("verification", violation->detail);
                return kExitVerification;
            }
            report << "violations: none\n";
            write_file_atomic(std::filesystem::path(cfg.out_dir) / ("verify_" + s + ".txt"),
                              report.str());
            write_file_atomic(std::filesystem::path(cfg.out_dir) / ("controller_" + s + ".mealy"),
                              p.controller->dump());
        }
        return kExitOk;
    } catch (const OntologyError& e) {
        diag("ontology", e.what());
        return kExitParse;
    } catch (const MissingTreeOrder& e) {
        diag("tree-order", e.what());
        return kExitParse;
    } catch (const UniverseMismatch& e) {
        diag("universe", e.what());
        return kExitParse;
    } catch (const StateSpaceTooLarge& e) {
        diag("state-cap", e.what());
        return kExitParse;
    } catch (const std::exception& e) {
        diag("io", e.what());
        return kExitParse;
    }
}

inline int cmd_simulate(const RunConfig& cfg) {
    try {
        OntologyModel model = load_model_or_throw(cfg.ontology);

        std::vector<std::pair<std::string, SynthesisProduct>> products;
        for (const auto& s : cfg.strategies) {
            SynthesisProduct p = synthesize_strategy(model, parse_strategy(s), synth_options(cfg));
            if (!p.result.realizable) {
                diag("unrealizable", "strategy " + s + " is unrealizable");
                return kExitUnrealizable;
            }
            products.emplace_back(s, std::move(p));
        }

        std::vector<std::string> features;
        for (const auto& p : required_features(model, products.front().second.scenario_object))
            features.push_back(p.name);

        // Grid cells run concurrently; per-trial substreams keep the
        // aggregate independent of scheduling.
        struct Cell {
            int profile;
            std::string strategy;
            std::future<Histogram> result;
        };
        std::vector<Cell> cells;
        for (int prof : cfg.profiles)
            for (auto& [name, prod] : products) {
                TraceProfile tp = profile_config(cfg, prof, features);
                const MealyController* ctrl = &*prod.controller;
                std::size_t runs = cfg.runs;
                std::uint64_t seed = cfg.seed;
                std::string label = name;
                cells.push_back({prof, name,
                                 std::async(std::launch::async, [=]() {
                                     return run_batch(*ctrl, tp, runs, seed, label);
                                 })});
            }

        std::map<int, std::vector<ResultRow>> rows_by_profile;
        std::vector<ResultRow> all_rows;
        for (auto& cell : cells) {
            Histogram h = cell.result.get();
            ResultRow row = row_of(h);
            rows_by_profile[cell.profile].push_back(row);
            all_rows.push_back(row);
        }

        write_file_atomic(std::filesystem::path(cfg.out_dir) / "results.csv",
                          write_csv(all_rows));
        for (const auto& [prof, rows] : rows_by_profile)
            write_file_atomic(std::filesystem::path(cfg.out_dir) /
                                  ("profile" + std::to_string(prof) + ".svg"),
                              svg_chart(std::to_string(prof), rows));

        // One sampled trial per cell as a location/mode step plot.
        for (int prof : cfg.profiles) {
            std::ostringstream plot;
            for (auto& [name, prod] : products) {
                TraceProfile tp = profile_config(cfg, prof, features);
                Rng rng = Rng::substream(cfg.seed, 0);
                EnvTrace trace = gen_trace(tp, rng);
                TraceBinding binding = TraceBinding::make(*prod.controller, features);
                std::vector<TrialStep> steps;
                TrialOutcome out = run_trial(*prod.controller, trace, binding, &steps);
                plot << name << " (trial 0): "
                     << (out.stop_in ? "stop_in_" + std::to_string(*out.stop_in) : "infeasible")
                     << "\n";
                const auto& env_names = prod.controller->env_names();
                for (std::size_t i = 0; i < steps.size(); ++i) {
                    plot << "  step " << i + 1 << ": " << steps[i].state_before << " input {";
                    bool first = true;
                    for (std::size_t b = 0; b < env_names.size(); ++b)
                        if (steps[i].valuation >> b & 1) {
                            plot << (first ? "" : ",") << env_names[b];
                            first = false;
                        }
                    plot << "} -> " << steps[i].output << "\n";
                }
            }
            write_file_atomic(std::filesystem::path(cfg.out_dir) /
                                  ("sample_p" + std::to_string(prof) + ".txt"),
                              plot.str());
        }
        return kExitOk;
    } catch (const ControllerDeadEnd& e) {
        diag("dead-end", e.what());
        return kExitDeadEnd;
    } catch (const OntologyError& e) {
        diag("ontology", e.what());
        return kExitParse;
    } catch (const std::exception& e) {
        diag("io", e.what());
        return kExitParse;
    }
}

inline int cmd_report(const RunConfig& cfg) {
    try {
        std::string text = read_file(std::filesystem::path(cfg.in_dir) / "results.csv");
        std::vector<ResultRow> rows = parse_csv(text);
        std::cout << report_text(rows);
        return kExitOk;
    } catch (const CsvError& e) {
        diag("csv", e.what());
        return kExitParse;
    } catch (const std::exception& e) {
        diag("io", e.what());
        return kExitParse;
    }
}

// ---------------------------------------------------------------------------

inline int run(std::vector<std::string> args) {
    CLI::App app{"ontology-to-LTL compilation, GR(1) synthesis and evaluation "
                 "for the traffic-sign case study"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_ontology = [&](CLI::App* cmd) {
        cmd->add_option("--ontology", cfg.ontology, "ontology file")
            ->required()
            ->check(CLI::ExistingFile);
    };
    auto add_strategies = [&](CLI::App* cmd, const char* name) {
        cmd->add_option(name, cfg.strategies, "controller strategies")
            ->delimiter(',')
            ->check(CLI::IsMember({"base", "ptree", "aware"}));
    };
    auto add_tree_order = [&](CLI::App* cmd) {
        cmd->add_option("--tree-order", cfg.tree_order,
                        "perception-tree refinement order (feature names)")
            ->delimiter(',');
    };
    auto add_out = [&](CLI::App* cmd) {
        cmd->add_option("--out", cfg.out_dir, "output directory");
    };

    CLI::App* c_compile = app.add_subcommand("compile", "compile an ontology into LTL rule sets");
    add_ontology(c_compile);
    add_strategies(c_compile, "--strategy");
    add_tree_order(c_compile);
    add_out(c_compile);

    CLI::App* c_synth = app.add_subcommand("synthesize", "synthesize and verify controllers");
    add_ontology(c_synth);
    add_strategies(c_synth, "--strategy");
    add_tree_order(c_synth);
    add_out(c_synth);
    c_synth->add_option("--verify-depth", cfg.verify_depth, "bounded verification depth")
        ->check(CLI::Range(std::size_t{1}, std::size_t{64}));
    c_synth->add_option("--state-cap", cfg.state_cap, "game state-space cap");
    c_synth->add_flag("--fts-dump", cfg.fts_dump, "also dump the car FTS");
    c_synth->add_option("--scenario-object", cfg.scenario_object,
                        "object whose features drive the environment liveness");
    c_synth->add_flag("--no-env-assumptions", cfg.no_env_assumptions,
                      "drop the persistence assumptions");

    CLI::App* c_sim = app.add_subcommand("simulate", "run the randomized evaluation grid");
    add_ontology(c_sim);
    add_strategies(c_sim, "--strategies");
    add_tree_order(c_sim);
    add_out(c_sim);
    c_sim->add_option("--profiles", cfg.profiles, "trace profiles to run")
        ->delimiter(',')
        ->check(CLI::Range(1, 3));
    c_sim->add_option("--runs", cfg.runs, "trials per cell")
        ->check(CLI::Range(std::size_t{1}, std::size_t{100'000'000}));
    c_sim->add_option("--seed", cfg.seed, "base random seed");
    c_sim->add_option("--p1-start", cfg.p1_start, "profile-1 visibility at the horizon")
        ->check(CLI::Range(0.0, 1.0));
    c_sim->add_option("--p1-sign-start", cfg.p1_sign_start,
                      "profile-1 horizon visibility for the object-level feature");
    c_sim->add_option("--gap-max", cfg.gap_max, "profile-3 gap between reveals")
        ->check(CLI::Range(0, 8));
    c_sim->add_option("--lead-gap-max", cfg.lead_gap_max, "profile-3 gap before the first reveal")
        ->check(CLI::Range(0, 8));

    CLI::App* c_report = app.add_subcommand("report", "summarize a results directory");
    c_report->add_option("--in", cfg.in_dir, "directory holding results.csv");

    std::vector<const char*> argv;
    argv.push_back("awaresynth");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (c_compile->parsed()) return cmd_compile(cfg);
    if (c_synth->parsed()) return cmd_synthesize(cfg);
    if (c_sim->parsed()) return cmd_simulate(cfg);
    if (c_report->parsed()) return cmd_report(cfg);
    return kExitUsage;
}

} // namespace aware::cli
