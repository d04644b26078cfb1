// evorank: bi-objective evolutionary optimization of re-ranker instructions.
//
// Subcommands: synth, evaluate, optimize, resume, report. See README.md for
// the dataset schema and the backend wire contracts. Endpoints and API keys
// can come from EVORANK_BACKEND_ENDPOINT, EVORANK_OPERATOR_ENDPOINT,
// EVORANK_BACKEND_API_KEY and EVORANK_OPERATOR_API_KEY; key values are never
// echoed.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evorank/backend_factory.hpp"
#include "evorank/evorank.hpp"
#include "evorank/http_operator_llm.hpp"

namespace {

std::string env_or(const char* name, const std::string& fallback) {
    const char* value = std::getenv(name);
    return value ? std::string(value) : fallback;
}

struct BackendOptions {
    std::string kind = "scripted";
    std::string endpoint;
    double lambda = 0.2;
    int timeout_ms = 30000;
    int max_retries = 3;

    void attach(CLI::App* cmd) {
        cmd->add_option("--backend", kind, "Re-ranker backend: scripted, http or tempralm")
            ->check(CLI::IsMember({"scripted", "http", "tempralm"}));
        cmd->add_option("--endpoint", endpoint,
                        "Score endpoint URL (or EVORANK_BACKEND_ENDPOINT)");
        cmd->add_option("--lambda", lambda, "Temporal weight for the tempralm wrapper");
        cmd->add_option("--timeout-ms", timeout_ms, "HTTP timeout per request");
        cmd->add_option("--max-retries", max_retries, "HTTP retry budget");
    }

    std::shared_ptr<const evorank::Backend> build() const {
        evorank::BackendConfig config;
        config.endpoint = endpoint.empty() ? env_or("EVORANK_BACKEND_ENDPOINT", "") : endpoint;
        config.timeout_ms = timeout_ms;
        config.max_retries = max_retries;
        config.lambda = lambda;
        if (kind == "scripted") {
            config.kind = evorank::BackendKind::scripted;
        } else if (kind == "http") {
            config.kind = evorank::BackendKind::http;
        } else {
            config.kind = evorank::BackendKind::tempralm;
            auto inner = std::make_shared<evorank::BackendConfig>();
            if (!config.endpoint.empty()) {
                inner->kind = evorank::BackendKind::http;
                inner->endpoint = config.endpoint;
                inner->timeout_ms = timeout_ms;
                inner->max_retries = max_retries;
            }
            config.inner = inner;
        }
        return evorank::make_backend(config);
    }
};

struct OperatorOptions {
    std::string kind = "mock";
    std::string endpoint;
    std::string model = "llama-3.3-70b-instruct";
    double temperature = 0.7;
    std::uint64_t seed = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--operator", kind, "Operator LLM: mock or http")
            ->check(CLI::IsMember({"mock", "http"}));
        cmd->add_option("--operator-endpoint", endpoint,
                        "Chat-completions URL (or EVORANK_OPERATOR_ENDPOINT)");
        cmd->add_option("--operator-model", model, "Model name for the http operator");
        cmd->add_option("--operator-temperature", temperature, "Sampling temperature");
    }

    std::unique_ptr<evorank::OperatorLlm> build(std::uint64_t run_seed) const {
        if (kind == "mock") {
            return std::make_unique<evorank::MockOperatorLlm>(run_seed);
        }
        evorank::HttpChatConfig config;
        config.http.endpoint =
            endpoint.empty() ? env_or("EVORANK_OPERATOR_ENDPOINT", "") : endpoint;
        if (config.http.endpoint.empty()) {
            throw evorank::validation_error(evorank::validation_code::invalid_config,
                                            "http operator requires --operator-endpoint or "
                                            "EVORANK_OPERATOR_ENDPOINT");
        }
        config.http.api_key = env_or("EVORANK_OPERATOR_API_KEY", "");
        config.model = model;
        config.temperature = temperature;
        config.seed = run_seed;
        return std::make_unique<evorank::HttpChatOperatorLlm>(config);
    }
};

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw evorank::io_error("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

evorank::Dataset load_split(const std::string& file, const std::string& val_file,
                            double train_fraction, bool strict) {
    if (!val_file.empty()) {
        evorank::Dataset data;
        data.train = evorank::load_instances(file, strict);
        data.validation = evorank::load_instances(val_file, strict);
        return data;
    }
    return evorank::split_dataset(evorank::load_instances(file, strict), train_fraction);
}

void print_front_summary(const evorank::RunState& state) {
    const auto report = evorank::build_report(state);
    std::cout << "rounds completed: " << report.rounds_completed << "\n";
    if (report.baseline) {
        std::cout << "baseline  " << report.baseline->id << "  ek=" << report.baseline->ek
                  << " nek=" << report.baseline->nek << "\n";
    }
    std::cout << "final front (" << report.final_front.size() << " instructions):\n";
    for (const auto& row : report.final_front) {
        std::cout << "  " << row.id << "  ek=" << row.ek << " nek=" << row.nek << "  "
                  << row.text.substr(0, 96) << (row.text.size() > 96 ? "..." : "") << "\n";
    }
}

int run(int argc, char** argv) {
    CLI::App app{"Bi-objective evolutionary optimization of re-ranker instructions"};
    app.require_subcommand(1);

    // --- synth --------------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "Generate synthetic fixture datasets");
    std::string synth_kind = "ek";
    int synth_queries = 100;
    std::uint64_t synth_seed = 0;
    std::string synth_out;
    bool synth_randomize = false;
    std::string synth_lo = evorank::default_nek_range_lo.to_string();
    std::string synth_hi = evorank::default_nek_range_hi.to_string();
    synth->add_option("--kind", synth_kind, "Fixture family: ek or nek")
        ->check(CLI::IsMember({"ek", "nek"}));
    synth->add_option("--queries", synth_queries, "Number of instances")->required();
    synth->add_option("--seed", synth_seed, "Generator seed");
    synth->add_option("--out", synth_out, "Output JSONL path")->required();
    synth->add_flag("--randomize-timestamps", synth_randomize,
                    "Overwrite all timestamps with seeded uniform draws");
    synth->add_option("--range-lo", synth_lo, "Random-timestamp range start (inclusive)");
    synth->add_option("--range-hi", synth_hi, "Random-timestamp range end (exclusive)");
    synth->callback([&] {
        auto instances = synth_kind == "ek"
                             ? evorank::generate_synthetic_ek(synth_queries, synth_seed)
                             : evorank::generate_synthetic_nek(synth_queries, synth_seed);
        if (synth_randomize || synth_kind == "nek") {
            instances = evorank::synthesize_nek_timestamps(
                std::move(instances), synth_seed + 1, evorank::Timestamp::parse(synth_lo),
                evorank::Timestamp::parse(synth_hi));
        }
        evorank::save_instances(instances, synth_out);
        std::cout << "wrote " << instances.size() << " instances to " << synth_out << "\n";
    });

    // --- evaluate ------------------------------------------------------------
    auto* evaluate = app.add_subcommand("evaluate", "Score one instruction on a dataset");
    std::string eval_data;
    std::string eval_instruction;
    std::string eval_instruction_file;
    std::vector<int> eval_cutoffs = {5, 10};
    bool eval_strict = false;
    bool eval_obsolete = false;
    std::string eval_out;
    BackendOptions eval_backend;
    evaluate->add_option("--data", eval_data, "JSONL dataset")->required();
    evaluate->add_option("--instruction", eval_instruction, "Instruction text");
    evaluate->add_option("--instruction-file", eval_instruction_file,
                         "File holding the instruction text");
    evaluate->add_option("--cutoffs", eval_cutoffs, "Metric cutoffs (default 5 10)");
    evaluate->add_flag("--strict", eval_strict, "Require negative_type on all negatives");
    evaluate->add_flag("--obsolete-ratio", eval_obsolete, "Also compute the obsolete ratio");
    evaluate->add_option("--out", eval_out, "Write the metric report JSON here");
    eval_backend.attach(evaluate);
    evaluate->callback([&] {
        std::string text = eval_instruction;
        if (!eval_instruction_file.empty()) text = read_text_file(eval_instruction_file);
        if (text.empty()) text = std::string(evorank::default_initial_instruction);

        evorank::Instruction instruction;
        instruction.id = "cli";
        instruction.text = text;

        const auto instances = evorank::load_instances(eval_data, eval_strict);
        const auto backend = eval_backend.build();
        evorank::MetricConfig config;
        config.cutoffs = eval_cutoffs;
        config.with_obsolete_ratio = eval_obsolete;
        config.strict_negative_types = eval_strict;
        const auto report = evorank::evaluate(instruction, instances, *backend, config);

        const nlohmann::json out = report;
        std::cout << out.dump(2) << "\n";
        if (eval_obsolete && !report.values.count("obsolete_ratio")) {
            std::cerr << "note: no negatives ranked above a positive; obsolete ratio "
                         "undefined\n";
        }
        if (!eval_out.empty()) {
            std::ofstream f(eval_out, std::ios::trunc);
            if (!f) throw evorank::io_error("cannot write " + eval_out);
            f << out.dump(2) << "\n";
        }
    });

    // --- optimize -------------------------------------------------------------
    auto* optimize = app.add_subcommand("optimize", "Run the full evolutionary optimization");
    std::string opt_ek;
    std::string opt_nek;
    std::string opt_ek_val;
    std::string opt_nek_val;
    double opt_train_fraction = 0.2;
    bool opt_strict = false;
    std::string opt_checkpoint;
    std::string opt_templates_dir;
    std::string opt_instruction;
    evorank::OptimizerConfig opt_config;
    BackendOptions opt_backend;
    OperatorOptions opt_operator;
    optimize->add_option("--ek", opt_ek, "EK dataset (train, or full when no --ek-val)")
        ->required();
    optimize->add_option("--nek", opt_nek, "NEK dataset (train, or full when no --nek-val)")
        ->required();
    optimize->add_option("--ek-val", opt_ek_val, "Explicit EK validation split");
    optimize->add_option("--nek-val", opt_nek_val, "Explicit NEK validation split");
    optimize->add_option("--train-fraction", opt_train_fraction,
                         "Train fraction when splitting a single file");
    optimize->add_option("--rounds", opt_config.rounds, "Evolution rounds (default 10)");
    optimize->add_option("--pareto-size", opt_config.pareto_budget,
                         "Maximum Pareto front size (default 4)");
    optimize->add_option("--expansion-factor", opt_config.expansion_factor,
                         "Offspring budget per parent (default 8)");
    optimize->add_option("--seed", opt_config.seed, "Run seed");
    optimize->add_option("--utility", opt_config.utility,
                         "Objective metric: map, mrr@k, ndcg@k, hit_rate@k");
    optimize->add_option("--train-batch", opt_config.train_batch_ek,
                         "Training minibatch size per objective")
        ->check(CLI::PositiveNumber);
    optimize->add_option("--val-batch", opt_config.val_batch_ek,
                         "Validation minibatch size per objective (0 = full split)");
    optimize->add_option("--initial-instruction", opt_instruction, "Seed instruction text");
    optimize->add_option("--checkpoint", opt_checkpoint, "Checkpoint file, written every round");
    optimize->add_option("--templates", opt_templates_dir, "Operator prompt template directory");
    optimize->add_flag("--strict", opt_strict, "Strict dataset loading");
    opt_backend.attach(optimize);
    opt_operator.attach(optimize);
    optimize->callback([&] {
        opt_config.train_batch_nek = opt_config.train_batch_ek;
        opt_config.val_batch_nek = opt_config.val_batch_ek;
        if (!opt_instruction.empty()) opt_config.initial_instruction = opt_instruction;

        const auto ek = load_split(opt_ek, opt_ek_val, opt_train_fraction, opt_strict);
        const auto nek = load_split(opt_nek, opt_nek_val, opt_train_fraction, opt_strict);
        const auto backend = opt_backend.build();
        const auto op_llm = opt_operator.build(opt_config.seed);
        const auto templates = opt_templates_dir.empty()
                                   ? evorank::Templates{}
                                   : evorank::load_templates(opt_templates_dir);

        auto state = evorank::run_from_state(
            evorank::init_state(opt_config), ek, nek, *backend, *op_llm, templates,
            [&](const evorank::RunState& s) {
                if (!opt_checkpoint.empty()) evorank::checkpoint_save(s, opt_checkpoint);
                std::cerr << "round " << s.round << "/" << s.config.rounds << " complete, front "
                          << s.population.size() << "\n";
            });
        if (!opt_checkpoint.empty()) evorank::checkpoint_save(state, opt_checkpoint);
        print_front_summary(state);
    });

    // --- resume ----------------------------------------------------------------
    auto* resume = app.add_subcommand("resume", "Continue an interrupted optimization");
    std::string res_checkpoint;
    std::string res_ek;
    std::string res_nek;
    std::string res_ek_val;
    std::string res_nek_val;
    double res_train_fraction = 0.2;
    bool res_strict = false;
    std::string res_templates_dir;
    BackendOptions res_backend;
    OperatorOptions res_operator;
    resume->add_option("--checkpoint", res_checkpoint, "Checkpoint to resume from")->required();
    resume->add_option("--ek", res_ek, "EK dataset, identical to the original run")->required();
    resume->add_option("--nek", res_nek, "NEK dataset, identical to the original run")
        ->required();
    resume->add_option("--ek-val", res_ek_val, "Explicit EK validation split");
    resume->add_option("--nek-val", res_nek_val, "Explicit NEK validation split");
    resume->add_option("--train-fraction", res_train_fraction, "Split fraction");
    resume->add_option("--templates", res_templates_dir, "Operator prompt template directory");
    resume->add_flag("--strict", res_strict, "Strict dataset loading");
    res_backend.attach(resume);
    res_operator.attach(resume);
    resume->callback([&] {
        auto state = evorank::checkpoint_load(res_checkpoint);
        const auto ek = load_split(res_ek, res_ek_val, res_train_fraction, res_strict);
        const auto nek = load_split(res_nek, res_nek_val, res_train_fraction, res_strict);
        const auto backend = res_backend.build();
        const auto op_llm = res_operator.build(state.config.seed);
        const auto templates = res_templates_dir.empty()
                                   ? evorank::Templates{}
                                   : evorank::load_templates(res_templates_dir);

        state = evorank::run_from_state(std::move(state), ek, nek, *backend, *op_llm, templates,
                                        [&](const evorank::RunState& s) {
                                            evorank::checkpoint_save(s, res_checkpoint);
                                        });
        evorank::checkpoint_save(state, res_checkpoint);
        print_front_summary(state);
    });

    // --- report -----------------------------------------------------------------
    auto* report = app.add_subcommand("report", "Render a report from a run state");
    std::string rep_state;
    std::string rep_format = "markdown";
    std::string rep_out;
    report->add_option("--state", rep_state, "Checkpoint / final state file")->required();
    report->add_option("--format", rep_format, "json, csv or markdown")
        ->check(CLI::IsMember({"json", "csv", "markdown", "md"}));
    report->add_option("--out", rep_out, "Output file")->required();
    report->callback([&] {
        const auto state = evorank::checkpoint_load(rep_state);
        evorank::write_report(state, evorank::report_format_from_string(rep_format), rep_out);
        std::cout << "wrote " << rep_out << "\n";
    });

    CLI11_PARSE(app, argc, argv);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const evorank::validation_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const evorank::parse_error& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const evorank::backend_error& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return 3;
    } catch (const evorank::operator_error& e) {
        std::cerr << "operator error: " << e.what() << "\n";
        return 3;
    } catch (const evorank::corrupt_checkpoint_error& e) {
        std::cerr << "checkpoint error: " << e.what() << "\n";
        return 4;
    } catch (const evorank::io_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
