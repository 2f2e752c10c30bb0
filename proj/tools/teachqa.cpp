// teachqa: command-line front end for generating, training, evaluating and
// serving a question-answering agent from a workspace directory.

#include <unistd.h>

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "teachqa/service.hpp"
#include "teachqa/teachqa.hpp"

namespace fs = std::filesystem;
using namespace teachqa;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

bool machine_output() { return ::isatty(STDOUT_FILENO) == 0; }

std::string env_or(const char* name, std::string fallback) {
    const char* v = std::getenv(name);
    return v && *v ? std::string(v) : std::move(fallback);
}

template <typename T>
T env_number(const char* name, T fallback) {
    const char* v = std::getenv(name);
    if (!v || !*v) return fallback;
    T out{};
    std::istringstream in(v);
    return (in >> out) ? out : fallback;
}

void print_violations(const ValidationReport& report) {
    for (const auto& v : report.violations)
        std::cerr << v.code << "  " << v.locator << "  " << v.message << '\n';
}

void print_generation(const GenerationReport& r) {
    if (machine_output()) {
        std::cout << to_json(r).dump(2) << '\n';
        return;
    }
    std::cout << "raw examples     " << r.raw_count << '\n'
              << "unique examples  " << r.unique_count << '\n'
              << "conflicts        " << r.conflicts.size() << "\n\n";
    for (const auto& [label, n] : r.per_intent_counts)
        std::cout << "  " << std::left << std::setw(28) << label << n << '\n';
    for (const auto& c : r.conflicts) {
        std::cout << "conflict: \"" << c.question << "\" ->";
        for (const auto& i : c.intents) std::cout << ' ' << i;
        std::cout << '\n';
    }
}

void print_eval(const EvalReport& r) {
    if (machine_output())
        std::cout << to_json(r).dump(2) << '\n';
    else
        std::cout << to_table(r);
}

void print_answer(const Answer& a) {
    if (machine_output()) {
        std::cout << to_json(a).dump(2) << '\n';
        return;
    }
    std::cout << "intent      " << a.intent << '\n'
              << "confidence  " << std::fixed << std::setprecision(4) << a.confidence << '\n'
              << "status      " << to_string(a.status) << '\n';
    if (a.response_text) std::cout << "answer      " << *a.response_text << '\n';
    if (a.response_source) std::cout << "source      " << *a.response_source << '\n';
    if (a.abstain_reason) std::cout << "reason      " << to_string(*a.abstain_reason) << '\n';
}

std::vector<CorpusEntry> read_corpus(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("IO_ERROR", "cannot read " + path.string());
    std::vector<CorpusEntry> corpus;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (line[first] != '{') {
            corpus.push_back({line, std::nullopt});
            continue;
        }
        try {
            const auto j = nlohmann::json::parse(line);
            CorpusEntry e{j.at("question").get<std::string>(), std::nullopt};
            for (const char* key : {"intent", "label"})
                if (j.contains(key) && j.at(key).is_string()) e.label = j.at(key).get<std::string>();
            corpus.push_back(std::move(e));
        } catch (const nlohmann::json::exception& ex) {
            throw Error("MALFORMED_LINE", "corpus line " + std::to_string(line_no) + ": " + ex.what());
        }
    }
    return corpus;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"teachqa: machine teaching for question-answering agents"};
    app.require_subcommand(1);

    std::string workspace = env_or("TEACHQA_WORKSPACE", ".");
    app.add_option("-w,--workspace", workspace, "Workspace directory")->capture_default_str();

    auto* init = app.add_subcommand("init", "Create a workspace with the sample course bundle");
    std::string init_dir;
    init->add_option("dir", init_dir, "Directory to create")->required();

    auto* validate = app.add_subcommand("validate", "Validate kb.json and templates.json");

    auto* generate = app.add_subcommand("generate", "Generate the labeled dataset");
    std::string gen_out;
    generate->add_option("--out", gen_out, "Write the dataset here instead of dataset.jsonl");

    auto* trainc = app.add_subcommand("train", "Train the intent model and evaluate on a holdout");
    TrainOptions topts;
    trainc->add_option("--alpha", topts.alpha, "Smoothing constant")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    trainc->add_option("--holdout", topts.holdout, "Holdout fraction in [0, 1)")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 0.999999999));
    trainc->add_option("--seed", topts.seed, "Split seed")->capture_default_str();

    auto* evalc = app.add_subcommand("eval", "Evaluate coverage and precision on a test set");
    std::string test_file;
    double eval_threshold = kDefaultThreshold;
    evalc->add_option("--test", test_file, "JSONL test set (default: holdout.jsonl)");
    evalc->add_option("--threshold", eval_threshold, "Abstention threshold")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));

    auto* ask = app.add_subcommand("ask", "Answer one question with the trained agent");
    std::string question;
    double ask_threshold = kDefaultThreshold;
    ask->add_option("question", question, "Question text")->required();
    ask->add_option("--threshold", ask_threshold, "Abstention threshold")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));

    auto* suggest = app.add_subcommand("suggest", "Mine template skeletons from a question corpus");
    std::string corpus_file;
    std::size_t min_support = 2;
    std::size_t max_slot_tokens = 4;
    suggest->add_option("--corpus", corpus_file, "Questions, one per line or JSONL")->required();
    suggest->add_option("--min-support", min_support)->capture_default_str()->check(CLI::Range(2, 1 << 30));
    suggest->add_option("--max-slot-tokens", max_slot_tokens)
        ->capture_default_str()
        ->check(CLI::Range(1, 1 << 30));

    auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
    int port = env_number("TEACHQA_PORT", 8080);
    ServiceConfig scfg;
    scfg.default_threshold = env_number("TEACHQA_THRESHOLD", kDefaultThreshold);
    scfg.cors_origin = env_or("TEACHQA_CORS_ORIGIN", "*");
    std::string host = "0.0.0.0";
    serve->add_option("--port", port)->capture_default_str()->check(CLI::Range(0, 65535));
    serve->add_option("--threshold", scfg.default_threshold, "Default abstention threshold")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));
    serve->add_option("--cors-origin", scfg.cors_origin)->capture_default_str();
    serve->add_option("--host", host)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*init) {
            Workspace::init(init_dir);
            std::cerr << "initialized workspace in " << init_dir << '\n';
            return kExitOk;
        }

        Workspace ws(workspace);

        if (*validate) {
            const auto report = ws.validate();
            print_violations(report);
            if (machine_output())
                std::cout << nlohmann::ordered_json{{"valid", report.valid()},
                                                    {"violations", to_json(report)}}
                                 .dump(2)
                          << '\n';
            else
                std::cout << (report.valid() ? "valid" : "invalid") << '\n';
            return report.valid() ? kExitOk : kExitFailure;
        }

        if (*generate) {
            std::optional<fs::path> out;
            if (!gen_out.empty()) out = gen_out;
            print_generation(ws.generate(out));
            return kExitOk;
        }

        if (*trainc) {
            const auto result = ws.train(topts);
            const auto report = result.eval ? *result.eval : empty_eval_report(topts.threshold);
            if (machine_output()) {
                std::cout << nlohmann::ordered_json{{"eval", to_json(report)},
                                                    {"corrections_used", result.corrections_used},
                                                    {"corrections_skipped", result.corrections_skipped}}
                                 .dump(2)
                          << '\n';
            } else {
                std::cout << "trained on " << result.snapshot.model->total_examples()
                          << " examples, " << result.snapshot.model->labels.size() << " intents\n\n"
                          << to_table(report);
            }
            return kExitOk;
        }

        if (*evalc) {
            const auto snap = ws.load_snapshot();
            if (!snap) throw Error("NO_MODEL", "no trained model; run train first");
            const fs::path path = test_file.empty() ? ws.holdout_path() : fs::path(test_file);
            const auto testset = from_jsonl(read_file(path));
            print_eval(evaluate(*snap->kb, *snap->model, testset, eval_threshold));
            return kExitOk;
        }

        if (*ask) {
            const auto snap = ws.load_snapshot();
            if (!snap) throw Error("NO_MODEL", "no trained model; run train first");
            if (question.find_first_not_of(" \t\r\n") == std::string::npos) {
                std::cerr << "question is empty\n";
                return kExitUsage;
            }
            print_answer(answer(*snap->kb, *snap->model, question, ask_threshold));
            return kExitOk;
        }

        if (*suggest) {
            const auto corpus = read_corpus(corpus_file);
            const auto suggestions = suggest_templates(corpus, min_support, max_slot_tokens);
            const auto tables = ngram_tables(corpus, 10);
            if (machine_output()) {
                std::cout << to_json(suggestions, tables).dump(2) << '\n';
            } else {
                for (const auto& s : suggestions) {
                    std::cout << std::setw(5) << s.support << "  " << s.skeleton << "   [";
                    for (std::size_t i = 0; i < s.fills_observed.size(); ++i)
                        std::cout << (i ? ", " : "") << s.fills_observed[i];
                    std::cout << "]\n";
                }
            }
            return kExitOk;
        }

        if (*serve) {
            scfg.workspace = workspace;
            Service service(scfg);
            const int bound = service.bind(host, port);
            if (bound < 0) {
                std::cerr << "cannot bind " << host << ":" << port << '\n';
                return kExitFailure;
            }
            std::cerr << "serving " << fs::absolute(workspace).string() << " on " << host << ":"
                      << bound << '\n';
            return service.run() ? kExitOk : kExitFailure;
        }
    } catch (const Workspace::ValidationFailed& e) {
        print_violations(e.report());
        return kExitFailure;
    } catch (const Error& e) {
        std::cerr << e.code() << ": " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}
