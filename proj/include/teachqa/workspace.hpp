#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <json.hpp>

#include "teachqa/classifier.hpp"
#include "teachqa/dataset.hpp"
#include "teachqa/error.hpp"
#include "teachqa/eval.hpp"
#include "teachqa/kb.hpp"
#include "teachqa/responder.hpp"
#include "teachqa/sample_bundle.hpp"
#include "teachqa/templates.hpp"

namespace teachqa {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("IO_ERROR", "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Writes to a sibling temp file, fsyncs, then renames over `path`, so a
/// reader sees either the old or the new content, never a prefix.
inline void atomic_write(const fs::path& path, std::string_view content) {
    static std::atomic<std::uint64_t> counter{0};
    const auto dir = path.parent_path().empty() ? fs::path(".") : path.parent_path();
    const auto tmp = dir / ("." + path.filename().string() + ".tmp." + std::to_string(::getpid()) +
                            "." + std::to_string(counter++));

    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) throw Error("IO_ERROR", "cannot create " + tmp.string() + ": " + std::strerror(errno));
    std::size_t written = 0;
    while (written < content.size()) {
        const auto n = ::write(fd, content.data() + written, content.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            const int err = errno;
            ::close(fd);
            ::unlink(tmp.c_str());
            throw Error("IO_ERROR", "write failed for " + tmp.string() + ": " + std::strerror(err));
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0 || ::close(fd) != 0) {
        ::unlink(tmp.c_str());
        throw Error("IO_ERROR", "cannot flush " + tmp.string());
    }
    if (::rename(tmp.c_str(), path.c_str()) != 0) {
        const int err = errno;
        ::unlink(tmp.c_str());
        throw Error("IO_ERROR", "cannot rename onto " + path.string() + ": " + std::strerror(err));
    }
    const int dfd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
    if (dfd >= 0) {
        ::fsync(dfd);
        ::close(dfd);
    }
}

inline std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    ::gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---------------------------------------------------------------------------
// Corrections
// ---------------------------------------------------------------------------

struct Correction {
    std::string question;
    std::string intent;
    std::string added_at;
};

inline std::vector<Correction> parse_corrections(std::string_view text) {
    std::vector<Correction> out;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            out.push_back({j.at("question").get<std::string>(), j.at("intent").get<std::string>(),
                           j.value("added_at", std::string())});
        } catch (const nlohmann::json::exception& e) {
            throw Error("MALFORMED_LINE",
                        "corrections line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

/// One example per distinct question; a later correction of the same question
/// replaces the earlier intent but keeps its position.
inline Dataset dedup_corrections(const std::vector<Correction>& corrections) {
    Dataset out;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& c : corrections) {
        auto [it, fresh] = index.try_emplace(c.question, out.size());
        if (fresh)
            out.push_back({c.question, c.intent, std::nullopt, 0, std::string("correction")});
        else
            out[it->second].intent = c.intent;
    }
    return out;
}

/// Trains on `base` plus the corrections. A correction the model still gets
/// wrong is repeated (doubling, up to 2^16 copies) until it predicts its own
/// intent, so one teaching round always takes effect.
inline IntentModel train_with_corrections(const Dataset& base, const Dataset& corrections,
                                          double alpha) {
    std::vector<std::size_t> copies(corrections.size(), 1);
    constexpr std::size_t kMaxCopies = std::size_t{1} << 16;
    while (true) {
        Dataset ds = base;
        for (std::size_t i = 0; i < corrections.size(); ++i)
            ds.insert(ds.end(), copies[i], corrections[i]);
        auto model = train(ds, alpha);
        bool grew = false;
        for (std::size_t i = 0; i < corrections.size(); ++i) {
            if (predict(model, corrections[i].question).top == corrections[i].intent) continue;
            if (copies[i] < kMaxCopies) {
                copies[i] *= 2;
                grew = true;
            }
        }
        if (!grew) return model;
    }
}

// ---------------------------------------------------------------------------
// Workspace
// ---------------------------------------------------------------------------

struct TrainOptions {
    double alpha = 1.0;
    double holdout = 0.1;
    std::uint64_t seed = 42;
    double threshold = kDefaultThreshold;
};

/// Immutable (kb, model) pair served together.
struct Snapshot {
    std::uint64_t version = 0;
    std::shared_ptr<const KnowledgeBase> kb;
    std::shared_ptr<const IntentModel> model;
};

struct TrainResult {
    Snapshot snapshot;
    std::optional<EvalReport> eval;  // absent when the holdout is empty
    double threshold = kDefaultThreshold;
    std::size_t corrections_used = 0;
    std::size_t corrections_skipped = 0;
};

/// A directory holding kb.json, templates.json, dataset.jsonl, model.json
/// and corrections.jsonl, plus bookkeeping: generation.json (the kb the
/// dataset was generated from), holdout.jsonl, snapshot.json (the served
/// kb+model pair) and state.json (version counter). Not thread-safe; the
/// service serializes writers.
class Workspace {
public:
    explicit Workspace(fs::path dir) : dir_(std::move(dir)) {
        const auto state = dir_ / "state.json";
        if (fs::exists(state)) {
            const auto j = detail::parse_json_text(read_file(state));
            version_ = j.value("version", std::uint64_t{0});
        }
    }

    /// Creates `dir` and writes the sample bundle. Refuses to overwrite an
    /// existing kb.json or templates.json.
    static Workspace init(const fs::path& dir) {
        fs::create_directories(dir);
        for (const char* name : {"kb.json", "templates.json"})
            if (fs::exists(dir / name))
                throw Error("ALREADY_INITIALIZED", (dir / name).string() + " already exists");
        atomic_write(dir / "kb.json", serialize_kb(sample_kb()).dump(2) + "\n");
        atomic_write(dir / "templates.json", serialize_templates(sample_templates()).dump(2) + "\n");
        Workspace ws(dir);
        ws.bump();
        return ws;
    }

    const fs::path& dir() const { return dir_; }
    fs::path kb_path() const { return dir_ / "kb.json"; }
    fs::path templates_path() const { return dir_ / "templates.json"; }
    fs::path dataset_path() const { return dir_ / "dataset.jsonl"; }
    fs::path model_path() const { return dir_ / "model.json"; }
    fs::path corrections_path() const { return dir_ / "corrections.jsonl"; }
    fs::path holdout_path() const { return dir_ / "holdout.jsonl"; }
    fs::path generation_path() const { return dir_ / "generation.json"; }
    fs::path snapshot_path() const { return dir_ / "snapshot.json"; }

    std::uint64_t version() const { return version_; }

    std::uint64_t bump() {
        ++version_;
        atomic_write(dir_ / "state.json", nlohmann::json{{"version", version_}}.dump() + "\n");
        return version_;
    }

    std::string kb_text() const { return read_file(kb_path()); }
    std::string templates_text() const { return read_file(templates_path()); }
    KnowledgeBase load_kb() const { return parse_kb(kb_text()); }
    std::vector<QuestionTemplate> load_templates() const { return parse_templates(templates_text()); }

    /// Validates kb.json and templates.json together. Document-level errors
    /// (syntax, schema) become single violations.
    ValidationReport validate() const {
        return validate_documents(kb_text(), fs::exists(templates_path())
                                                 ? std::optional<std::string>(templates_text())
                                                 : std::nullopt);
    }

    static ValidationReport validate_documents(std::string_view kb_doc,
                                               const std::optional<std::string>& templates_doc) {
        ValidationReport report;
        KnowledgeBase kb;
        try {
            kb = parse_kb(kb_doc);
        } catch (const Error& e) {
            report.violations.push_back({e.code(), "kb.json", e.what()});
            return report;
        }
        report = validate_kb(kb);
        if (!templates_doc) return report;
        try {
            const auto tpls = parse_templates(*templates_doc);
            for (auto& v : validate_templates(kb, tpls).violations)
                report.violations.push_back(std::move(v));
        } catch (const Error& e) {
            report.violations.push_back({e.code(), "templates.json", e.what()});
        }
        return report;
    }

    /// Replaces kb.json verbatim after validation. Returns the report; the
    /// file is untouched when it is non-empty.
    ValidationReport put_kb(std::string_view document) {
        auto report = validate_documents(document, std::nullopt);
        if (!report.valid()) return report;
        atomic_write(kb_path(), document);
        bump();
        return report;
    }

    /// Replaces templates.json verbatim after validating it against kb.json.
    ValidationReport put_templates(std::string_view document) {
        ValidationReport report;
        try {
            const auto tpls = parse_templates(document);
            report = validate_templates(load_kb(), tpls);
        } catch (const Error& e) {
            report.violations.push_back({e.code(), "templates.json", e.what()});
        }
        if (!report.valid()) return report;
        atomic_write(templates_path(), document);
        bump();
        return report;
    }

    /// Generates the dataset from kb.json + templates.json. Throws
    /// VALIDATION_FAILED (with the report) or a GenerationError.
    GenerationReport generate(const std::optional<fs::path>& out = std::nullopt) {
        const auto kb_doc = kb_text();
        const auto kb = parse_kb(kb_doc);
        const auto report = validate();
        if (!report.valid()) throw ValidationFailed(report);
        auto [ds, gen] = generate_dataset(kb, load_templates());
        atomic_write(out.value_or(dataset_path()), to_jsonl(ds));
        nlohmann::ordered_json meta;
        meta["kb"] = nlohmann::json::parse(kb_doc);
        meta["report"] = to_json(gen);
        atomic_write(generation_path(), meta.dump() + "\n");
        bump();
        return gen;
    }

    bool generated() const { return fs::exists(generation_path()) && fs::exists(dataset_path()); }

    std::vector<Correction> corrections() const {
        if (!fs::exists(corrections_path())) return {};
        return parse_corrections(read_file(corrections_path()));
    }

    /// Appends a correction. Throws UNKNOWN_INTENT when the current kb does
    /// not declare `intent`.
    std::size_t add_correction(const std::string& question, const std::string& intent) {
        if (!is_intent_label(load_kb(), intent))
            throw Error("UNKNOWN_INTENT", "intent '" + intent + "' is not a declared category");
        std::string content =
            fs::exists(corrections_path()) ? read_file(corrections_path()) : std::string();
        if (!content.empty() && content.back() != '\n') content.push_back('\n');
        nlohmann::ordered_json line;
        line["question"] = question;
        line["intent"] = intent;
        line["added_at"] = utc_timestamp();
        content += line.dump() + "\n";
        atomic_write(corrections_path(), content);
        bump();
        return pending_corrections();
    }

    /// Corrections recorded since the last train.
    std::size_t pending_corrections() const {
        const auto all = corrections().size();
        const auto used = trained_corrections();
        return all > used ? all - used : 0;
    }

    /// Splits the generated dataset, trains on the train part plus all
    /// corrections, evaluates on the holdout and writes model.json,
    /// holdout.jsonl and snapshot.json. Throws NOT_GENERATED.
    TrainResult train(const TrainOptions& opts) {
        if (!generated())
            throw Error("NOT_GENERATED", "run generate before train");
        const auto meta = detail::parse_json_text(read_file(generation_path()));
        auto kb = std::make_shared<const KnowledgeBase>(kb_from_json(meta.at("kb")));
        const auto ds = from_jsonl(read_file(dataset_path()));
        auto [train_part, test_part] = split(ds, {opts.holdout, opts.seed});

        TrainResult result;
        result.threshold = opts.threshold;
        const auto all_corrections = corrections();
        std::vector<Correction> usable;
        for (const auto& c : all_corrections) {
            if (is_intent_label(*kb, c.intent))
                usable.push_back(c);
            else
                ++result.corrections_skipped;
        }
        const auto extra = dedup_corrections(usable);
        result.corrections_used = extra.size();

        auto model = std::make_shared<const IntentModel>(
            train_with_corrections(train_part, extra, opts.alpha));
        if (!test_part.empty()) result.eval = evaluate(*kb, *model, test_part, opts.threshold);

        atomic_write(model_path(), save_model(*model).dump() + "\n");
        atomic_write(holdout_path(), to_jsonl(test_part));
        const auto version = bump();
        nlohmann::ordered_json snap;
        snap["version"] = version;
        snap["corrections_trained"] = all_corrections.size();
        snap["kb"] = serialize_kb(*kb);
        snap["model"] = save_model(*model);
        atomic_write(snapshot_path(), snap.dump() + "\n");

        result.snapshot = {version, std::move(kb), std::move(model)};
        return result;
    }

    /// The last trained (kb, model) pair, if any.
    std::optional<Snapshot> load_snapshot() const {
        if (!fs::exists(snapshot_path())) return std::nullopt;
        const auto j = detail::parse_json_text(read_file(snapshot_path()));
        Snapshot s;
        s.version = j.at("version").get<std::uint64_t>();
        s.kb = std::make_shared<const KnowledgeBase>(kb_from_json(j.at("kb")));
        s.model = std::make_shared<const IntentModel>(model_from_json(j.at("model")));
        return s;
    }

    class ValidationFailed : public Error {
    public:
        explicit ValidationFailed(ValidationReport report)
            : Error("VALIDATION_FAILED", summarize(report)), report_(std::move(report)) {}
        const ValidationReport& report() const { return report_; }

    private:
        static std::string summarize(const ValidationReport& r) {
            std::string msg = std::to_string(r.violations.size()) + " violation(s)";
            if (!r.violations.empty())
                msg += ", first: " + r.violations.front().code + " at " + r.violations.front().locator;
            return msg;
        }
        ValidationReport report_;
    };

private:
    std::size_t trained_corrections() const {
        if (!fs::exists(snapshot_path())) return 0;
        const auto j = detail::parse_json_text(read_file(snapshot_path()));
        return j.value("corrections_trained", std::size_t{0});
    }

    fs::path dir_;
    std::uint64_t version_ = 0;
};

}  // namespace teachqa
