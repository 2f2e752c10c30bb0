#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>

#include <httplib.h>
#include <json.hpp>

#include "teachqa/error.hpp"
#include "teachqa/eval.hpp"
#include "teachqa/responder.hpp"
#include "teachqa/templates.hpp"
#include "teachqa/workspace.hpp"

namespace teachqa {

struct ServiceConfig {
    std::filesystem::path workspace = ".";
    double default_threshold = kDefaultThreshold;
    std::string cors_origin = "*";
};

/// HTTP front end for the teaching loop. Mutating routes are serialized by
/// one writer mutex; /v1/ask reads an immutable snapshot published by
/// pointer swap, so every answer sees a kb and model of the same version.
class Service {
public:
    explicit Service(ServiceConfig config)
        : config_(std::move(config)), workspace_(config_.workspace) {
        if (auto snap = workspace_.load_snapshot())
            snapshot_ = std::make_shared<const Snapshot>(std::move(*snap));
        version_ = workspace_.version();
        routes();
    }

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Binds; port 0 picks a free port. Returns the bound port or -1.
    int bind(const std::string& host, int port) {
        if (port == 0) return server_.bind_to_any_port(host);
        return server_.bind_to_port(host, port) ? port : -1;
    }

    /// Serves until stop(); blocks the calling thread.
    bool run() { return server_.listen_after_bind(); }

    void stop() { server_.stop(); }
    void wait_until_ready() const { server_.wait_until_ready(); }

    std::shared_ptr<const Snapshot> snapshot() const {
        std::lock_guard lock(snapshot_mutex_);
        return snapshot_;
    }

    std::uint64_t version() const { return version_.load(); }

private:
    using Json = nlohmann::ordered_json;

    static void reply(httplib::Response& res, int status, const Json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }

    static void fail(httplib::Response& res, int status, const std::string& code,
                     const std::string& message) {
        reply(res, status, Json{{"error", code}, {"message", message}});
    }

    static std::optional<nlohmann::json> body_json(const httplib::Request& req,
                                                   httplib::Response& res, bool allow_empty) {
        if (req.body.find_first_not_of(" \t\r\n") == std::string::npos) {
            if (allow_empty) return nlohmann::json::object();
            fail(res, 400, "BAD_REQUEST", "request body is empty");
            return std::nullopt;
        }
        try {
            auto j = nlohmann::json::parse(req.body);
            if (!j.is_object()) {
                fail(res, 400, "BAD_REQUEST", "request body must be a JSON object");
                return std::nullopt;
            }
            return j;
        } catch (const nlohmann::json::parse_error& e) {
            fail(res, 400, "BAD_REQUEST", e.what());
            return std::nullopt;
        }
    }

    void publish(Snapshot snap) {
        auto ptr = std::make_shared<const Snapshot>(std::move(snap));
        std::lock_guard lock(snapshot_mutex_);
        snapshot_ = std::move(ptr);
    }

    void routes() {
        server_.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Origin", config_.cors_origin);
            res.set_header("Access-Control-Allow-Methods", "GET, PUT, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
        });
        server_.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) {
            res.status = 204;
        });
        server_.set_exception_handler(
            [](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
                std::string what = "unknown error";
                try {
                    std::rethrow_exception(ep);
                } catch (const std::exception& e) {
                    what = e.what();
                } catch (...) {
                }
                fail(res, 500, "INTERNAL", what);
            });

        server_.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
            reply(res, 200, Json{{"status", "ok"},
                                 {"version", version_.load()},
                                 {"model_loaded", snapshot() != nullptr}});
        });

        server_.Post("/v1/ask", [this](const httplib::Request& req, httplib::Response& res) {
            auto body = body_json(req, res, false);
            if (!body) return;
            if (!body->contains("question") || !(*body)["question"].is_string())
                return fail(res, 400, "BAD_REQUEST", "'question' must be a string");
            const auto question = (*body)["question"].get<std::string>();
            if (question.find_first_not_of(" \t\r\n") == std::string::npos)
                return fail(res, 400, "EMPTY_QUESTION", "question is empty");
            double threshold = config_.default_threshold;
            if (body->contains("threshold") && !(*body)["threshold"].is_null()) {
                if (!(*body)["threshold"].is_number())
                    return fail(res, 400, "BAD_REQUEST", "'threshold' must be a number");
                threshold = (*body)["threshold"].get<double>();
                if (!(threshold >= 0.0 && threshold <= 1.0))
                    return fail(res, 400, "BAD_REQUEST", "'threshold' must lie in [0, 1]");
            }
            const auto snap = snapshot();
            if (!snap) return fail(res, 409, "NO_MODEL", "no model has been trained yet");
            auto out = to_json(answer(*snap->kb, *snap->model, question, threshold));
            out["version"] = snap->version;
            reply(res, 200, out);
        });

        // Files are replaced by rename, so GETs need no lock.
        server_.Get("/v1/kb", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(workspace_.kb_text(), "application/json");
        });
        server_.Get("/v1/templates", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(workspace_.templates_text(), "application/json");
        });
        server_.Put("/v1/kb", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(writer_);
            mutation_reply(res, workspace_.put_kb(req.body));
        });
        server_.Put("/v1/templates", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard lock(writer_);
            mutation_reply(res, workspace_.put_templates(req.body));
        });

        server_.Post("/v1/generate", [this](const httplib::Request&, httplib::Response& res) {
            std::lock_guard lock(writer_);
            try {
                const auto report = workspace_.generate();
                version_ = workspace_.version();
                auto out = to_json(report);
                out["version"] = version_.load();
                reply(res, 200, out);
            } catch (const Workspace::ValidationFailed& e) {
                reply(res, 422, Json{{"error", e.code()},
                                     {"message", e.what()},
                                     {"violations", to_json(e.report())}});
            } catch (const GenerationError& e) {
                reply(res, 422, Json{{"error", e.code()},
                                     {"message", e.what()},
                                     {"template_id", e.template_id()}});
            } catch (const Error& e) {
                fail(res, 422, e.code(), e.what());
            }
        });

        server_.Post("/v1/train", [this](const httplib::Request& req, httplib::Response& res) {
            auto body = body_json(req, res, true);
            if (!body) return;
            TrainOptions opts;
            opts.threshold = config_.default_threshold;
            try {
                if (body->contains("alpha")) opts.alpha = body->at("alpha").get<double>();
                if (body->contains("holdout")) opts.holdout = body->at("holdout").get<double>();
                if (body->contains("seed")) opts.seed = body->at("seed").get<std::uint64_t>();
            } catch (const nlohmann::json::exception& e) {
                return fail(res, 400, "BAD_REQUEST", e.what());
            }
            std::lock_guard lock(writer_);
            try {
                auto result = workspace_.train(opts);
                const auto version = result.snapshot.version;
                publish(std::move(result.snapshot));
                version_ = workspace_.version();
                reply(res, 200,
                      Json{{"version", version},
                           {"eval", to_json(result.eval ? *result.eval
                                                        : empty_eval_report(result.threshold))},
                           {"corrections_used", result.corrections_used},
                           {"corrections_skipped", result.corrections_skipped}});
            } catch (const Error& e) {
                fail(res, e.code() == "NOT_GENERATED" ? 409 : 422, e.code(), e.what());
            }
        });

        server_.Post("/v1/feedback", [this](const httplib::Request& req, httplib::Response& res) {
            auto body = body_json(req, res, false);
            if (!body) return;
            const auto& b = *body;
            if (!b.contains("question") || !b["question"].is_string() || !b.contains("intent") ||
                !b["intent"].is_string())
                return fail(res, 400, "BAD_REQUEST", "'question' and 'intent' must be strings");
            const auto question = b["question"].get<std::string>();
            if (question.find_first_not_of(" \t\r\n") == std::string::npos)
                return fail(res, 400, "EMPTY_QUESTION", "question is empty");
            std::lock_guard lock(writer_);
            try {
                const auto pending = workspace_.add_correction(question, b["intent"].get<std::string>());
                version_ = workspace_.version();
                reply(res, 200, Json{{"recorded", true}, {"pending", pending}});
            } catch (const Error& e) {
                fail(res, 422, e.code(), e.what());
            }
        });
    }

    void mutation_reply(httplib::Response& res, const ValidationReport& report) {
        version_ = workspace_.version();
        reply(res, report.valid() ? 200 : 422,
              Json{{"version", version_.load()}, {"violations", to_json(report)}});
    }

    ServiceConfig config_;
    Workspace workspace_;
    httplib::Server server_;
    std::mutex writer_;
    mutable std::mutex snapshot_mutex_;
    std::shared_ptr<const Snapshot> snapshot_;
    std::atomic<std::uint64_t> version_{0};
};

}  // namespace teachqa
