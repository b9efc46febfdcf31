#include "specops/email_http.hpp"

#include <mutex>
#include <thread>

#include <httplib.h>

#include "specops/errors.hpp"

namespace specops::env {

struct EmailHttpServer::Impl {
    TestEnvironment& env;
    httplib::Server server;
    std::thread worker;
    std::mutex mutex; // requests may overlap; the store is not thread-safe
    int port = 0;

    explicit Impl(TestEnvironment& e) : env(e) {}
};

EmailHttpServer::EmailHttpServer(TestEnvironment& env) : impl_(std::make_unique<Impl>(env)) {
    auto* impl = impl_.get();

    impl->server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
        res.set_content(R"({"status":"ok"})", "application/json");
    });

    impl->server.Get("/mail/inbox", [impl](const httplib::Request&, httplib::Response& res) {
        std::lock_guard<std::mutex> lock(impl->mutex);
        Json out = Json::array();
        for (const auto& m : impl->env.email().inbox()) out.push_back(m.to_json());
        res.set_content(out.dump(), "application/json");
    });

    impl->server.Get("/mail/sent", [impl](const httplib::Request&, httplib::Response& res) {
        std::lock_guard<std::mutex> lock(impl->mutex);
        Json out = Json::array();
        for (const auto& m : impl->env.email().sent()) out.push_back(m.to_json());
        res.set_content(out.dump(), "application/json");
    });

    impl->server.Get("/mail/thread", [impl](const httplib::Request& req, httplib::Response& res) {
        if (!req.has_param("subject")) {
            res.status = 400;
            res.set_content(R"({"error":"missing subject parameter"})", "application/json");
            return;
        }
        std::lock_guard<std::mutex> lock(impl->mutex);
        Json out = Json::array();
        for (const auto* m : impl->env.email().thread(req.get_param_value("subject"))) {
            out.push_back(m->to_json());
        }
        res.set_content(out.dump(), "application/json");
    });

    impl->server.Post("/mail/send", [impl](const httplib::Request& req, httplib::Response& res) {
        Json body;
        try {
            body = Json::parse(req.body);
        } catch (const Json::exception&) {
            res.status = 400;
            res.set_content(R"({"error":"request body is not valid JSON"})", "application/json");
            return;
        }
        if (!body.contains("from_name") || !body.contains("to") || !body.contains("subject") ||
            !body.contains("body")) {
            res.status = 400;
            res.set_content(R"({"error":"from_name, to, subject and body are required"})",
                            "application/json");
            return;
        }
        std::vector<std::string> attachments;
        if (body.contains("attachments")) {
            attachments = body.at("attachments").get<std::vector<std::string>>();
        }
        std::lock_guard<std::mutex> lock(impl->mutex);
        SendResult sent = impl->env.email().send_email(
            body.at("from_name").get<std::string>(), body.at("to").get<std::string>(),
            body.at("subject").get<std::string>(), body.at("body").get<std::string>(), attachments);
        Json out;
        if (!sent.ok) {
            res.status = 503;
            out["error"] = sent.detail;
            out["fault"] = fault_name(*sent.fault);
            res.set_content(out.dump(), "application/json");
            return;
        }
        out["id"] = sent.message_id;
        out["detail"] = sent.detail;
        res.set_content(out.dump(), "application/json");
    });

    impl->server.Get("/probe", [impl](const httplib::Request& req, httplib::Response& res) {
        if (!req.has_param("selector")) {
            res.status = 400;
            res.set_content(R"({"error":"missing selector parameter"})", "application/json");
            return;
        }
        std::lock_guard<std::mutex> lock(impl->mutex);
        ProbeReport report = impl->env.probe(req.get_param_value("selector"));
        if (report.fault) {
            res.status = 503;
            res.set_content(report.to_json().dump(), "application/json");
            return;
        }
        res.set_content(report.to_json().dump(), "application/json");
    });
}

EmailHttpServer::~EmailHttpServer() { stop(); }

int EmailHttpServer::start(const std::string& host) {
    if (impl_->worker.joinable()) {
        throw SpecOpsError(ErrorCode::ConfigError, "mail server already running");
    }
    impl_->port = impl_->server.bind_to_any_port(host);
    if (impl_->port <= 0) {
        throw SpecOpsError(ErrorCode::IoError, "cannot bind mail server on " + host);
    }
    impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
    return impl_->port;
}

void EmailHttpServer::stop() {
    if (impl_->server.is_running()) impl_->server.stop();
    if (impl_->worker.joinable()) impl_->worker.join();
}

int EmailHttpServer::port() const { return impl_->port; }

} // namespace specops::env
