#pragma once

#include <memory>
#include <string>

#include "specops/test_env.hpp"

namespace specops::env {

/// Loopback HTTP face of the test mailbox, so infrastructure that expects a
/// real mail API can be pointed at the jail instead. Routes:
///   GET  /health
///   GET  /mail/inbox          GET /mail/sent
///   GET  /mail/thread?subject=...
///   POST /mail/send           {from_name,to,subject,body,attachments?}
///   GET  /probe?selector=...
/// Injected faults surface as 503 with the fault name in the body.
class EmailHttpServer {
public:
    explicit EmailHttpServer(TestEnvironment& env);
    ~EmailHttpServer();

    EmailHttpServer(const EmailHttpServer&) = delete;
    EmailHttpServer& operator=(const EmailHttpServer&) = delete;

    /// Binds an ephemeral port and serves in a background thread.
    int start(const std::string& host = "127.0.0.1");
    void stop();
    int port() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace specops::env
