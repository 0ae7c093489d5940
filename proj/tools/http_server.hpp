#pragma once

#include <memory>
#include <string>

#include "goalspot/kb.hpp"

namespace goalspot {

/// HTTP transport over QueryService. Handlers run on httplib's thread pool
/// and only read the shared knowledge base.
class HttpServer {
public:
    explicit HttpServer(const KnowledgeBase& kb);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Port 0 picks a free port. Returns false when the port cannot be bound.
    bool bind(const std::string& host, int port);
    int port() const { return port_; }

    // Blocks until stop() is called.
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int port_ = -1;
};

}  // namespace goalspot
