#include "http_server.hpp"

#include "goalspot/service.hpp"
#include "httplib.h"

namespace goalspot {

struct HttpServer::Impl {
    explicit Impl(const KnowledgeBase& kb) : service(kb) {}

    QueryService service;
    httplib::Server server;
};

HttpServer::HttpServer(const KnowledgeBase& kb) : impl_(std::make_unique<Impl>(kb)) {
    auto route = [this](const httplib::Request& req, httplib::Response& res) {
        auto r = impl_->service.handle(req.method, req.path, req.body);
        res.status = r.status;
        res.set_content(r.body, "application/json");
    };
    impl_->server.Get(R"(.*)", route);
    impl_->server.Post(R"(.*)", route);
    impl_->server.Put(R"(.*)", route);
    impl_->server.Delete(R"(.*)", route);
    impl_->server.Patch(R"(.*)", route);
    // httplib defaults to SO_REUSEPORT, which lets a second server share a busy port
    impl_->server.set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    impl_->server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
        res.status = 500;
        res.set_content(R"({"error":"internal error"})", "application/json");
    });
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        port_ = impl_->server.bind_to_any_port(host);
        return port_ > 0;
    }
    if (!impl_->server.bind_to_port(host, port)) return false;
    port_ = port;
    return true;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_->server.is_running()) impl_->server.stop();
}

}  // namespace goalspot
