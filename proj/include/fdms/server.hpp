#pragma once

#include <sys/socket.h>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

#include "fdms/dataio.hpp"
#include "fdms/service.hpp"

namespace fdms {

// Blocking HTTP + WebSocket front end for SteeringService, one thread per
// connection. Streams live at /sessions/{id}/stream. With a static directory
// set, other GET paths are served from it (index.html for "/").

class SteeringServer {
public:
    SteeringServer(SteeringService& service, const std::string& address, unsigned short port,
                   std::filesystem::path static_dir = {})
        : service_(service), static_dir_(std::move(static_dir)), acceptor_(ioc_)
    {
        namespace net = boost::asio;
        const net::ip::tcp::endpoint ep(net::ip::make_address(address), port);
        acceptor_.open(ep.protocol());
        acceptor_.set_option(net::socket_base::reuse_address(true));
        acceptor_.bind(ep);
        acceptor_.listen();
    }

    ~SteeringServer() { stop(); }

    SteeringServer(const SteeringServer&) = delete;
    SteeringServer& operator=(const SteeringServer&) = delete;

    unsigned short port() const { return acceptor_.local_endpoint().port(); }

    /// Listening socket descriptor. Shutting it down ends run().
    int listen_handle() { return acceptor_.native_handle(); }

    /// Accept loop; returns after stop().
    void run()
    {
        while (!stopping_) {
            boost::asio::ip::tcp::socket socket(ioc_);
            boost::system::error_code ec;
            acceptor_.accept(socket, ec);
            if (ec || stopping_)
                break;
            std::lock_guard lock(mutex_);
            if (stopping_)
                break;
            const auto key = next_connection_++;
            open_fds_.emplace(key, socket.native_handle());
            workers_.emplace_back([this, s = std::move(socket), key]() mutable {
                try {
                    serve_connection(std::move(s));
                }
                catch (const std::exception&) {
                    // The connection is dropped; the server keeps running.
                }
                std::lock_guard l(mutex_);
                open_fds_.erase(key);
            });
        }
    }

    /// Unblocks the accept loop and every connection, then joins the workers.
    void stop()
    {
        if (stopping_.exchange(true))
            return;
        ::shutdown(acceptor_.native_handle(), SHUT_RDWR);
        std::vector<std::thread> workers;
        {
            std::lock_guard lock(mutex_);
            for (const auto& [key, fd] : open_fds_)
                ::shutdown(fd, SHUT_RDWR);
            workers.swap(workers_);
        }
        for (auto& t : workers)
            if (t.joinable())
                t.join();
        boost::system::error_code ec;
        acceptor_.close(ec);
    }

private:
    static std::string stream_session(const std::string& target)
    {
        const std::string prefix = "/sessions/", suffix = "/stream";
        if (target.size() <= prefix.size() + suffix.size() || target.rfind(prefix, 0) != 0 ||
            target.compare(target.size() - suffix.size(), suffix.size(), suffix) != 0)
            return {};
        auto id = target.substr(prefix.size(), target.size() - prefix.size() - suffix.size());
        return id.find('/') == std::string::npos ? id : std::string{};
    }

    static const char* mime_type(const std::filesystem::path& p)
    {
        static const std::map<std::string, const char*> types = {
            {".html", "text/html"},  {".js", "application/javascript"}, {".css", "text/css"},
            {".json", "application/json"}, {".svg", "image/svg+xml"}, {".png", "image/png"}};
        auto it = types.find(p.extension().string());
        return it == types.end() ? "application/octet-stream" : it->second;
    }

    bool serve_static(const std::string& target, HttpResponse& out) const
    {
        if (static_dir_.empty())
            return false;
        std::string rel = target.substr(0, target.find('?'));
        if (rel == "/")
            rel = "/index.html";
        if (rel.find("..") != std::string::npos)
            return false;
        const auto path = static_dir_ / rel.substr(1);
        if (!std::filesystem::is_regular_file(path))
            return false;
        out = {200, read_text_file(path), mime_type(path)};
        return true;
    }

    void serve_connection(boost::asio::ip::tcp::socket socket)
    {
        namespace beast = boost::beast;
        namespace http = beast::http;
        beast::flat_buffer buffer;
        beast::error_code ec;
        for (;;) {
            http::request<http::string_body> req;
            http::read(socket, buffer, req, ec);
            if (ec)
                return;
            const std::string target(req.target());
            if (beast::websocket::is_upgrade(req)) {
                const auto id = stream_session(target);
                if (!id.empty() && service_.has_session(id))
                    serve_stream(std::move(socket), req, id);
                else
                    write_response(socket, req, {404, error_json(ErrorCode::NotFound, "unknown stream").dump()}, ec);
                return;
            }
            HttpResponse res;
            const bool is_api = target.rfind("/sessions", 0) == 0 || target.rfind("/synergies", 0) == 0;
            if (is_api || req.method() != http::verb::get || !serve_static(target, res))
                res = service_.handle(std::string(req.method_string()), target, req.body());
            write_response(socket, req, res, ec);
            if (ec || !req.keep_alive())
                break;
        }
        socket.shutdown(boost::asio::ip::tcp::socket::shutdown_send, ec);
    }

    static void write_response(boost::asio::ip::tcp::socket& socket,
                               const boost::beast::http::request<boost::beast::http::string_body>& req,
                               const HttpResponse& r, boost::beast::error_code& ec)
    {
        namespace http = boost::beast::http;
        http::response<http::string_body> res{static_cast<http::status>(r.status), req.version()};
        res.set(http::field::content_type, r.content_type);
        res.set(http::field::access_control_allow_origin, "*");
        res.keep_alive(req.keep_alive());
        res.body() = r.body;
        res.prepare_payload();
        http::write(socket, res, ec);
    }

    void serve_stream(boost::asio::ip::tcp::socket socket,
                      const boost::beast::http::request<boost::beast::http::string_body>& req, const std::string& id)
    {
        namespace beast = boost::beast;
        beast::websocket::stream<boost::asio::ip::tcp::socket> ws(std::move(socket));
        beast::error_code ec;
        ws.accept(req, ec);
        if (ec)
            return;
        ws.text(true);
        for (;;) {
            beast::flat_buffer frame;
            ws.read(frame, ec);
            if (ec)
                return;
            const auto reply = service_.handle_frame(id, beast::buffers_to_string(frame.data()));
            ws.write(boost::asio::buffer(reply), ec);
            if (ec)
                return;
        }
    }

    SteeringService& service_;
    std::filesystem::path static_dir_;
    boost::asio::io_context ioc_;
    boost::asio::ip::tcp::acceptor acceptor_;
    std::atomic<bool> stopping_{false};
    std::mutex mutex_;
    std::map<std::uint64_t, int> open_fds_;
    std::uint64_t next_connection_ = 0;
    std::vector<std::thread> workers_;
};

} // namespace fdms
