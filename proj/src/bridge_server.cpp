#include "thumbside/bridge_server.hpp"

#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/signal_set.hpp>
#include <boost/asio/strand.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <thread>

namespace thumbside {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

namespace {

constexpr std::size_t kMaxFrame = 64 * 1024;

std::string_view sv(beast::string_view s) { return {s.data(), s.size()}; }

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, SessionOptions opts)
      : ws_(std::move(socket)), session_(opts) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.read_message_max(kMaxFrame);
    ws_.text(true);
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (!ec) self->read();
    });
  }

 private:
  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;
      const auto data = self->buffer_.data();
      self->session_.on_text(std::string_view(static_cast<const char*>(data.data()), data.size()));
      self->buffer_.consume(self->buffer_.size());
      self->flush();
      self->read();
    });
  }

  void flush() {
    if (writing_) return;
    auto next = session_.outbound().pop();
    if (!next) return;
    writing_ = true;
    current_ = std::move(*next);
    ws_.async_write(asio::buffer(current_),
                    [self = shared_from_this()](beast::error_code ec, std::size_t) {
                      self->writing_ = false;
                      if (!ec) self->flush();
                    });
  }

  websocket::stream<beast::tcp_stream> ws_;
  beast::flat_buffer buffer_;
  BridgeSession session_;
  std::string current_;
  bool writing_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, const BridgeServerOptions& opts)
      : stream_(std::move(socket)), opts_(opts) {}

  void run() { read(); }

 private:
  void read() {
    parser_.emplace();
    parser_->body_limit(kMaxFrame);
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, *parser_,
                     [self = shared_from_this()](beast::error_code ec, std::size_t) {
                       if (ec) return;
                       self->handle(self->parser_->release());
                     });
  }

  void handle(http::request<http::string_body> req) {
    if (websocket::is_upgrade(req)) {
      stream_.expires_never();
      SessionOptions session = opts_.session;
      session.debug = session.debug || wants_debug(sv(req.target()));
      std::make_shared<WsSession>(stream_.release_socket(), session)->run(std::move(req));
      return;
    }

    auto res = std::make_shared<http::response<http::string_body>>();
    res->version(req.version());
    res->set(http::field::server, "thumbside");
    res->keep_alive(req.keep_alive());
    if (req.method() != http::verb::get && req.method() != http::verb::head) {
      res->result(http::status::method_not_allowed);
      res->set(http::field::allow, "GET, HEAD");
      res->set(http::field::content_type, "text/plain");
      res->body() = "method not allowed\n";
    } else {
      StaticResponse r;
      if (opts_.static_dir) {
        r = serve_static(*opts_.static_dir, sv(req.target()), sv(req[http::field::if_none_match]),
                         req.method() == http::verb::head);
      } else {
        r.body = "not found\n";
      }
      res->result(static_cast<http::status>(r.status));
      res->set(http::field::content_type, r.content_type);
      if (!r.etag.empty()) {
        res->set(http::field::etag, r.etag);
        res->set(http::field::cache_control, "no-cache");
      }
      if (req.method() == http::verb::head) {
        res->content_length(r.body.size());
      } else {
        res->body() = std::move(r.body);
      }
    }
    if (req.method() != http::verb::head) res->prepare_payload();

    http::async_write(stream_, *res,
                      [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
                        if (ec) return;
                        if (res->keep_alive()) {
                          self->read();
                        } else {
                          beast::error_code ignored;
                          self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
                        }
                      });
  }

  beast::tcp_stream stream_;
  beast::flat_buffer buffer_;
  std::optional<http::request_parser<http::string_body>> parser_;
  const BridgeServerOptions& opts_;
};

}  // namespace

struct BridgeServer::Impl {
  explicit Impl(BridgeServerOptions o) : opts(std::move(o)), acceptor(ioc) {}

  void accept() {
    acceptor.async_accept(asio::make_strand(ioc), [this](beast::error_code ec, tcp::socket s) {
      if (ec == asio::error::operation_aborted) return;
      if (!ec) std::make_shared<HttpSession>(std::move(s), opts)->run();
      accept();
    });
  }

  BridgeServerOptions opts;
  asio::io_context ioc{1};
  tcp::acceptor acceptor;
  std::thread thread;
  std::uint16_t bound_port = 0;
  bool running = false;
};

BridgeServer::BridgeServer(BridgeServerOptions opts)
    : impl_(std::make_unique<Impl>(std::move(opts))) {}

BridgeServer::~BridgeServer() { stop(); }

void BridgeServer::start() {
  if (impl_->running) return;
  beast::error_code ec;
  const auto address = asio::ip::make_address(impl_->opts.address, ec);
  if (ec) throw std::runtime_error("bad address '" + impl_->opts.address + "'");
  const tcp::endpoint endpoint(address, impl_->opts.port);
  auto& acc = impl_->acceptor;
  acc.open(endpoint.protocol(), ec);
  if (!ec) acc.set_option(asio::socket_base::reuse_address(true), ec);
  if (!ec) acc.bind(endpoint, ec);
  if (!ec) acc.listen(asio::socket_base::max_listen_connections, ec);
  if (ec) {
    acc.close();
    throw std::runtime_error("cannot listen on " + impl_->opts.address + ":" +
                             std::to_string(impl_->opts.port) + ": " + ec.message());
  }
  impl_->bound_port = acc.local_endpoint().port();
  impl_->running = true;
  impl_->accept();
  impl_->thread = std::thread([this] { impl_->ioc.run(); });
}

void BridgeServer::stop() {
  if (!impl_->running) return;
  impl_->running = false;
  impl_->ioc.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
  beast::error_code ignored;
  impl_->acceptor.close(ignored);
}

void BridgeServer::wait_for_signal() {
  asio::io_context signals_ctx;
  asio::signal_set signals(signals_ctx, SIGINT, SIGTERM);
  signals.async_wait([](beast::error_code, int) {});
  signals_ctx.run();
  stop();
}

std::uint16_t BridgeServer::port() const { return impl_->bound_port; }

}  // namespace thumbside
