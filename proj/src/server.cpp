#include "dcl/server.hpp"

#include <atomic>
#include <condition_variable>
#include <csignal>
#include <deque>
#include <mutex>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast.hpp>
#include <boost/beast/websocket.hpp>

#include "dcl/error.hpp"

namespace dcl {

namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

namespace {

constexpr std::size_t kMaxQueuedFrames = 256;
constexpr auto kHttpTimeout = std::chrono::seconds(30);

void set_common_headers(http::response<http::string_body>& res) {
  res.set(http::field::server, "dcl-steering");
  res.set(http::field::access_control_allow_origin, "*");
  res.set(http::field::access_control_allow_methods, "GET, POST, DELETE, OPTIONS");
  res.set(http::field::access_control_allow_headers, "Content-Type");
}

class StreamSession : public std::enable_shared_from_this<StreamSession> {
 public:
  StreamSession(tcp::socket&& socket, ServiceApi& api, net::thread_pool& blocking, std::shared_ptr<Session> session,
                double rate_hz)
      : ws_(std::move(socket)), api_(api), blocking_(blocking), session_(std::move(session)), rate_hz_(rate_hz) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, beast::bind_front_handler(&StreamSession::on_accept, shared_from_this()));
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    std::weak_ptr<StreamSession> weak = shared_from_this();
    auto executor = ws_.get_executor();
    token_ = session_->subscribe(
        [weak, executor](const Frame& frame) {
          auto self = weak.lock();
          if (!self) return;
          const bool droppable = frame.type == FrameType::State;
          net::post(executor, [self, text = frame_to_json(frame).dump(), droppable]() mutable {
            self->enqueue(std::move(text), droppable);
          });
        },
        rate_hz_);
    subscribed_ = true;
    const Snapshot snap = session_->snapshot();
    enqueue(frame_to_json({FrameType::Status, snap}).dump(), false);
    enqueue(frame_to_json({FrameType::State, snap}).dump(), false);
    do_read();
  }

  void do_read() {
    ws_.async_read(buffer_, beast::bind_front_handler(&StreamSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      close();
      return;
    }
    const std::string text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    // handle_stream_message may wait for an ack; keep that off the I/O threads.
    auto self = shared_from_this();
    net::post(blocking_, [self, text] {
      auto reply = self->api_.handle_stream_message(*self->session_, text).dump();
      net::post(self->ws_.get_executor(), [self, reply = std::move(reply)]() mutable {
        self->enqueue(std::move(reply), false);
      });
    });
    do_read();
  }

  void enqueue(std::string text, bool droppable) {
    if (closed_) return;
    if (droppable && queue_.size() >= kMaxQueuedFrames) return;
    queue_.push_back(std::move(text));
    if (queue_.size() == 1) do_write();
  }

  void do_write() {
    ws_.text(true);
    ws_.async_write(net::buffer(queue_.front()),
                    beast::bind_front_handler(&StreamSession::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      close();
      return;
    }
    queue_.pop_front();
    if (!queue_.empty()) do_write();
  }

  void close() {
    closed_ = true;
    queue_.clear();
    if (subscribed_) {
      session_->unsubscribe(token_);
      subscribed_ = false;
    }
  }

  websocket::stream<beast::tcp_stream> ws_;
  ServiceApi& api_;
  net::thread_pool& blocking_;
  std::shared_ptr<Session> session_;
  double rate_hz_;
  beast::flat_buffer buffer_;
  std::deque<std::string> queue_;
  std::uint64_t token_ = 0;
  bool subscribed_ = false;
  bool closed_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket&& socket, ServiceApi& api, net::thread_pool& blocking)
      : stream_(std::move(socket)), api_(api), blocking_(blocking) {}

  void run() {
    net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpSession::do_read, shared_from_this()));
  }

 private:
  void do_read() {
    req_ = {};
    stream_.expires_after(kHttpTimeout);
    http::async_read(stream_, buffer_, req_, beast::bind_front_handler(&HttpSession::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec == http::error::end_of_stream) {
      stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
      return;
    }
    if (ec) return;

    const std::string target(req_.target());
    if (websocket::is_upgrade(req_)) {
      upgrade(target);
      return;
    }
    // Session commands can block briefly on acknowledgements.
    auto self = shared_from_this();
    net::post(blocking_, [self] {
      auto res = std::make_shared<http::response<http::string_body>>(self->respond());
      net::post(self->stream_.get_executor(), [self, res] { self->write(res); });
    });
  }

  void upgrade(const std::string& target) {
    std::optional<StreamTarget> st;
    std::shared_ptr<Session> session;
    try {
      st = ServiceApi::parse_stream_target(target);
      if (st) session = api_.sessions().get(st->session_id);
    } catch (const Error& e) {
      write_error(http_status_for(e.code()), e.what());
      return;
    }
    if (!st) {
      write_error(404, "no stream at " + target);
      return;
    }
    stream_.expires_never();
    std::make_shared<StreamSession>(stream_.release_socket(), api_, blocking_, std::move(session), st->rate_hz)
        ->run(std::move(req_));
  }

  http::response<http::string_body> respond() {
    http::response<http::string_body> res;
    res.version(req_.version());
    res.keep_alive(req_.keep_alive());
    set_common_headers(res);
    if (req_.method() == http::verb::options) {
      res.result(http::status::no_content);
      return res;
    }
    HttpResult out;
    try {
      out = api_.handle(std::string(req_.method_string()), std::string(req_.target()), req_.body());
    } catch (const std::exception& e) {
      out = {500, {{"error", "Internal"}, {"message", e.what()}}};
    }
    res.result(static_cast<http::status>(out.status));
    res.set(http::field::content_type, "application/json");
    res.body() = out.body.dump();
    res.prepare_payload();
    return res;
  }

  void write_error(int status, const std::string& message) {
    auto res = std::make_shared<http::response<http::string_body>>();
    res->version(req_.version());
    res->keep_alive(false);
    set_common_headers(*res);
    res->result(static_cast<http::status>(status));
    res->set(http::field::content_type, "application/json");
    res->body() = Json{{"error", "BadRequest"}, {"message", message}}.dump();
    res->prepare_payload();
    write(res);
  }

  void write(std::shared_ptr<http::response<http::string_body>> res) {
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
      if (ec) return;
      if (!res->keep_alive()) {
        self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
        return;
      }
      self->do_read();
    });
  }

  beast::tcp_stream stream_;
  ServiceApi& api_;
  net::thread_pool& blocking_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

class Listener : public std::enable_shared_from_this<Listener> {
 public:
  Listener(net::io_context& ioc, tcp::endpoint endpoint, ServiceApi& api, net::thread_pool& blocking)
      : ioc_(ioc), acceptor_(net::make_strand(ioc)), api_(api), blocking_(blocking) {
    acceptor_.open(endpoint.protocol());
    acceptor_.set_option(net::socket_base::reuse_address(true));
    acceptor_.bind(endpoint);
    acceptor_.listen(net::socket_base::max_listen_connections);
  }

  std::uint16_t port() const { return acceptor_.local_endpoint().port(); }

  void run() { do_accept(); }

  void close() {
    net::post(acceptor_.get_executor(), [self = shared_from_this()] {
      beast::error_code ec;
      self->acceptor_.close(ec);
    });
  }

 private:
  void do_accept() {
    acceptor_.async_accept(net::make_strand(ioc_),
                           beast::bind_front_handler(&Listener::on_accept, shared_from_this()));
  }

  void on_accept(beast::error_code ec, tcp::socket socket) {
    if (ec == net::error::operation_aborted) return;
    if (!ec) std::make_shared<HttpSession>(std::move(socket), api_, blocking_)->run();
    do_accept();
  }

  net::io_context& ioc_;
  tcp::acceptor acceptor_;
  ServiceApi& api_;
  net::thread_pool& blocking_;
};

}  // namespace

struct Server::Impl {
  explicit Impl(ServerOptions opts)
      : options(std::move(opts)), sessions(options.max_sessions), api(sessions), ioc(std::max(1, options.threads)) {}

  ServerOptions options;
  SessionManager sessions;
  ServiceApi api;
  net::io_context ioc;
  net::thread_pool blocking{2};
  std::shared_ptr<Listener> listener;
  std::vector<std::thread> threads;
  std::unique_ptr<net::signal_set> signals;
  std::mutex mutex;
  std::condition_variable stopped_cv;
  bool stop_requested = false;
  bool running = false;
};

Server::Server(ServerOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

Server::~Server() { stop(); }

void Server::start() {
  auto& im = *impl_;
  const auto address = net::ip::make_address(im.options.address);
  im.listener = std::make_shared<Listener>(im.ioc, tcp::endpoint{address, im.options.port}, im.api,
                                           im.blocking);
  im.listener->run();
  im.signals = std::make_unique<net::signal_set>(im.ioc, SIGINT, SIGTERM);
  im.signals->async_wait([&im](beast::error_code ec, int) {
    if (ec) return;
    std::lock_guard lock(im.mutex);
    im.stop_requested = true;
    im.stopped_cv.notify_all();
  });
  for (int i = 0; i < std::max(1, im.options.threads); ++i) {
    im.threads.emplace_back([&im] { im.ioc.run(); });
  }
  im.running = true;
}

void Server::wait() {
  auto& im = *impl_;
  {
    std::unique_lock lock(im.mutex);
    im.stopped_cv.wait(lock, [&] { return im.stop_requested; });
  }
  stop();
}

void Server::stop() {
  auto& im = *impl_;
  if (!im.running) return;
  im.running = false;
  im.listener->close();
  if (im.signals) {
    beast::error_code ec;
    im.signals->cancel(ec);
  }
  im.sessions.detach_subscribers();
  im.blocking.join();
  im.ioc.stop();
  for (auto& t : im.threads) t.join();
  im.threads.clear();
  {
    std::lock_guard lock(im.mutex);
    im.stop_requested = true;
    im.stopped_cv.notify_all();
  }
}

std::uint16_t Server::port() const { return impl_->listener ? impl_->listener->port() : impl_->options.port; }

SessionManager& Server::sessions() { return impl_->sessions; }

}  // namespace dcl
