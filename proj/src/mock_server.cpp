#include "sinksam/mock_server.hpp"

#include <chrono>
#include <vector>

// Eigen must precede httplib: <resolv.h> defines a `_res` macro.
#include "sinksam/ascii_grid.hpp"
#include "sinksam/segmenter.hpp"

#include <httplib.h>
#include <json.hpp>

namespace sinksam {

MockMode parse_mock_mode(std::string_view text) {
  static constexpr std::pair<std::string_view, MockMode> kModes[] = {
      {"constant", MockMode::Constant},         {"box", MockMode::Box},
      {"count-mismatch", MockMode::CountMismatch}, {"bad-dimensions", MockMode::BadDimensions},
      {"out-of-range", MockMode::OutOfRange},   {"server-error", MockMode::ServerError},
      {"bad-request", MockMode::BadRequest},    {"flaky", MockMode::Flaky},
      {"slow", MockMode::Slow}};
  for (const auto& [name, mode] : kModes) {
    if (detail::iequals(text, name)) return mode;
  }
  throw InputError("unknown mock mode '" + std::string(text) + "'");
}

MockSegmentServer::MockSegmentServer(MockServerOptions options)
    : options_(options), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

MockSegmentServer::~MockSegmentServer() { stop(); }

void MockSegmentServer::install_routes() {
  server_->Post(R"(.*/segment)", [this](const httplib::Request& req, httplib::Response& res) {
    const int n = ++requests_;
    const int now = ++concurrent_;
    int seen = max_concurrent_.load();
    while (now > seen && !max_concurrent_.compare_exchange_weak(seen, now)) {
    }
    struct Leave {
      std::atomic<int>& c;
      ~Leave() { --c; }
    } leave{concurrent_};

    auto fail = [&](int status, const std::string& msg) {
      res.status = status;
      res.set_content(nlohmann::json{{"error", msg}}.dump(), "application/json");
    };

    DecodedRequest decoded;
    try {
      decoded = decode_segment_request(req.body);
    } catch (const std::exception& e) {
      fail(400, e.what());
      return;
    }
    const Index h = decoded.image.height();
    const Index w = decoded.image.width();

    MockMode mode = options_.mode;
    if (mode == MockMode::ServerError) return fail(500, "mock: internal failure");
    if (mode == MockMode::BadRequest) return fail(400, "mock: rejected request");
    if (mode == MockMode::Flaky) {
      if (n <= options_.failures) return fail(503, "mock: temporarily unavailable");
      mode = MockMode::Box;
    }
    if (mode == MockMode::Slow) {
      std::this_thread::sleep_for(std::chrono::milliseconds(options_.delay_ms));
      mode = MockMode::Box;
    }

    std::vector<GrayImage> masks;
    std::vector<double> scores;
    for (const auto& b : decoded.boxes) {
      GrayImage m;
      switch (mode) {
        case MockMode::Constant:
          m = GrayImage::Constant(h, w, options_.value);
          break;
        case MockMode::BadDimensions:
          m = GrayImage::Constant(h, w - 1, options_.value);
          break;
        default:
          m = GrayImage::Zero(h, w);
          if (b.valid_for(w, h)) m.block(b.y0, b.x0, b.height(), b.width()).setConstant(options_.value);
          break;
      }
      masks.push_back(std::move(m));
      scores.push_back(mode == MockMode::OutOfRange ? 1.5 : 0.9);
    }
    if (mode == MockMode::CountMismatch) {
      masks.push_back(GrayImage::Zero(h, w));
      scores.push_back(0.0);
    }
    res.set_content(encode_segment_response(masks, scores), "application/json");
  });
}

int MockSegmentServer::start(const std::string& host, int port) {
  host_ = host;
  port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ < 0) throw IoError("mock server: cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void MockSegmentServer::listen_blocking(const std::string& host, int port) {
  host_ = host;
  port_ = port;
  if (!server_->listen(host, port)) throw IoError("mock server: cannot listen on " + host + ":" + std::to_string(port));
}

void MockSegmentServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string MockSegmentServer::endpoint() const {
  return "http://" + host_ + ":" + std::to_string(port_);
}

}  // namespace sinksam
