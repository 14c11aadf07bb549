#pragma once

// In-process mock of the segmentation service, speaking the same wire
// protocol as HttpBackend. Used by tests and by the mock_segment_server tool.

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <thread>

namespace httplib {
class Server;
}

namespace sinksam {

enum class MockMode {
  Constant,       ///< every mask filled with `value`
  Box,            ///< `value` inside the box, 0 outside
  CountMismatch,  ///< one mask more than boxes
  BadDimensions,  ///< masks one column narrower than the patch
  OutOfRange,     ///< scores of 1.5
  ServerError,    ///< HTTP 500 with {"error": ...}
  BadRequest,     ///< HTTP 400 with {"error": ...}
  Flaky,          ///< first `failures` requests get HTTP 503, then behaves like Box
  Slow,           ///< sleeps `delay_ms` before answering like Box
};

MockMode parse_mock_mode(std::string_view text);

struct MockServerOptions {
  MockMode mode = MockMode::Box;
  std::uint8_t value = 128;
  int failures = 1;
  int delay_ms = 0;
};

class MockSegmentServer {
 public:
  explicit MockSegmentServer(MockServerOptions options = {});
  ~MockSegmentServer();
  MockSegmentServer(const MockSegmentServer&) = delete;
  MockSegmentServer& operator=(const MockSegmentServer&) = delete;

  /// Binds (port 0 picks a free port), starts serving on a background
  /// thread and returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Serves on the calling thread until stop().
  void listen_blocking(const std::string& host, int port);
  void stop();

  std::string endpoint() const;
  int requests() const noexcept { return requests_.load(); }
  int max_concurrent() const noexcept { return max_concurrent_.load(); }

 private:
  void install_routes();

  MockServerOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_;
  int port_ = 0;
  std::atomic<int> requests_{0};
  std::atomic<int> concurrent_{0};
  std::atomic<int> max_concurrent_{0};
};

}  // namespace sinksam
