// Stand-in segmentation service for exercising the HTTP backend offline.
//
//   mock_segment_server --port 8080 --mode box --value 200

#include <CLI11.hpp>

#include <iostream>

#include "sinksam/error.hpp"
#include "sinksam/mock_server.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mock prompt-segmentation service"};
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string mode = "box";
  int value = 128;
  int failures = 1;
  int delay_ms = 0;
  app.add_option("--host", host)->capture_default_str();
  app.add_option("--port", port)->capture_default_str();
  app.add_option("--mode", mode,
                 "constant, box, count-mismatch, bad-dimensions, out-of-range, server-error, "
                 "bad-request, flaky, slow")
      ->capture_default_str();
  app.add_option("--value", value, "Mask byte value")->check(CLI::Range(0, 255))->capture_default_str();
  app.add_option("--failures", failures, "Failing requests before 'flaky' recovers")->capture_default_str();
  app.add_option("--delay-ms", delay_ms, "Delay for 'slow'")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    sinksam::MockServerOptions options;
    options.mode = sinksam::parse_mock_mode(mode);
    options.value = static_cast<std::uint8_t>(value);
    options.failures = failures;
    options.delay_ms = delay_ms;
    sinksam::MockSegmentServer server(options);
    std::cerr << "mock segment server on http://" << host << ":" << port << "/segment (" << mode << ")\n";
    server.listen_blocking(host, port);
  } catch (const sinksam::Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 0;
}
