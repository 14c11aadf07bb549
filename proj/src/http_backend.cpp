// Eigen must precede httplib: <resolv.h> defines a `_res` macro.
#include "sinksam/segmenter.hpp"

#include <httplib.h>
#include <json.hpp>

namespace sinksam {

namespace {

class InflightSlot {
 public:
  InflightSlot(std::mutex& m, std::condition_variable& cv, int& inflight, int limit)
      : m_(m), cv_(cv), inflight_(inflight) {
    std::unique_lock lock(m_);
    cv_.wait(lock, [&] { return inflight_ < limit; });
    ++inflight_;
  }
  ~InflightSlot() {
    {
      std::lock_guard lock(m_);
      --inflight_;
    }
    cv_.notify_one();
  }
  InflightSlot(const InflightSlot&) = delete;
  InflightSlot& operator=(const InflightSlot&) = delete;

 private:
  std::mutex& m_;
  std::condition_variable& cv_;
  int& inflight_;
};

std::string error_message(const std::string& body) {
  try {
    const auto j = nlohmann::json::parse(body);
    if (j.is_object() && j.contains("error") && j["error"].is_string()) return j["error"].get<std::string>();
  } catch (const nlohmann::json::exception&) {
  }
  return body.substr(0, 200);
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
  const auto& url = options_.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw InputError("http backend: endpoint '" + url + "' needs a scheme (http://host:port)");
  }
  if (url.substr(0, scheme_end) != "http") {
    throw InputError("http backend: only http:// endpoints are supported, got '" + url + "'");
  }
  const auto path_start = url.find('/', scheme_end + 3);
  base_ = url.substr(0, path_start);
  if (path_start != std::string::npos) prefix_ = url.substr(path_start);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  if (options_.timeout_s <= 0.0) throw InputError("http backend: timeout must be positive");
  if (options_.retries < 0) throw InputError("http backend: retries must be >= 0");
  if (options_.max_inflight < 1) throw InputError("http backend: max_inflight must be >= 1");
}

BackendReply HttpBackend::segment(const std::string& patch_id, const RgbImage& patch,
                                  std::span<const PromptBox> boxes) {
  const std::string body = encode_segment_request(patch, boxes);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(options_.timeout_s));

  InflightSlot slot(mutex_, slot_freed_, inflight_, options_.max_inflight);
  std::optional<BackendError> last;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    httplib::Client client(base_);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(prefix_ + "/segment", body, "application/json");
    if (!res) {
      const auto err = res.error();
      const auto kind = err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read
                            ? BackendError::Kind::Timeout
                            : BackendError::Kind::Unreachable;
      last.emplace(kind, "patch " + patch_id + ": " + base_ + prefix_ + "/segment: " + httplib::to_string(err));
      continue;
    }
    if (res->status != 200) {
      BackendError error(BackendError::Kind::HttpStatus,
                         "patch " + patch_id + ": HTTP " + std::to_string(res->status) + ": " +
                             error_message(res->body));
      if (res->status >= 500) {
        last.emplace(std::move(error));
        continue;
      }
      throw error;
    }
    return decode_segment_response(res->body, patch.height(), patch.width());
  }
  throw *last;
}

std::unique_ptr<SegmenterBackend> http_backend(std::string endpoint, double timeout_s, int retries,
                                               int max_inflight) {
  return std::make_unique<HttpBackend>(
      HttpBackendOptions{std::move(endpoint), timeout_s, retries, max_inflight});
}

}  // namespace sinksam
