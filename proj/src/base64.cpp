#include "sinksam/base64.hpp"

#include <boost/beast/core/detail/base64.hpp>

#include "sinksam/error.hpp"

namespace sinksam {

namespace b64 = boost::beast::detail::base64;

std::string base64_encode(std::string_view bytes) {
  std::string out(b64::encoded_size(bytes.size()), '\0');
  out.resize(b64::encode(out.data(), bytes.data(), bytes.size()));
  return out;
}

std::string base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw InputError("base64: length is not a multiple of 4");
  std::size_t body = text.size();
  for (int k = 0; k < 2 && body > 0 && text[body - 1] == '='; ++k) --body;
  std::string out(b64::decoded_size(text.size()), '\0');
  const auto [written, read] = b64::decode(out.data(), text.data(), body);
  if (read != body) throw InputError("base64: invalid character at offset " + std::to_string(read));
  out.resize(written);
  return out;
}

}  // namespace sinksam
