#pragma once

#include <string>
#include <string_view>

namespace sinksam {

std::string base64_encode(std::string_view bytes);

/// Strict decode: throws InputError on characters outside the alphabet or
/// a length that is not a multiple of 4.
std::string base64_decode(std::string_view text);

}  // namespace sinksam
