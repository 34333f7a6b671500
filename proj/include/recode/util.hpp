#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace recode {

/// Lowercase hex from a process-wide random source; 16 bytes gives 128 bits.
std::string random_id(std::size_t bytes = 16);

std::string_view trim(std::string_view s);

std::string to_lower(std::string_view s);

}  // namespace recode
