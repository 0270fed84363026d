#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace permfwer {

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

/// Strict full-string parse; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace permfwer
