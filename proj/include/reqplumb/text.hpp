#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace reqplumb {

// Lower-cases ASCII letters and drops ASCII punctuation. Non-ASCII bytes pass
// through untouched.
std::string normalize_word(std::string_view word);

// Splits identifiers such as "MissionElement", "GPSReceiver" or
// "take_off-command" into lower-case words.
std::vector<std::string> split_identifier(std::string_view name);

// Canonical label form shared by model entities and requirement terms:
// identifier split, normalized, joined with single spaces.
std::string normalize_label(std::string_view name);

std::string join(const std::vector<std::string>& parts, std::string_view sep);
std::vector<std::string> split_ws(std::string_view text);
std::string_view trim(std::string_view s);

bool is_valid_utf8(std::string_view bytes);

// Lower-case ASCII identifier made of [a-z0-9_]; used for stable ids.
std::string slug(std::string_view text);

}  // namespace reqplumb
