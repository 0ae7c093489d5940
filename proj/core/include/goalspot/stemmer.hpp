#pragma once

#include <string>
#include <string_view>

namespace goalspot {

/// One pass of the Porter suffix-stripping algorithm over a lower-case
/// ASCII word. Words with non-letters or shorter than three characters
/// are returned unchanged.
std::string porter_stem(std::string_view word);

/// Porter applied until the word stops changing, so stem(stem(w)) == stem(w).
std::string stem(std::string_view word);

}  // namespace goalspot
