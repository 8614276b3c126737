#pragma once

#include <string>
#include <string_view>

namespace ticketscope {

// English Snowball ("Porter2") stemmer, classic rule set.
// Input is expected lowercase ASCII; other bytes are treated as consonants.
std::string porter2_stem(std::string_view word);

}  // namespace ticketscope
