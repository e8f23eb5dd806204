#pragma once

#include <initializer_list>
#include <random>
#include <string>

#include "nplcs/fixtures.hpp"
#include "nplcs/model.hpp"

namespace nplcs::test {

/// Word from one-character message names, e.g. "aaba".
inline Word word(const Lcs& lcs, const std::string& letters) {
    Word w;
    for (char ch : letters) w.push_back(lcs.require_message(std::string(1, ch)));
    return w;
}

/// Single-channel configuration.
inline Config cfg(const Lcs& lcs, const std::string& loc, const std::string& content) {
    Config s = Config::at(lcs.require_location(loc), lcs.channel_count());
    s.contents[0] = word(lcs, content);
    return s;
}

inline LocSet locs(const Lcs& lcs, std::initializer_list<std::string> names) {
    LocSet s;
    for (const std::string& n : names) s.insert(lcs.require_location(n));
    return s;
}

inline Word random_word(std::mt19937& rng, std::size_t max_len, SymId alphabet) {
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<SymId> sym(0, alphabet - 1);
    Word w(len(rng));
    for (SymId& m : w) m = sym(rng);
    return w;
}

}  // namespace nplcs::test
