#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace nplcs {

/// Exact rational number. All probabilities on the verdict side are exact;
/// doubles appear only inside the simulator.
using Rat = mpq_class;

inline Rat rat(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline Rat rat_pow(const Rat& base, unsigned long exp) {
    Rat out(1);
    mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), exp);
    mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), exp);
    out.canonicalize();
    return out;
}

inline double rat_to_double(const Rat& r) { return r.get_d(); }

/// Parses "p/q" or "p". Throws std::invalid_argument on malformed input.
inline Rat parse_rat(const std::string& text) {
    Rat r;
    if (r.set_str(text, 10) != 0) throw std::invalid_argument("malformed rational: " + text);
    r.canonicalize();
    return r;
}

inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

}  // namespace nplcs
