#pragma once

#include <optional>
#include <random>

#include "cra/semantics.hpp"
#include "fixtures.hpp"

namespace cra::testing {

inline ExtRational R(long n) { return ExtRational(n); }
inline ExtRational R(long n, long d) { return ExtRational(n, d); }
inline const ExtRational INF = ExtRational::infinity();

inline Word W(const std::string& chars) { return fixtures::make_word(chars); }

inline std::optional<ExtRational> evalv(const Cra& m, const std::string& word) {
    return eval_cra(m, W(word)).value;
}

}  // namespace cra::testing
