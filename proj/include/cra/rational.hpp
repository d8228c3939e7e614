#pragma once

#include <gmpxx.h>

#include <compare>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace cra {

// Exact rational number extended with +infinity.
//
// Finite values are kept in lowest terms with positive denominator
// (mpq_class canonical form).  -infinity is not representable: operations
// that would need it (negating infinity, inf - inf, inf * negative) throw
// std::domain_error.  Solvers report diverging minima through their own
// result types instead of a -inf value.
class ExtRational {
public:
    ExtRational() : q_(0) {}
    ExtRational(long n) : q_(n) {}
    ExtRational(int n) : q_(n) {}
    ExtRational(long num, long den);
    explicit ExtRational(mpq_class q);

    static ExtRational infinity();

    bool is_finite() const { return !inf_; }
    bool is_infinite() const { return inf_; }
    bool is_zero() const { return !inf_ && q_ == 0; }
    bool is_integer() const { return !inf_ && q_.get_den() == 1; }
    // -1, 0, +1; infinity counts as positive.
    int sign() const { return inf_ ? 1 : sgn(q_); }

    // Finite payload; must not be called on infinity.
    const mpq_class& value() const;

    ExtRational operator-() const;
    ExtRational& operator+=(const ExtRational& o);
    ExtRational& operator-=(const ExtRational& o);
    ExtRational& operator*=(const ExtRational& o);
    ExtRational& operator/=(const ExtRational& o);

    friend ExtRational operator+(ExtRational a, const ExtRational& b) { return a += b; }
    friend ExtRational operator-(ExtRational a, const ExtRational& b) { return a -= b; }
    friend ExtRational operator*(ExtRational a, const ExtRational& b) { return a *= b; }
    friend ExtRational operator/(ExtRational a, const ExtRational& b) { return a /= b; }

    friend bool operator==(const ExtRational& a, const ExtRational& b);
    friend std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b);

    friend const ExtRational& min(const ExtRational& a, const ExtRational& b) {
        return b < a ? b : a;
    }
    friend const ExtRational& max(const ExtRational& a, const ExtRational& b) {
        return a < b ? b : a;
    }

    // Canonical rendering: "p/q" with q omitted when 1, "inf" for infinity.
    std::string str() const;
    // Accepts "p", "p/q", decimal literals like "0.95", and "inf".
    static std::optional<ExtRational> parse(std::string_view text);

    friend std::ostream& operator<<(std::ostream& os, const ExtRational& r) {
        return os << r.str();
    }

private:
    bool inf_ = false;
    mpq_class q_;
};

}  // namespace cra
