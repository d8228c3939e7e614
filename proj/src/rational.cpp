#include "cra/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace cra {

ExtRational::ExtRational(long num, long den) : q_(num, den) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    q_.canonicalize();
}

ExtRational::ExtRational(mpq_class q) : q_(std::move(q)) {
    q_.canonicalize();
}

ExtRational ExtRational::infinity() {
    ExtRational r;
    r.inf_ = true;
    return r;
}

const mpq_class& ExtRational::value() const {
    if (inf_) throw std::domain_error("value() on infinity");
    return q_;
}

ExtRational ExtRational::operator-() const {
    if (inf_) throw std::domain_error("negation of infinity");
    ExtRational r;
    r.q_ = -q_;
    return r;
}

ExtRational& ExtRational::operator+=(const ExtRational& o) {
    if (inf_ || o.inf_) {
        inf_ = true;
        q_ = 0;
    } else {
        q_ += o.q_;
    }
    return *this;
}

ExtRational& ExtRational::operator-=(const ExtRational& o) {
    if (o.inf_) throw std::domain_error("subtraction of infinity");
    if (!inf_) q_ -= o.q_;
    return *this;
}

ExtRational& ExtRational::operator*=(const ExtRational& o) {
    if (inf_ || o.inf_) {
        // 0 * inf = 0; inf * negative would be -inf, which is unrepresentable.
        const ExtRational& fin = inf_ ? o : *this;
        if (fin.is_finite() && fin.q_ == 0) {
            inf_ = false;
            q_ = 0;
            return *this;
        }
        if (fin.is_finite() && fin.q_ < 0)
            throw std::domain_error("infinity times negative");
        inf_ = true;
        q_ = 0;
        return *this;
    }
    q_ *= o.q_;
    return *this;
}

ExtRational& ExtRational::operator/=(const ExtRational& o) {
    if (o.inf_ || o.q_ == 0) throw std::domain_error("division by zero or infinity");
    if (!inf_) {
        q_ /= o.q_;
    } else if (o.q_ < 0) {
        throw std::domain_error("infinity divided by negative");
    }
    return *this;
}

bool operator==(const ExtRational& a, const ExtRational& b) {
    if (a.inf_ || b.inf_) return a.inf_ && b.inf_;
    return a.q_ == b.q_;
}

std::strong_ordering operator<=>(const ExtRational& a, const ExtRational& b) {
    if (a.inf_ && b.inf_) return std::strong_ordering::equal;
    if (a.inf_) return std::strong_ordering::greater;
    if (b.inf_) return std::strong_ordering::less;
    int c = cmp(a.q_, b.q_);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::string ExtRational::str() const {
    if (inf_) return "inf";
    if (q_.get_den() == 1) return q_.get_num().get_str();
    return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

std::optional<ExtRational> ExtRational::parse(std::string_view text) {
    if (text.empty()) return std::nullopt;
    if (text == "inf" || text == "+inf" || text == "infinity") return infinity();

    std::string s(text);
    auto dot = s.find('.');
    try {
        if (dot != std::string::npos) {
            std::string digits = s.substr(0, dot) + s.substr(dot + 1);
            size_t frac_len = s.size() - dot - 1;
            if (frac_len == 0 || digits.empty()) return std::nullopt;
            for (size_t i = 0; i < digits.size(); ++i) {
                if (i == 0 && (digits[i] == '-' || digits[i] == '+')) continue;
                if (!std::isdigit(static_cast<unsigned char>(digits[i]))) return std::nullopt;
            }
            mpz_class num(digits, 10), den(1);
            for (size_t i = 0; i < frac_len; ++i) den *= 10;
            mpq_class q(num, den);
            q.canonicalize();
            return ExtRational(q);
        }
        mpq_class q(s, 10);  // explicit base: leading zeros must not mean octal
        if (q.get_den() == 0) return std::nullopt;
        q.canonicalize();
        return ExtRational(q);
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

}  // namespace cra
