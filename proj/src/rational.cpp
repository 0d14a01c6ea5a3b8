#include "ocsp/rational.hpp"

#include <cctype>

namespace ocsp {

Rational parse_rational(const std::string& text) {
    if (text.empty()) throw SchemaError("parse_rational: empty string");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        std::string num = text.substr(0, slash);
        std::string den = text.substr(slash + 1);
        if (num.empty() || den.empty()) throw SchemaError("parse_rational: bad fraction '" + text + "'");
        try {
            Rational r{mpz_class(num), mpz_class(den)};
            if (r.get_den() == 0) throw SchemaError("parse_rational: zero denominator in '" + text + "'");
            r.canonicalize();
            return r;
        } catch (const std::invalid_argument&) {
            throw SchemaError("parse_rational: bad fraction '" + text + "'");
        }
    }
    auto dot = text.find('.');
    if (dot != std::string::npos) {
        std::string head = text.substr(0, dot);
        std::string tail = text.substr(dot + 1);
        if (tail.empty()) throw SchemaError("parse_rational: bad decimal '" + text + "'");
        for (char c : tail)
            if (!std::isdigit(static_cast<unsigned char>(c)))
                throw SchemaError("parse_rational: bad decimal '" + text + "'");
        bool neg = !head.empty() && head[0] == '-';
        if (neg || (!head.empty() && head[0] == '+')) head = head.substr(1);
        if (head.empty()) head = "0";
        try {
            mpz_class scale20;
            mpz_ui_pow_ui(scale20.get_mpz_t(), 10, tail.size());
            mpz_class num = mpz_class(head) * scale20 + mpz_class(tail);
            if (neg) num = -num;
            Rational r(num, scale20);
            r.canonicalize();
            return r;
        } catch (const std::invalid_argument&) {
            throw SchemaError("parse_rational: bad decimal '" + text + "'");
        }
    }
    try {
        return Rational(mpz_class(text));
    } catch (const std::invalid_argument&) {
        throw SchemaError("parse_rational: bad number '" + text + "'");
    }
}

std::string format_rational(const Rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

}  // namespace ocsp
