#include "perclab/rational.hpp"

#include <cctype>
#include <cmath>

namespace perclab {

Rational make_rational(const BigInt& num, const BigInt& den) {
    if (den == 0) throw invalid_error("rational with zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

namespace {

bool all_digits(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

}  // namespace

Rational parse_rational(const std::string& text) {
    std::string s = text;
    bool neg = false;
    if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
        neg = (s[0] == '-');
        s.erase(0, 1);
    }
    if (s.empty()) throw parse_error("empty probability string");

    Rational q;
    auto slash = s.find('/');
    auto dot = s.find('.');
    if (slash != std::string::npos) {
        std::string num = s.substr(0, slash), den = s.substr(slash + 1);
        if (!all_digits(num) || !all_digits(den))
            throw parse_error("bad rational literal '" + text + "'");
        q = make_rational(BigInt(num), BigInt(den));
    } else if (dot != std::string::npos) {
        std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
        if (ip.empty()) ip = "0";
        if (!all_digits(ip) || (!fp.empty() && !all_digits(fp)))
            throw parse_error("bad decimal literal '" + text + "'");
        BigInt den = 1;
        for (size_t i = 0; i < fp.size(); ++i) den *= 10;
        q = make_rational(BigInt(ip) * den + (fp.empty() ? BigInt(0) : BigInt(fp)), den);
    } else {
        if (!all_digits(s)) throw parse_error("bad integer literal '" + text + "'");
        q = Rational(BigInt(s));
    }
    if (neg) q = -q;
    return q;
}

std::string rational_str(const Rational& q) {
    if (q.get_den() == 1) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

double to_double(const Rational& q) { return q.get_d(); }

Rational rational_from_double(double x, unsigned long max_den) {
    if (!std::isfinite(x)) throw invalid_error("cannot convert non-finite double");
    bool neg = x < 0;
    double v = neg ? -x : x;

    // Continued-fraction convergents p/q until the denominator cap.
    unsigned long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double frac = v;
    Rational best(0);
    for (int it = 0; it < 64; ++it) {
        double fl = std::floor(frac);
        if (fl > 1e18) break;
        unsigned long a = static_cast<unsigned long>(fl);
        unsigned long p2 = a * p1 + p0, q2 = a * q1 + q0;
        if (q2 > max_den || q2 == 0) break;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        best = make_rational(BigInt(p1), BigInt(q1));
        double rem = frac - fl;
        if (rem < 1e-15) break;
        frac = 1.0 / rem;
    }
    if (q1 == 0) best = Rational(static_cast<long>(std::llround(v)));
    return neg ? Rational(-best) : best;
}

}  // namespace perclab
