#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace perclab {

// All probability arithmetic in the library is exact; floats appear only at
// reporting boundaries.
using Rational = mpq_class;
using BigInt = mpz_class;

enum class ErrorKind { Parse, Invalid, Cap };

struct Error : std::runtime_error {
    ErrorKind kind;
    Error(ErrorKind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

inline Error parse_error(const std::string& msg) { return Error(ErrorKind::Parse, msg); }
inline Error invalid_error(const std::string& msg) { return Error(ErrorKind::Invalid, msg); }
inline Error cap_error(const std::string& msg) { return Error(ErrorKind::Cap, msg); }

/// num/den in canonical form; den must be nonzero.
Rational make_rational(const BigInt& num, const BigInt& den);

/// Accepts "3", "-3", "1/2", "0.32537" (exact decimal), with optional sign.
Rational parse_rational(const std::string& text);

/// "n/d", or "n" when the denominator is 1.
std::string rational_str(const Rational& q);

double to_double(const Rational& q);

/// Best rational approximation with denominator <= max_den (continued
/// fractions). Used to snap optimizer floats onto exact probabilities.
Rational rational_from_double(double x, unsigned long max_den = 1000000);

inline bool is_probability(const Rational& q) { return q >= 0 && q <= 1; }

}  // namespace perclab
