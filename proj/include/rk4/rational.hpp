#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace rk4 {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt pow_big(const BigInt& base, unsigned exp)
{
    return boost::multiprecision::pow(base, exp);
}

inline Rational pow2_rational(long e)
{
    BigInt one = 1;
    if (e >= 0) return Rational(one << static_cast<unsigned>(e));
    return Rational(one, one << static_cast<unsigned>(-e));
}

inline double to_double(const Rational& r)
{
    return r.convert_to<double>();
}

inline long double to_long_double(const Rational& r)
{
    return r.convert_to<long double>();
}

inline std::string to_string(const Rational& r)
{
    return r.str();
}

}  // namespace rk4
