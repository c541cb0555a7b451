#pragma once

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <cstdint>
#include <ios>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>

#include "error.hpp"

namespace qsl {

// Fixed-precision MPFR real. The backend counts decimal digits, so Bits is
// rounded to the nearest digit count that still gives at least Bits bits.
template <unsigned Bits>
using real = boost::multiprecision::number<
    boost::multiprecision::mpfr_float_backend<Bits * 30103u / 100000u>,
    boost::multiprecision::et_off>;

using real128 = real<128>;
using real256 = real<256>;
using real512 = real<512>;
using real1024 = real<1024>;

template <class T>
constexpr int precision_bits()
{
    return std::numeric_limits<T>::digits;
}

template <class T>
T pi()
{
    return boost::math::constants::pi<T>();
}

template <class T>
T two_pi()
{
    return boost::math::constants::two_pi<T>();
}

template <class T>
T half_pi()
{
    return boost::math::constants::half_pi<T>();
}

template <class T>
T pow2(int e)
{
    using std::ldexp;
    return ldexp(T(1), e);
}

template <class T>
T half_precision_tol()
{
    return pow2<T>(-precision_bits<T>() / 2);
}

template <class T>
T quarter_precision_tol()
{
    return pow2<T>(-precision_bits<T>() / 4);
}

template <class T>
double to_double(const T& x)
{
    return static_cast<double>(x);
}

template <class U, class T>
U convert(const T& x)
{
    if constexpr (std::is_same_v<U, T>)
        return x;
    else if constexpr (std::is_floating_point_v<T>)
        return U(x);
    else if constexpr (std::is_floating_point_v<U>)
        return static_cast<U>(x);
    else
        return U(x.str(0, std::ios_base::scientific));
}

// Shortest decimal that reads back to the same value.
template <class T>
std::string to_decimal(const T& x)
{
    if constexpr (std::is_floating_point_v<T>) {
        std::ostringstream os;
        os.precision(std::numeric_limits<T>::max_digits10);
        os << x;
        return os.str();
    } else {
        return x.str(0, std::ios_base::scientific);
    }
}

// Decimal with a fixed number of significant digits.
template <class T>
std::string to_decimal(const T& x, int digits)
{
    std::ostringstream os;
    os.precision(digits - 1);
    os << std::scientific << x;
    return os.str();
}

template <class T>
T from_decimal(std::string_view s)
{
    std::string str(s);
    if (str.empty())
        throw parse_error("empty number");
    try {
        if constexpr (std::is_floating_point_v<T>) {
            std::size_t used = 0;
            T v = static_cast<T>(std::stold(str, &used));
            if (used != str.size())
                throw parse_error("trailing characters in number: " + str);
            return v;
        } else {
            T v;
            v.backend() = str.c_str();
            return v;
        }
    } catch (const parse_error&) {
        throw;
    } catch (const std::exception&) {
        throw parse_error("not a number: " + str);
    }
}

template <class T>
bool is_integer(const T& x)
{
    using std::floor;
    return floor(x) == x;
}

} // namespace qsl
