#pragma once

#include <cstdint>
#include <string_view>

namespace ltc
{

// Three-valued truth. The enumerator order is the truth order f < u < t.
enum class TruthValue : std::uint8_t
{
    False = 0,
    Unknown = 1,
    True = 2,
};

constexpr TruthValue from_bool( bool b ) noexcept
{
    return b ? TruthValue::True : TruthValue::False;
}

constexpr TruthValue inverse( TruthValue v ) noexcept
{
    switch ( v )
    {
    case TruthValue::False:
        return TruthValue::True;
    case TruthValue::True:
        return TruthValue::False;
    default:
        return TruthValue::Unknown;
    }
}

// Conjunction / minimum in the truth order.
constexpr TruthValue meet( TruthValue a, TruthValue b ) noexcept
{
    return a < b ? a : b;
}

// Disjunction / maximum in the truth order.
constexpr TruthValue join( TruthValue a, TruthValue b ) noexcept
{
    return a < b ? b : a;
}

constexpr bool truth_leq( TruthValue a, TruthValue b ) noexcept
{
    return a <= b;
}

// u <=p t, u <=p f, and reflexivity. t and f are incomparable.
constexpr bool precision_leq( TruthValue a, TruthValue b ) noexcept
{
    return a == TruthValue::Unknown || a == b;
}

constexpr bool is_known( TruthValue v ) noexcept
{
    return v != TruthValue::Unknown;
}

constexpr std::string_view to_string( TruthValue v ) noexcept
{
    switch ( v )
    {
    case TruthValue::False:
        return "f";
    case TruthValue::True:
        return "t";
    default:
        return "u";
    }
}

} // namespace ltc
