#pragma once

#include <array>
#include <string>

#include "avlc/modem.hpp"

namespace avlc {

/// SM: each LED sends its own stream. SD: both LEDs repeat one stream.
enum class Scheme { sm, sd };

std::string to_string(Scheme s);

/// One of the eight link-adaptation modes.
struct Mode {
    Scheme scheme = Scheme::sm;
    QamOrder order = QamOrder::qam64;

    int streams() const { return scheme == Scheme::sm ? 2 : 1; }
    /// b/s/Hz: streams * log2(M).
    double efficiency() const { return streams() * bits_per_symbol(order); }
    int bits_per_channel_use() const { return streams() * bits_per_symbol(order); }

    friend bool operator==(const Mode&, const Mode&) = default;
};

/// Listed in mode-code order (SD-4 ... SM-256).
inline constexpr std::array<Mode, 8> all_modes{{
    {Scheme::sd, QamOrder::qam4},
    {Scheme::sd, QamOrder::qam16},
    {Scheme::sd, QamOrder::qam64},
    {Scheme::sd, QamOrder::qam256},
    {Scheme::sm, QamOrder::qam4},
    {Scheme::sm, QamOrder::qam16},
    {Scheme::sm, QamOrder::qam64},
    {Scheme::sm, QamOrder::qam256},
}};

/// "SM-64", "SD-256", ...
std::string mode_name(const Mode& m);
/// Inverse of mode_name; throws parameter_error.
Mode parse_mode(const std::string& name);

}  // namespace avlc
