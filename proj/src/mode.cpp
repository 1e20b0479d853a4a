#include "avlc/mode.hpp"

#include "avlc/errors.hpp"

namespace avlc {

std::string to_string(Scheme s) {
    return s == Scheme::sm ? "SM" : "SD";
}

std::string mode_name(const Mode& m) {
    return to_string(m.scheme) + "-" + std::to_string(points(m.order));
}

Mode parse_mode(const std::string& name) {
    for (const Mode& m : all_modes)
        if (mode_name(m) == name) return m;
    throw parameter_error("unknown mode '" + name + "'");
}

}  // namespace avlc
