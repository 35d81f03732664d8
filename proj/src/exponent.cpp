#include "mixnorm/exponent.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace mixnorm {

std::optional<Exponent> Exponent::parse(std::string_view text) {
    std::string lowered(text);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lowered == "inf" || lowered == "infinity") return Exponent::infinity();

    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) return std::nullopt;
    if (!(value > 0.0) || !std::isfinite(value)) return std::nullopt;
    return Exponent(value);
}

std::string Exponent::to_string() const {
    if (infinite_) return "inf";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value_);
    return std::string(buf, ptr);
}

}  // namespace mixnorm
