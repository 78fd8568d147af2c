#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace treelab {

inline constexpr const char* kVersion = "0.1.0";

// Signed 128-bit accumulator for the exact integer identities; power sums
// of subtree sizes overflow 64 bits already for k >= 3 at moderate sizes.
using wide_int = __int128;

inline std::string to_string(wide_int v) {
    if (v == 0) return "0";
    bool neg = v < 0;
    unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : v;
    std::string s;
    while (u > 0) {
        s.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (neg) s.push_back('-');
    return {s.rbegin(), s.rend()};
}

struct MalformedDegreeSequence : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IndexOutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SingleNodeTree : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseError : std::runtime_error {
    std::size_t offset;
    ParseError(const std::string& what, std::size_t byte_offset)
        : std::runtime_error(what + " (byte " + std::to_string(byte_offset) + ")"),
          offset(byte_offset) {}
};
struct NonGenericWeights : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DivergentSeries : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InfeasibleSize : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct RejectionBudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TollUndefined : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NotFullBinary : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct KTooLarge : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OutOfDomain : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BetaOutOfRange : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParameterDomain : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct DegenerateArgmin : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace treelab
