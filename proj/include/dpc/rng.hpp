#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace dpc {

/// Named random streams. Each (master seed, trial, purpose, attempt) tuple maps
/// to an independent engine so results do not depend on the thread schedule.
enum class stream : std::uint64_t {
    interferers = 1,
    reference = 2,
    selection = 3,
    receiver = 4,
    auxiliary = 5,
};

using engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t trial, stream purpose,
                                 std::uint64_t attempt = 0) {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ trial);
    h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
    return splitmix64(h ^ (attempt * 0xd1b54a32d192ed03ULL));
}

inline engine make_engine(std::uint64_t master, std::uint64_t trial, stream purpose,
                          std::uint64_t attempt = 0) {
    return engine(stream_seed(master, trial, purpose, attempt));
}

/// Uniform double in [0, 1) built from the top 53 bits.
template <class URBG>
double uniform01(URBG& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Unit-mean exponential draw.
template <class URBG>
double exponential1(URBG& g) {
    return -std::log1p(-uniform01(g));
}

} // namespace dpc
