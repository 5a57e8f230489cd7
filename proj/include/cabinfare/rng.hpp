#pragma once

// Deterministic keyed random streams. Every consumer derives its own stream
// from a mix of the master seed and structural indices (route, flight,
// passenger, ...), so generation order and parallelism cannot change any draw.

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace cabinfare {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

// order-sensitive mix of integer key parts
inline std::uint64_t mix_key(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x6c62272e07bb0142ULL;
    for (std::uint64_t p : parts) {
        h ^= p;
        detail::splitmix64(h);
        h = detail::splitmix64(h);
    }
    return h;
}

inline std::uint64_t hash_str(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

class KeyedRng {
public:
    explicit KeyedRng(std::uint64_t key) : state_(key) {
        // burn one step so nearby keys do not yield nearby first outputs
        detail::splitmix64(state_);
    }

    KeyedRng sub(std::uint64_t tag) const { return KeyedRng(mix_key({state_, tag})); }

    std::uint64_t next_u64() { return detail::splitmix64(state_); }

    // uniform in [0, 1)
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n), n >= 1 (Lemire multiply-shift; one draw each)
    long next_below(long n) {
        return static_cast<long>((static_cast<unsigned __int128>(next_u64()) *
                                  static_cast<unsigned __int128>(n)) >>
                                 64);
    }

    // standard normal, Box-Muller with a cached spare
    double next_normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - next_double();  // (0, 1]
        double u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 2.0 * M_PI * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // double-exponential with scale b (inverse CDF)
    double next_laplace(double b) {
        double u = next_double() - 0.5;
        double m = 1.0 - 2.0 * std::fabs(u);
        if (m <= 0.0) m = 0x1.0p-53;
        return (u < 0 ? b : -b) * std::log(m);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace cabinfare
