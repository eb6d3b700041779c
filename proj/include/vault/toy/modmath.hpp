#pragma once

#include <cstdint>

#include "vault/error.hpp"

namespace vault::toy {

using Int = std::int64_t;

// Always in [0, m), unlike operator% for negative operands.
inline Int mod_floor(Int x, Int m) {
    Int r = x % m;
    return r < 0 ? r + m : r;
}

inline Int gcd(Int a, Int b) {
    while (b != 0) {
        Int t = a % b;
        a = b;
        b = t;
    }
    return a < 0 ? -a : a;
}

// Extended Euclid. Returns x with (a*x) mod m = 1; throws if gcd(a, m) != 1.
inline Int mod_inverse(Int a, Int m) {
    Int old_r = mod_floor(a, m), r = m;
    Int old_s = 1, s = 0;
    while (r != 0) {
        Int q = old_r / r;
        Int tr = old_r - q * r;
        old_r = r;
        r = tr;
        Int ts = old_s - q * s;
        old_s = s;
        s = ts;
    }
    if (old_r != 1) raise(Errc::exponent_not_coprime, "no modular inverse exists");
    return mod_floor(old_s, m);
}

inline Int mod_pow(Int base, Int exp, Int m) {
    if (m <= 0) raise(Errc::malformed_input, "modulus must be positive");
    __int128 result = 1;
    __int128 b = mod_floor(base, m);
    while (exp > 0) {
        if (exp & 1) result = (result * b) % m;
        b = (b * b) % m;
        exp >>= 1;
    }
    return static_cast<Int>(result);
}

inline bool is_prime(Int n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (Int d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

}  // namespace vault::toy
