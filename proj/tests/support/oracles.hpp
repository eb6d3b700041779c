#pragma once

// Test-only oracles, kept independent of the library paths they check.

#include <cstdint>
#include <vector>

#include "vault/toy/ec.hpp"

namespace oracles {

// Every affine point satisfying y^2 = x^3 + ax + b (mod p), found by plain
// enumeration of the coordinate grid.
inline std::vector<vault::toy::EcPoint> enumerate_curve_points(const vault::toy::EcCurve& c) {
    std::vector<vault::toy::EcPoint> points;
    for (std::int64_t x = 0; x < c.p; ++x)
        for (std::int64_t y = 0; y < c.p; ++y)
            if ((y * y - (x * x * x + c.a * x + c.b)) % c.p == 0)
                points.push_back(vault::toy::EcPoint::xy(x, y));
    return points;
}

// k*P by k-1 additions; deliberately not double-and-add.
inline vault::toy::EcPoint iterated_mul(std::int64_t k, const vault::toy::EcPoint& p,
                                        const vault::toy::EcCurve& c) {
    vault::toy::EcPoint acc = vault::toy::EcPoint::inf();
    for (std::int64_t i = 0; i < k; ++i) acc = vault::toy::ec_add(acc, p, c);
    return acc;
}

// Brute-force modular inverse by scanning the full residue range.
inline std::int64_t scan_inverse(std::int64_t e, std::int64_t phi) {
    for (std::int64_t d = 1; d < phi; ++d)
        if ((e * d) % phi == 1) return d;
    return -1;
}

// Independent fee arithmetic for cross-checking the ledger's schedule.
inline std::uint64_t fee_by_hand(std::uint64_t gas_price, std::size_t payload_bytes) {
    std::uint64_t gas = 21000;
    for (std::size_t i = 0; i < payload_bytes; ++i) gas += 68;
    return gas_price * gas;
}

}  // namespace oracles
