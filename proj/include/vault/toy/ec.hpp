#pragma once

#include "vault/toy/modmath.hpp"

namespace vault::toy {

// Affine point with the identity as a distinct variant, so (0, 0) stays a
// legal curve point on curves that contain it.
struct EcPoint {
    bool infinity = true;
    Int x = 0;
    Int y = 0;

    static EcPoint inf() { return EcPoint{}; }
    static EcPoint xy(Int x, Int y) { return EcPoint{false, x, y}; }

    friend bool operator==(const EcPoint& a, const EcPoint& b) {
        if (a.infinity || b.infinity) return a.infinity == b.infinity;
        return a.x == b.x && a.y == b.y;
    }
};

// Short Weierstrass curve y^2 = x^3 + ax + b over F_p with generator g of order n.
struct EcCurve {
    Int a;
    Int b;
    Int p;
    EcPoint g;
    Int n;

    bool nonsingular() const {
        return mod_floor(4 * a * a * a + 27 * b * b, p) != 0;
    }

    bool contains(const EcPoint& pt) const {
        if (pt.infinity) return true;
        if (pt.x < 0 || pt.x >= p || pt.y < 0 || pt.y >= p) return false;
        return mod_floor(pt.y * pt.y - (pt.x * pt.x * pt.x + a * pt.x + b), p) == 0;
    }
};

// Small enough for exhaustive checks, large enough that the group law is not
// degenerate: 19 points including the identity.
inline EcCurve demo_curve() {
    return EcCurve{2, 2, 17, EcPoint::xy(5, 1), 19};
}

inline void require_on_curve(const EcPoint& pt, const EcCurve& c) {
    if (!c.contains(pt)) raise(Errc::point_not_on_curve, "point fails the curve equation");
}

// Chord-tangent group law: doubling slope (3x^2 + a) / (2y), vertical lines
// meet at the identity.
inline EcPoint ec_add(const EcPoint& lhs, const EcPoint& rhs, const EcCurve& c) {
    require_on_curve(lhs, c);
    require_on_curve(rhs, c);
    if (lhs.infinity) return rhs;
    if (rhs.infinity) return lhs;
    if (lhs.x == rhs.x && mod_floor(lhs.y + rhs.y, c.p) == 0) return EcPoint::inf();

    Int slope;
    if (lhs == rhs) {
        slope = mod_floor((3 * lhs.x * lhs.x + c.a) * mod_inverse(2 * lhs.y, c.p), c.p);
    } else {
        slope = mod_floor((rhs.y - lhs.y) * mod_inverse(mod_floor(rhs.x - lhs.x, c.p), c.p), c.p);
    }
    Int x3 = mod_floor(slope * slope - lhs.x - rhs.x, c.p);
    Int y3 = mod_floor(slope * (lhs.x - x3) - lhs.y, c.p);
    return EcPoint::xy(x3, y3);
}

// Double-and-add.
inline EcPoint ec_mul(Int k, EcPoint pt, const EcCurve& c) {
    require_on_curve(pt, c);
    if (k < 0) raise(Errc::scalar_out_of_range, "scalar must be non-negative");
    EcPoint acc = EcPoint::inf();
    while (k > 0) {
        if (k & 1) acc = ec_add(acc, pt, c);
        pt = ec_add(pt, pt, c);
        k >>= 1;
    }
    return acc;
}

inline EcPoint ecdh_shared(Int d_self, const EcPoint& peer_public, const EcCurve& c) {
    if (d_self < 1 || d_self >= c.n) raise(Errc::scalar_out_of_range, "private scalar out of range");
    require_on_curve(peer_public, c);
    return ec_mul(d_self, peer_public, c);
}

struct EcCiphertext {
    EcPoint c1;  // k*G
    EcPoint c2;  // Pm + k*PB
};

inline EcCiphertext ecelgamal_encrypt(const EcPoint& message, const EcPoint& recipient_public,
                                      Int k, const EcCurve& c) {
    require_on_curve(message, c);
    require_on_curve(recipient_public, c);
    if (k < 1 || k >= c.n) raise(Errc::scalar_out_of_range, "ephemeral scalar out of range");
    return EcCiphertext{ec_mul(k, c.g, c), ec_add(message, ec_mul(k, recipient_public, c), c)};
}

// Pm = c2 - nB*c1.
inline EcPoint ecelgamal_decrypt(const EcCiphertext& ct, Int recipient_private,
                                 const EcCurve& c) {
    require_on_curve(ct.c1, c);
    require_on_curve(ct.c2, c);
    EcPoint shared = ec_mul(recipient_private, ct.c1, c);
    EcPoint negated = shared.infinity ? shared : EcPoint::xy(shared.x, mod_floor(-shared.y, c.p));
    return ec_add(ct.c2, negated, c);
}

}  // namespace vault::toy
