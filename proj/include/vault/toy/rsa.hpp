#pragma once

#include "vault/toy/modmath.hpp"

namespace vault::toy {

// Small-integer RSA for worked examples and known-answer tests. The production
// envelope layer lives elsewhere; nothing here is sized for real use.
struct ToyRsaKeypair {
    Int p;
    Int q;
    Int n;
    Int phi;
    Int e;
    Int d;
};

inline ToyRsaKeypair rsa_keygen(Int p, Int q, Int e) {
    if (!is_prime(p)) raise(Errc::not_prime, "p is not prime");
    if (!is_prime(q)) raise(Errc::not_prime, "q is not prime");
    if (p == q) raise(Errc::malformed_input, "p and q must differ");
    Int phi = (p - 1) * (q - 1);
    if (e <= 1 || e >= phi || gcd(e, phi) != 1)
        raise(Errc::exponent_not_coprime, "e must satisfy 1 < e < phi with gcd(e, phi) = 1");
    Int d = mod_inverse(e, phi);
    return ToyRsaKeypair{p, q, p * q, phi, e, d};
}

inline Int rsa_encrypt(Int m, Int n, Int e) {
    if (m < 0 || m >= n) raise(Errc::message_out_of_range, "message must lie in [0, n)");
    return mod_pow(m, e, n);
}

inline Int rsa_decrypt(Int c, Int n, Int d) {
    if (c < 0 || c >= n) raise(Errc::message_out_of_range, "ciphertext must lie in [0, n)");
    return mod_pow(c, d, n);
}

}  // namespace vault::toy
