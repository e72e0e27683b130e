#include "ffrank/gf.hpp"

#include <algorithm>
#include <numeric>

namespace ffrank {
namespace {

using Poly = std::vector<std::uint16_t>; // coefficients, lowest degree first

int degree(const Poly& f) {
    for (int i = static_cast<int>(f.size()) - 1; i >= 0; --i)
        if (f[static_cast<std::size_t>(i)] != 0) return i;
    return -1;
}

Poly poly_from_repr(std::uint32_t v, std::uint32_t p, std::uint32_t len) {
    Poly f(len, 0);
    for (std::uint32_t i = 0; i < len && v != 0; ++i) {
        f[i] = static_cast<std::uint16_t>(v % p);
        v /= p;
    }
    return f;
}

std::uint32_t repr_from_poly(const Poly& f, std::uint32_t p) {
    std::uint32_t v = 0;
    for (std::size_t i = f.size(); i-- > 0;) v = v * p + f[i];
    return v;
}

// Remainder of a mod b over GF(p); b must be nonzero with invertible
// leading coefficient (we only divide by monic b here).
Poly poly_mod(Poly a, const Poly& b, std::uint32_t p) {
    const int db = degree(b);
    for (int da = degree(a); da >= db; da = degree(a)) {
        // b is monic, so the quotient digit is just the leading coefficient.
        const std::uint32_t c = a[static_cast<std::size_t>(da)];
        for (int i = 0; i <= db; ++i) {
            auto& ai = a[static_cast<std::size_t>(da - db + i)];
            ai = static_cast<std::uint16_t>(
                (ai + p * c - c * b[static_cast<std::size_t>(i)] % p) % p);
        }
    }
    return a;
}

Poly poly_mul_mod(const Poly& a, const Poly& b, const Poly& modulus, std::uint32_t p) {
    Poly prod(a.size() + b.size(), 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            prod[i + j] = static_cast<std::uint16_t>((prod[i + j] + a[i] * b[j]) % p);
        }
    }
    Poly r = poly_mod(std::move(prod), modulus, p);
    r.resize(modulus.size() - 1); // remainder degree < deg(modulus)
    return r;
}

bool is_irreducible(const Poly& f, std::uint32_t p) {
    const int d = degree(f);
    if (d < 1) return false;
    if (f[0] == 0) return d == 1; // x divides f
    // Trial division by every monic polynomial of degree 1..d/2.
    for (int dd = 1; 2 * dd <= d; ++dd) {
        std::uint64_t count = 1;
        for (int i = 0; i < dd; ++i) count *= p;
        for (std::uint64_t v = 0; v < count; ++v) {
            Poly g = poly_from_repr(static_cast<std::uint32_t>(v), p,
                                    static_cast<std::uint32_t>(dd) + 1);
            g[static_cast<std::size_t>(dd)] = 1;
            if (degree(poly_mod(f, g, p)) < 0) return false;
        }
    }
    return true;
}

std::vector<std::uint32_t> prime_factors(std::uint32_t n) {
    std::vector<std::uint32_t> fs;
    for (std::uint32_t f = 2; f * f <= n; ++f) {
        if (n % f == 0) {
            fs.push_back(f);
            while (n % f == 0) n /= f;
        }
    }
    if (n > 1) fs.push_back(n);
    return fs;
}

std::uint32_t mod_pow(std::uint64_t a, std::uint64_t n, std::uint64_t p) {
    std::uint64_t r = 1 % p;
    a %= p;
    while (n != 0) {
        if (n & 1) r = r * a % p;
        a = a * a % p;
        n >>= 1;
    }
    return static_cast<std::uint32_t>(r);
}

} // namespace

Field::Field(std::uint32_t q) {
    if (q < 2 || q > 65536) throw NotAPrimePower("q must be a prime power in [2, 2^16]");
    std::uint32_t p = 0;
    for (std::uint32_t f = 2; f * f <= q; ++f) {
        if (q % f == 0) {
            p = f;
            break;
        }
    }
    if (p == 0) p = q; // q itself prime
    std::uint32_t e = 0, rest = q;
    while (rest % p == 0) {
        rest /= p;
        ++e;
    }
    if (rest != 1) throw NotAPrimePower("q has more than one prime factor");

    auto body = std::make_shared<Body>();
    body->q = q;
    body->p = p;
    body->e = e;

    if (e > 1) {
        // Smallest monic irreducible of degree e, ordered by the integer
        // encoding of the low coefficients.
        Poly modulus;
        std::uint64_t span = 1;
        for (std::uint32_t i = 0; i < e; ++i) span *= p;
        for (std::uint64_t v = 0; v < span; ++v) {
            Poly cand = poly_from_repr(static_cast<std::uint32_t>(v), p, e + 1);
            cand[e] = 1;
            if (is_irreducible(cand, p)) {
                modulus = std::move(cand);
                break;
            }
        }
        body->modulus = modulus;

        // Find a multiplicative generator, then fill log/antilog tables.
        const auto factors = prime_factors(q - 1);
        auto elem_pow = [&](std::uint32_t base, std::uint32_t n) {
            Poly acc{1};
            Poly b = poly_from_repr(base, p, e);
            while (n != 0) {
                if (n & 1) acc = poly_mul_mod(acc, b, modulus, p);
                b = poly_mul_mod(b, b, modulus, p);
                n >>= 1;
            }
            return repr_from_poly(acc, p);
        };
        std::uint32_t gen = 0;
        for (std::uint32_t g = 2; g < q; ++g) {
            bool primitive = true;
            for (std::uint32_t f : factors) {
                if (elem_pow(g, (q - 1) / f) == 1) {
                    primitive = false;
                    break;
                }
            }
            if (primitive) {
                gen = g;
                break;
            }
        }

        body->exp.assign(2 * (q - 1), 0);
        body->log.assign(q, 0);
        Poly acc{1};
        const Poly gpoly = poly_from_repr(gen, p, e);
        for (std::uint32_t i = 0; i < q - 1; ++i) {
            const std::uint32_t r = repr_from_poly(acc, p);
            body->exp[i] = static_cast<std::uint16_t>(r);
            body->exp[i + (q - 1)] = static_cast<std::uint16_t>(r);
            body->log[r] = static_cast<std::uint16_t>(i);
            acc = poly_mul_mod(acc, gpoly, modulus, p);
        }
    }
    body_ = std::move(body);
}

FieldElement Field::add(FieldElement a, FieldElement b) const noexcept {
    const auto& f = *body_;
    if (f.e == 1) return {static_cast<std::uint16_t>((a.repr + b.repr) % f.p)};
    if (f.p == 2) return {static_cast<std::uint16_t>(a.repr ^ b.repr)};
    std::uint32_t x = a.repr, y = b.repr, r = 0, place = 1;
    while (x != 0 || y != 0) {
        r += (x % f.p + y % f.p) % f.p * place;
        x /= f.p;
        y /= f.p;
        place *= f.p;
    }
    return {static_cast<std::uint16_t>(r)};
}

FieldElement Field::neg(FieldElement a) const noexcept {
    const auto& f = *body_;
    if (f.e == 1) return {static_cast<std::uint16_t>((f.p - a.repr) % f.p)};
    if (f.p == 2) return a;
    std::uint32_t x = a.repr, r = 0, place = 1;
    while (x != 0) {
        r += (f.p - x % f.p) % f.p * place;
        x /= f.p;
        place *= f.p;
    }
    return {static_cast<std::uint16_t>(r)};
}

FieldElement Field::sub(FieldElement a, FieldElement b) const noexcept {
    return add(a, neg(b));
}

FieldElement Field::mul(FieldElement a, FieldElement b) const noexcept {
    const auto& f = *body_;
    if (a.repr == 0 || b.repr == 0) return {0};
    if (f.e == 1)
        return {static_cast<std::uint16_t>(
            static_cast<std::uint32_t>(a.repr) * b.repr % f.p)};
    return {f.exp[static_cast<std::uint32_t>(f.log[a.repr]) + f.log[b.repr]]};
}

FieldElement Field::inverse(FieldElement a) const {
    const auto& f = *body_;
    if (a.repr == 0) throw DivisionByZero("inverse of zero");
    if (f.e == 1) return {static_cast<std::uint16_t>(mod_pow(a.repr, f.p - 2, f.p))};
    return {f.exp[(f.q - 1) - f.log[a.repr]]};
}

FieldElement Field::div(FieldElement a, FieldElement b) const {
    if (b.repr == 0) throw DivisionByZero("division by zero");
    return mul(a, inverse(b));
}

FieldElement Field::pow(FieldElement a, std::uint64_t n) const noexcept {
    FieldElement r = one();
    FieldElement base = a;
    while (n != 0) {
        if (n & 1) r = mul(r, base);
        base = mul(base, base);
        n >>= 1;
    }
    return r;
}

} // namespace ffrank
