#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "ffrank/errors.hpp"
#include "ffrank/rng.hpp"

namespace ffrank {

/// Element of GF(q), encoded as the integer sum c_i * p^i of its polynomial
/// coefficients over GF(p). 0 is the additive, 1 the multiplicative identity.
/// For q = 2 the representation is a single bit (contract used by the
/// bit-packed linear algebra path).
struct FieldElement {
    std::uint16_t repr = 0;
    friend constexpr bool operator==(FieldElement, FieldElement) = default;
};

/// GF(q) for a prime power q = p^e, 2 <= q <= 2^16.
///
/// Extension fields are F_p[x] modulo the smallest monic irreducible
/// polynomial of degree e (smallest in the integer encoding of its
/// coefficients), so construction is deterministic across runs. Multiplication
/// and division go through discrete log/antilog tables built at construction;
/// elimination inner loops are two table lookups per product.
///
/// Immutable after construction and cheap to copy (shared internals), safe to
/// share across threads.
class Field {
public:
    explicit Field(std::uint32_t q);

    std::uint32_t q() const noexcept { return body_->q; }
    std::uint32_t characteristic() const noexcept { return body_->p; }
    std::uint32_t extension_degree() const noexcept { return body_->e; }
    /// Modulus coefficients, lowest degree first, length e+1 for e > 1.
    /// Empty for prime fields.
    const std::vector<std::uint16_t>& modulus() const noexcept { return body_->modulus; }

    FieldElement zero() const noexcept { return {0}; }
    FieldElement one() const noexcept { return {1}; }

    /// Checked construction from an integer representation.
    FieldElement element(std::uint32_t repr) const {
        if (repr >= body_->q) throw DomainError("element representation out of range");
        return {static_cast<std::uint16_t>(repr)};
    }

    FieldElement add(FieldElement a, FieldElement b) const noexcept;
    FieldElement sub(FieldElement a, FieldElement b) const noexcept;
    FieldElement neg(FieldElement a) const noexcept;
    FieldElement mul(FieldElement a, FieldElement b) const noexcept;
    FieldElement div(FieldElement a, FieldElement b) const;
    FieldElement inverse(FieldElement a) const;
    FieldElement pow(FieldElement a, std::uint64_t n) const noexcept;

    template <class G>
    FieldElement uniform_element(G& rng) const {
        return {static_cast<std::uint16_t>(bounded_uniform(rng, body_->q))};
    }

    template <class G>
    FieldElement uniform_nonzero(G& rng) const {
        return {static_cast<std::uint16_t>(1 + bounded_uniform(rng, body_->q - 1))};
    }

    friend bool operator==(const Field& a, const Field& b) noexcept {
        return a.body_->q == b.body_->q;
    }

private:
    struct Body {
        std::uint32_t q = 0, p = 0, e = 0;
        std::vector<std::uint16_t> modulus; // low-to-high, empty for e == 1
        std::vector<std::uint16_t> exp;     // size 2(q-1), exp[i] = g^i, for e > 1
        std::vector<std::uint16_t> log;     // size q, defined for nonzero reprs
    };
    std::shared_ptr<const Body> body_;
};

} // namespace ffrank
