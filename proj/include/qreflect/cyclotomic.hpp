#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qreflect/rational.hpp"

namespace qreflect {

long gcd_long(long a, long b);
long lcm_long(long a, long b);
long euler_phi(long m);

// Coefficients of the m-th cyclotomic polynomial, ascending degree, monic,
// integer. Cached per order; thread safe.
const std::vector<mpz_class>& cyclotomic_polynomial(long m);

// An element of Q(zeta_M) in the power basis 1, z, ..., z^{phi(M)-1}, kept
// reduced modulo the M-th cyclotomic polynomial. Values are immutable and
// all operations are pure, so concurrent use is safe.
//
// Operations require both operands to live in the same field; callers lift
// explicitly with lift(). There is no silent coercion.
class CycScalar {
public:
    CycScalar() : order_(1), c_(1, Rat(0)) {}

    static CycScalar zero(long m);
    static CycScalar one(long m);
    static CycScalar from_rat(long m, const Rat& r);
    static CycScalar from_long(long m, long v);
    // zeta_m^e; e is reduced mod m.
    static CycScalar zeta(long m, long e);

    long order() const { return order_; }
    const std::vector<Rat>& coeffs() const { return c_; }

    bool is_zero() const;
    bool is_one() const;
    bool is_rational() const;
    std::optional<Rat> as_rational() const;

    CycScalar operator-() const;
    CycScalar operator+(const CycScalar& o) const;
    CycScalar operator-(const CycScalar& o) const;
    CycScalar operator*(const CycScalar& o) const;
    CycScalar operator/(const CycScalar& o) const;
    bool operator==(const CycScalar& o) const;
    bool operator!=(const CycScalar& o) const { return !(*this == o); }

    CycScalar inverse() const;
    CycScalar pow(long e) const;

    // Re-expresses the element in Q(zeta_m2); requires order() | m2.
    CycScalar lift(long m2) const;

    // Multiplicative order when the element is a root of unity (the torsion
    // units of Q(zeta_M) have order dividing lcm(2, M)), absent otherwise.
    std::optional<long> root_order() const;

    // e in [0, M) with *this == zeta(M, e), when such e exists.
    std::optional<long> zeta_exponent() const;

    // Square root of a root of unity. The branch is zeta_M^e -> zeta_{2M}^e
    // with e the canonical exponent in [0, M). Roots of unity that are not
    // powers of zeta_M (only possible for odd M, where -zeta_M^e occurs) land
    // in Q(zeta_{4M}) instead. Throws UserError on non-roots of unity.
    CycScalar sqrt_root() const;

    // Human-readable rendering ("1", "-2/3", "z12^4", or a polynomial in z).
    std::string str() const;
    // Canonical serialization used for hashing and deduplication.
    std::string key() const;

private:
    CycScalar(long m, std::vector<Rat> c) : order_(m), c_(std::move(c)) {}
    void require_same_order(const CycScalar& o) const;

    long order_;
    std::vector<Rat> c_; // size euler_phi(order_)
};

} // namespace qreflect
