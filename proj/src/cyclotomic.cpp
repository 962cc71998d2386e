#include "qreflect/cyclotomic.hpp"

#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

#include "qreflect/errors.hpp"

namespace qreflect {

long gcd_long(long a, long b) {
    return std::gcd(a, b);
}

long lcm_long(long a, long b) {
    return std::lcm(a, b);
}

long euler_phi(long m) {
    long result = m, x = m;
    for (long p = 2; p * p <= x; ++p) {
        if (x % p == 0) {
            result -= result / p;
            while (x % p == 0) x /= p;
        }
    }
    if (x > 1) result -= result / x;
    return result;
}

namespace {

// Exact division of integer polynomials (ascending coefficients), remainder
// known to be zero.
std::vector<mpz_class> poly_divide_exact(std::vector<mpz_class> num,
                                         const std::vector<mpz_class>& den) {
    const long dn = static_cast<long>(num.size()) - 1;
    const long dd = static_cast<long>(den.size()) - 1;
    std::vector<mpz_class> quot(dn - dd + 1);
    for (long k = dn - dd; k >= 0; --k) {
        mpz_class q = num[k + dd] / den[dd];
        quot[k] = q;
        if (q == 0) continue;
        for (long j = 0; j <= dd; ++j) num[k + j] -= q * den[j];
    }
    return quot;
}

std::vector<mpz_class> compute_cyclotomic(long m,
                                          std::map<long, std::vector<mpz_class>>& cache);

const std::vector<mpz_class>& cyclotomic_cached(long m) {
    static std::mutex mu;
    static std::map<long, std::vector<mpz_class>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(m);
    if (it == cache.end()) it = cache.emplace(m, compute_cyclotomic(m, cache)).first;
    return it->second;
}

std::vector<mpz_class> compute_cyclotomic(long m,
                                          std::map<long, std::vector<mpz_class>>& cache) {
    // x^m - 1 divided by the product of Phi_d over proper divisors d of m.
    std::vector<mpz_class> poly(m + 1);
    poly[0] = -1;
    poly[m] = 1;
    for (long d = 1; d < m; ++d) {
        if (m % d != 0) continue;
        auto it = cache.find(d);
        if (it == cache.end()) it = cache.emplace(d, compute_cyclotomic(d, cache)).first;
        poly = poly_divide_exact(std::move(poly), it->second);
    }
    return poly;
}

} // namespace

const std::vector<mpz_class>& cyclotomic_polynomial(long m) {
    if (m < 1) throw UserError("cyclotomic order must be positive");
    return cyclotomic_cached(m);
}

namespace {

// Reduces an arbitrary-degree polynomial in zeta_m modulo Phi_m, in place,
// then truncates to length phi(m).
void reduce_mod_cyclotomic(long m, std::vector<Rat>& poly) {
    const auto& phi_poly = cyclotomic_polynomial(m);
    const long deg = static_cast<long>(phi_poly.size()) - 1;
    for (long k = static_cast<long>(poly.size()) - 1; k >= deg; --k) {
        if (poly[k] == 0) continue;
        Rat head = poly[k];
        for (long j = 0; j <= deg; ++j) {
            poly[k - deg + j] -= head * phi_poly[j];
        }
    }
    poly.resize(deg);
}

// Rational polynomial division with remainder; both ascending. Returns
// remainder, writing the quotient if requested.
std::vector<Rat> poly_rem(std::vector<Rat> num, const std::vector<Rat>& den,
                          std::vector<Rat>* quot_out = nullptr) {
    long dd = static_cast<long>(den.size()) - 1;
    while (dd > 0 && den[dd] == 0) --dd;
    long dn = static_cast<long>(num.size()) - 1;
    while (dn > 0 && num[dn] == 0) --dn;
    std::vector<Rat> quot(std::max<long>(dn - dd + 1, 1));
    for (long k = dn - dd; k >= 0; --k) {
        Rat q = num[k + dd] / den[dd];
        quot[k] = q;
        if (q == 0) continue;
        for (long j = 0; j <= dd; ++j) num[k + j] -= q * den[j];
    }
    num.resize(dd > 0 ? dd : 1);
    if (quot_out) *quot_out = std::move(quot);
    return num;
}

bool poly_is_zero(const std::vector<Rat>& p) {
    for (const auto& c : p)
        if (c != 0) return false;
    return true;
}

std::vector<Rat> poly_mul(const std::vector<Rat>& a, const std::vector<Rat>& b) {
    std::vector<Rat> out(a.size() + b.size() - 1, Rat(0));
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) {
            if (b[j] == 0) continue;
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

std::vector<Rat> poly_sub(std::vector<Rat> a, const std::vector<Rat>& b) {
    if (a.size() < b.size()) a.resize(b.size(), Rat(0));
    for (size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
    return a;
}

} // namespace

CycScalar CycScalar::zero(long m) {
    return CycScalar(m, std::vector<Rat>(euler_phi(m), Rat(0)));
}

CycScalar CycScalar::one(long m) {
    return from_rat(m, Rat(1));
}

CycScalar CycScalar::from_rat(long m, const Rat& r) {
    std::vector<Rat> c(euler_phi(m), Rat(0));
    c[0] = r;
    return CycScalar(m, std::move(c));
}

CycScalar CycScalar::from_long(long m, long v) {
    return from_rat(m, Rat(v));
}

CycScalar CycScalar::zeta(long m, long e) {
    e %= m;
    if (e < 0) e += m;
    std::vector<Rat> poly(m, Rat(0));
    poly[e] = 1;
    reduce_mod_cyclotomic(m, poly);
    return CycScalar(m, std::move(poly));
}

bool CycScalar::is_zero() const {
    for (const auto& x : c_)
        if (x != 0) return false;
    return true;
}

bool CycScalar::is_one() const {
    if (c_[0] != 1) return false;
    for (size_t i = 1; i < c_.size(); ++i)
        if (c_[i] != 0) return false;
    return true;
}

bool CycScalar::is_rational() const {
    for (size_t i = 1; i < c_.size(); ++i)
        if (c_[i] != 0) return false;
    return true;
}

std::optional<Rat> CycScalar::as_rational() const {
    if (!is_rational()) return std::nullopt;
    return c_[0];
}

void CycScalar::require_same_order(const CycScalar& o) const {
    if (order_ != o.order_)
        throw UserError("cyclotomic field order mismatch: " + std::to_string(order_) +
                        " vs " + std::to_string(o.order_) + " (lift explicitly)");
}

CycScalar CycScalar::operator-() const {
    std::vector<Rat> c(c_);
    for (auto& x : c) x = -x;
    return CycScalar(order_, std::move(c));
}

CycScalar CycScalar::operator+(const CycScalar& o) const {
    require_same_order(o);
    std::vector<Rat> c(c_);
    for (size_t i = 0; i < c.size(); ++i) c[i] += o.c_[i];
    return CycScalar(order_, std::move(c));
}

CycScalar CycScalar::operator-(const CycScalar& o) const {
    require_same_order(o);
    std::vector<Rat> c(c_);
    for (size_t i = 0; i < c.size(); ++i) c[i] -= o.c_[i];
    return CycScalar(order_, std::move(c));
}

CycScalar CycScalar::operator*(const CycScalar& o) const {
    require_same_order(o);
    const size_t phi = c_.size();
    std::vector<Rat> out(2 * phi - 1, Rat(0));
    bool any = false;
    for (size_t i = 0; i < phi; ++i) {
        if (c_[i] == 0) continue;
        for (size_t j = 0; j < phi; ++j) {
            if (o.c_[j] == 0) continue;
            out[i + j] += c_[i] * o.c_[j];
            any = true;
        }
    }
    if (!any) return zero(order_);
    reduce_mod_cyclotomic(order_, out);
    return CycScalar(order_, std::move(out));
}

CycScalar CycScalar::inverse() const {
    if (is_zero()) throw UserError("division by zero");
    if (is_rational()) return from_rat(order_, Rat(1) / c_[0]);
    // Extended Euclid against Phi_M, which is irreducible over Q, so the gcd
    // is a nonzero constant.
    const auto& phi_int = cyclotomic_polynomial(order_);
    std::vector<Rat> r0(phi_int.size());
    for (size_t i = 0; i < phi_int.size(); ++i) r0[i] = Rat(phi_int[i]);
    std::vector<Rat> r1(c_);
    std::vector<Rat> s0{Rat(0)}, s1{Rat(1)}; // coefficients on *this
    while (!poly_is_zero(r1)) {
        std::vector<Rat> q;
        std::vector<Rat> r2 = poly_rem(r0, r1, &q);
        std::vector<Rat> s2 = poly_sub(s0, poly_mul(q, s1));
        r0 = std::move(r1);
        r1 = std::move(r2);
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    long d = static_cast<long>(r0.size()) - 1;
    while (d > 0 && r0[d] == 0) --d;
    if (d != 0) throw ConsistencyError("cyclotomic inverse: gcd not constant");
    Rat g = r0[0];
    for (auto& x : s0) x /= g;
    s0.resize(c_.size(), Rat(0));
    reduce_mod_cyclotomic(order_, s0);
    return CycScalar(order_, std::move(s0));
}

CycScalar CycScalar::operator/(const CycScalar& o) const {
    require_same_order(o);
    return *this * o.inverse();
}

bool CycScalar::operator==(const CycScalar& o) const {
    require_same_order(o);
    return c_ == o.c_;
}

CycScalar CycScalar::pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    CycScalar acc = one(order_), b = *this;
    while (e) {
        if (e & 1) acc = acc * b;
        b = b * b;
        e >>= 1;
    }
    return acc;
}

CycScalar CycScalar::lift(long m2) const {
    if (m2 == order_) return *this;
    if (m2 % order_ != 0)
        throw UserError("cannot lift from Q(zeta_" + std::to_string(order_) +
                        ") to Q(zeta_" + std::to_string(m2) + "): order does not divide");
    const long step = m2 / order_;
    std::vector<Rat> poly(static_cast<size_t>(c_.size() - 1) * step + 1, Rat(0));
    for (size_t i = 0; i < c_.size(); ++i) poly[i * step] = c_[i];
    reduce_mod_cyclotomic(m2, poly);
    return CycScalar(m2, std::move(poly));
}

std::optional<long> CycScalar::root_order() const {
    if (is_zero()) return std::nullopt;
    const long bound = lcm_long(2, order_);
    CycScalar acc = *this;
    for (long k = 1; k <= bound; ++k) {
        if (acc.is_one()) return k;
        acc = acc * *this;
    }
    return std::nullopt;
}

std::optional<long> CycScalar::zeta_exponent() const {
    for (long e = 0; e < order_; ++e) {
        if (*this == zeta(order_, e)) return e;
    }
    return std::nullopt;
}

CycScalar CycScalar::sqrt_root() const {
    if (auto e = zeta_exponent()) return zeta(2 * order_, *e);
    // Remaining roots of unity (odd M only): powers of zeta_{2M}.
    if (root_order().has_value()) {
        CycScalar lifted = lift(2 * order_);
        if (auto e = lifted.zeta_exponent()) return zeta(4 * order_, *e);
    }
    throw UserError("sqrt_root: not a root of unity: " + str());
}

std::string CycScalar::str() const {
    if (is_rational()) return rat_str(c_[0]);
    if (auto e = zeta_exponent()) {
        if (*e == 1) return "z" + std::to_string(order_);
        return "z" + std::to_string(order_) + "^" + std::to_string(*e);
    }
    std::ostringstream out;
    bool first = true;
    for (size_t i = 0; i < c_.size(); ++i) {
        if (c_[i] == 0) continue;
        Rat a = c_[i];
        if (!first) {
            out << (a > 0 ? " + " : " - ");
            if (a < 0) a = -a;
        }
        first = false;
        if (i == 0) {
            out << rat_str(a);
        } else {
            if (a != 1) out << rat_str(a) << "*";
            out << "z" << order_;
            if (i > 1) out << "^" << i;
        }
    }
    return out.str();
}

std::string CycScalar::key() const {
    std::ostringstream out;
    out << order_ << ":";
    for (const auto& x : c_) out << x.get_str() << ",";
    return out.str();
}

} // namespace qreflect
