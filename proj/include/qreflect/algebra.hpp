#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qreflect/cyclotomic.hpp"
#include "qreflect/linalg.hpp"

namespace qreflect {

// Ordered monomial x_1^{e_1} ... x_n^{e_n}. Variables are 0-based in code.
struct Monomial {
    std::vector<int> e;

    int degree() const;
    int n() const { return static_cast<int>(e.size()); }
    static Monomial unit(int n);
    static Monomial var(int n, int i);
    // Expanded generator sequence, e.g. x1^2 x3 -> [0, 0, 2].
    std::vector<int> word() const;
    static Monomial from_word(int n, const std::vector<int>& w);
    bool operator==(const Monomial& o) const { return e == o.e; }
    std::string str() const;
};

// Graded lexicographic order with x1 < x2 < ... < xn: first total degree,
// then the exponent of the largest variable, downward.
struct MonomialOrder {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

// Polynomial as a canonical map ordered-monomial -> nonzero scalar.
class NCPoly {
public:
    using TermMap = std::map<Monomial, CycScalar, MonomialOrder>;

    NCPoly() = default;

    static NCPoly zero() { return NCPoly(); }
    static NCPoly term(Monomial m, CycScalar c);

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    int term_count() const { return static_cast<int>(terms_.size()); }
    // Homogeneous degree; nullopt for 0 or inhomogeneous input.
    std::optional<int> degree() const;
    bool is_homogeneous() const;

    void add_term(const Monomial& m, const CycScalar& c);
    CycScalar coeff(const Monomial& m, long field_order) const;

    NCPoly operator+(const NCPoly& o) const;
    NCPoly operator-(const NCPoly& o) const;
    NCPoly scaled(const CycScalar& c) const;
    bool operator==(const NCPoly& o) const;
    bool operator!=(const NCPoly& o) const { return !(*this == o); }

    // Coefficient vector over the degree-d monomial basis.
    Vec coords(const std::vector<Monomial>& basis, long field_order) const;
    static NCPoly from_coords(const std::vector<Monomial>& basis, const Vec& v);

    std::string str(const std::vector<std::string>& var_names = {}) const;

private:
    TermMap terms_;
};

enum class RingKind { Skew, QuantumMatrix, General };

struct RewriteRule {
    // x_j x_i -> lead * x_i x_j + tail for j > i; tail is a combination of
    // ordered degree-2 monomials strictly below x_i x_j in the term order.
    CycScalar lead;
    NCPoly tail;
};

// A quadratic algebra presentation with ordered-monomial rewriting. The
// ordered monomials form the basis; rewriting is confluent (checked on all
// degree-3 overlaps for kind General, certified by construction otherwise).
class PBWPresentation {
public:
    // p_upper lists p_{ij} for i<j row-major: (1,2),(1,3),...,(2,3),...
    static PBWPresentation skew(int n, long field_order, const std::vector<CycScalar>& p_upper);
    // The quantum 2x2 matrix algebra with generators (x11, x12, x21, x22).
    static PBWPresentation quantum_matrix(const CycScalar& q);
    static PBWPresentation general(int n, long field_order,
                                   std::map<std::pair<int, int>, RewriteRule> rules);

    int n() const { return n_; }
    long field_order() const { return field_order_; }
    RingKind kind() const { return kind_; }
    bool is_skew() const { return kind_ == RingKind::Skew; }
    bool tails_trivial() const { return tails_trivial_; }

    // Full parameter matrix per the standard convention p_ii = 1,
    // p_ij = p_ji^{-1}; requires a skew presentation.
    const CycScalar& p(int i, int j) const;
    const RewriteRule& rule(int i, int j) const; // j > i

    const std::vector<std::string>& var_names() const { return names_; }

    NCPoly normal_order(const std::vector<int>& word, const CycScalar& coeff) const;
    NCPoly multiply(const NCPoly& f, const NCPoly& g) const;
    NCPoly power(const NCPoly& f, int e) const;

    // Ordered monomials of the given total degree, ascending in the term
    // order.
    std::vector<Monomial> basis(int degree) const;

    // The defining relations as polynomials in the free word algebra,
    // returned as (word, coeff) lists that normal_order must kill.
    struct FreeRelation {
        std::vector<std::pair<std::vector<int>, CycScalar>> terms;
    };
    std::vector<FreeRelation> relations() const;

    std::string describe() const;

private:
    PBWPresentation() = default;
    void check_overlaps() const;

    int n_ = 0;
    long field_order_ = 1;
    RingKind kind_ = RingKind::Skew;
    bool tails_trivial_ = true;
    std::vector<CycScalar> p_full_;                     // n*n, skew only
    std::map<std::pair<int, int>, RewriteRule> rules_;  // keyed by (i, j), j > i
    std::vector<std::string> names_;
};

// --- degree-1 normality and q-commutation (Lemma-2.5-style machinery) ---

bool is_normal_deg1(const PBWPresentation& a, const NCPoly& f);

// The unique q with f g = q g f, when it exists (f, g nonzero).
std::optional<CycScalar> q_commutator(const PBWPresentation& a, const NCPoly& f,
                                      const NCPoly& g);

// A maximal subspace of degree-1 normal elements that scalar-commutes with
// every generator by a common factor family mu.
struct NormalFamily {
    std::vector<NCPoly> basis;
    std::vector<std::optional<CycScalar>> mu; // per generator, when scalar
};

// Degree-1 normal elements come in finitely many subspaces; this returns one
// family per scalar-commutation pattern seen on normal generators. Covers
// skew presentations (one family per block) and the quantum matrix algebra.
std::vector<NormalFamily> normal_deg1_families(const PBWPresentation& a);

// --- graded twists ---

struct Partition {
    std::vector<std::vector<int>> parts; // disjoint, covering 0..n-1, each sorted
    int part_of(int i) const;
};

bool is_p_partition(const PBWPresentation& a, const Partition& d);

// The per-part diagonal twist maps: phi_v scales x_i by a square root of
// p_{rep(v), i} for i outside part v and fixes x_i inside. Square roots are
// chosen coherently per ordered pair of parts so that the twisted product
// below makes cross-part generators commute.
std::vector<Matrix> partition_twist_maps(const PBWPresentation& a, const Partition& d);

// Multidegree of a homogeneous polynomial under the partition grading.
std::optional<std::vector<int>> multidegree(const NCPoly& f, const Partition& d);

// a * b = a . phi^{|a|}(b), computed inside the original algebra. Twist maps
// must be diagonal, pairwise commuting, relation-preserving; f homogeneous in
// the partition multigrading.
NCPoly twisted_multiply(const PBWPresentation& a, const NCPoly& f, const NCPoly& g,
                        const Partition& d, const std::vector<Matrix>& twists);

// Image of f under the linear substitution x_j -> column j of images,
// extended multiplicatively and normal-ordered. Defined for any matrix; it is
// an algebra map exactly when the matrix preserves the relations.
NCPoly substitute_linear(const PBWPresentation& a, const Matrix& images, const NCPoly& f);

// Every defining relation maps to zero under the substitution above.
bool preserves_relations(const PBWPresentation& a, const Matrix& mat);

} // namespace qreflect
