#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qreflect/series.hpp"
#include "qreflect/structure.hpp"

namespace qreflect {

// (1/|G|) sum_g g(f): the averaging projection onto the fixed subspace.
NCPoly reynolds(const PBWPresentation& a, const FiniteGroup& g, const NCPoly& f);

// Exact basis of (A_d)^G. Cross-checked against the d-th Molien coefficient;
// a mismatch is an internal-consistency error.
std::vector<NCPoly> fixed_space_basis(const PBWPresentation& a, const FiniteGroup& g, int d);

// Degree-d span of all products of the accepted generators, in every order.
// Feed generators in ascending degree; spans finalize degree by degree.
class SubalgebraSpans {
public:
    SubalgebraSpans(const PBWPresentation& a, int max_degree);
    // Generator must be homogeneous of degree <= the degree currently being
    // inspected; updates the current span.
    void add_generator(const NCPoly& gen);
    // Finalizes (if needed) and returns the span basis at degree d.
    const RowSpan& span(int d);
    int dim(int d) { return span(d).rank(); }
    bool contains(int d, const NCPoly& f);

private:
    void ensure(int d);
    const PBWPresentation& a_;
    int max_degree_;
    std::vector<NCPoly> gens_;
    std::vector<int> gen_degrees_;
    std::vector<std::optional<RowSpan>> spans_;
    std::vector<std::vector<NCPoly>> span_polys_;
};

struct DegreeStatus {
    int degree = 0;
    int fixed_dim = 0;
    int span_dim = 0;
    int deficit() const { return fixed_dim - span_dim; }
};

struct GeneratorSet {
    std::vector<NCPoly> generators;
    std::vector<int> degrees;
    int verified_to = 0;
    std::vector<DegreeStatus> status; // per degree 1..verified_to
    std::string label;
    bool zero_deficit() const;
};

// Mining: accepts the lexicographically-first complement basis vectors of the
// fixed space over the running subalgebra span, degree by degree up to D.
GeneratorSet mine_generators(const PBWPresentation& a, const FiniteGroup& g, int D);

// Verification: per-degree comparison of the span of the given generators
// with the fixed space. Generators must each be G-fixed.
GeneratorSet verify_generators(const PBWPresentation& a, const FiniteGroup& g,
                               const std::vector<NCPoly>& gens, int D);

// The invariant generators of the circle case on k_{-1}[x1..xn]: for odd
// alpha the explicit list (z_1...z_n, sum z_i^{2t}, ..., sum z_i^{(n-1)2t})
// with z_i = x_i^alpha and 2t = beta/alpha, each verified fixed; for even
// alpha, generators mined over the commutative ring in the z variables with
// the induced group (degrees reported in the x grading).
GeneratorSet circle_invariant_generators(long field_order, int n, long alpha, long beta,
                                         int mine_depth = 8);

struct FreeModuleReport {
    bool abelian = false;
    bool qr_generated = false;
    bool basis_change_required = false;
    std::vector<int> minimal_generator_elements; // element indices in G
    std::vector<long> reflection_orders;
    int mystic_count = 0;
    TruncSeries coset_series;
    TruncSeries lhs;  // H_A
    TruncSeries rhs;  // coset * H_{A^G}
    bool identity_holds = false;
    std::optional<int> first_mismatch_degree;
};

// Prop-5.2-style free-module identity for an abelian G generated by
// quasi-reflections: H_A(t) = (sum over coset monomials t^deg) * H_{A^G}(t)
// up to degree D. Coset exponents: r in [0, o(g)) per reflection and degree
// pattern (0,1,1,2) per mystic generator.
FreeModuleReport free_module_check(const PBWPresentation& a, const FiniteGroup& g, int D);

struct PowerRelationsReport {
    long n = 0;              // q primitive m-th root: n = m (odd) or m/2 (even)
    CycScalar q_n_squared;   // q^{n^2}
    bool all_hold = false;
    std::vector<std::string> failed;
};

// The subring relations among X_ij = x_ij^n in the quantum matrix algebra:
// X12 X11 = q^{n^2} X11 X12 (and its three companions), X21 X12 = X12 X21,
// X22 X11 = X11 X22, each checked by exact multiplication.
PowerRelationsReport quantum_power_relations(const PBWPresentation& c, const CycScalar& q);

} // namespace qreflect
