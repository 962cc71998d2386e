#pragma once

#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "qreflect/algebra.hpp"
#include "qreflect/linalg.hpp"

namespace qreflect {

// A graded automorphism, stored as its matrix on the degree-1 space
// (column j = image of x_j in the x-basis). A map is flagged validated once
// the degree-2 relation check has passed; products of validated maps inherit
// the flag.
struct GradedMap {
    Matrix mat;
    bool validated = false;

    int n() const { return mat.rows; }
    bool operator==(const GradedMap& o) const { return mat == o.mat; }
};

// True iff every defining relation maps to zero in degree 2. Throws UserError
// on a singular matrix, which can never define an automorphism.
bool is_graded_automorphism(const PBWPresentation& a, const Matrix& mat);

// Checks invertibility and the relations, returning a validated map.
GradedMap validate_map(const PBWPresentation& a, Matrix mat);

// Image of f under the algebra automorphism extending g.
NCPoly apply(const PBWPresentation& a, const GradedMap& g, const NCPoly& f);

// --- standard constructors ---

// theta_{s,lambda}: x_s -> lambda x_s, lambda != 1. 0-based s.
GradedMap make_theta(const PBWPresentation& a, int s, const CycScalar& lambda);

// tau_{s,t,lambda}: x_s -> lambda x_t, x_t -> -lambda^{-1} x_s. Requires
// p_st = -1 and p_sj = p_tj for all j outside {s, t}.
GradedMap make_tau(const PBWPresentation& a, int s, int t, const CycScalar& lambda);

// s_{i,j,lambda}: x_i -> lambda x_i, x_j -> lambda^{-1} x_j.
GradedMap make_scaling_pair(const PBWPresentation& a, int i, int j, const CycScalar& lambda);

// A block-respecting change of basis: arbitrary invertible within each block
// of the block decomposition, zero across blocks.
GradedMap make_elementary(const PBWPresentation& a, Matrix mat);

// Generators of the classical group G(m,p,n) (p | m) as weighted permutation
// matrices: adjacent transpositions plus the diagonal subgroup generators.
std::vector<GradedMap> classical_family(const PBWPresentation& a, long m, long p, int n);

// Block decomposition of a skew parameter matrix: B(i) = {i' : p_ij = p_i'j
// for all j}. Parts sorted by smallest index.
Partition block_partition(const PBWPresentation& a);

// --- finite groups ---

struct FiniteGroup {
    std::vector<GradedMap> elements;            // [0] = identity, discovery order
    std::vector<int> generators;                // indices into elements
    std::vector<std::vector<int>> words;        // one generator word per element
    std::unordered_map<std::string, int> index; // matrix key -> element index

    int order() const { return static_cast<int>(elements.size()); }
    int find(const Matrix& m) const;
    // Generating elements if recorded, otherwise all elements.
    std::vector<const GradedMap*> generating_set() const;
};

// Breadth-first closure under right multiplication by the generators, with
// canonical-form deduplication. Deterministic element order.
FiniteGroup close_group(const PBWPresentation& a, const std::vector<GradedMap>& gens, long cap);

long element_order(const GradedMap& g, long cap = 10000);

// Lemma-style fast path: for a weighted permutation matrix with +-1 weights
// whose permutation is a single n-cycle, the order is n for an even number
// of -1 weights and 2n for an odd number.
long monomial_cycle_order(const GradedMap& g);

std::map<long, long> order_distribution(const FiniteGroup& g);

struct OrderComparison {
    std::map<long, long> left;
    std::map<long, long> right;
    bool identical;
    std::optional<long> first_differing;
};
OrderComparison compare_order_distributions(const FiniteGroup& a, const FiniteGroup& b);

// Searches for (a, b) satisfying a^{2m} = 1, b^{-1} a b = a^{-1}, b^2 = a^m
// with b outside <a>; returns element indices when found.
std::optional<std::pair<int, int>> find_dicyclic_pair(const FiniteGroup& g, long m);

} // namespace qreflect
