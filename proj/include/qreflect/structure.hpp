#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qreflect/autgroup.hpp"
#include "qreflect/series.hpp"

namespace qreflect {

enum class QRVariant { NotQR, Reflection, Mystic };

// Classification verdict for a finite-order graded automorphism. hdet is
// reported from the classification table (lambda for reflections, -1 for
// mystic reflections), not computed homologically.
struct QRClass {
    QRVariant variant = QRVariant::NotQR;
    long order = 1;
    CycScalar det;
    // Reflection: the non-unit eigenvalue; Mystic: -1 (the trace-form pole).
    std::optional<CycScalar> lambda;
    std::optional<CycScalar> hdet;
    // Reflection on a skew ring: the normal non-invariant eigenvector.
    std::optional<NCPoly> eigenvector;
    // Mystic in standard form: the coordinate pair (s, t), 0-based.
    std::optional<std::pair<int, int>> mystic_pair;
    // Mystic: eigenvectors for +i and -i.
    std::optional<std::pair<NCPoly, NCPoly>> mystic_eigenvectors;

    bool is_qr() const { return variant != QRVariant::NotQR; }
    std::string variant_str() const;
};

// Block decomposition of the parameter matrix, parts ordered by smallest
// index.
std::vector<std::vector<int>> block_decomposition(const PBWPresentation& a);

// Eigenvalue-based classification per the reflection / mystic-reflection
// dichotomy, with the trace series cross-checked against
// 1/((1-t)^{n-1}(1-lambda t)) through degree 12 for every positive verdict.
QRClass classify_quasi_reflection(const PBWPresentation& a, const GradedMap& g);

// For a mystic with eigenvectors (y, z), an anticommuting pair (y', g(y'))
// inside span{y, z}. ConsistencyError when none exists over the field.
std::pair<NCPoly, NCPoly> mystic_anticommuting_pair(const PBWPresentation& a,
                                                    const GradedMap& g, const QRClass& cls);

struct PartInfo {
    std::vector<int> indices;              // 0-based, sorted
    bool is_circle = false;
    std::vector<int> member_elements;      // indices of G_v inside G
    long subgroup_order = 1;
    std::optional<std::pair<long, long>> circle_params; // (alpha, beta)
};

struct BlockCircleDecomp {
    std::vector<PartInfo> parts;
    bool group_is_qr_generated = false;
    bool product_order_verified = false;
};

// Finds the mystic reflections of G (each must be standard in the x-basis),
// joins their index pairs into maximal circles, and keeps blocks for the
// rest. Computes G_v per part and verifies |G| = prod |G_v| when G is
// generated by quasi-reflections.
BlockCircleDecomp block_circle_decomposition(const PBWPresentation& a, const FiniteGroup& g);

// alpha = |{lambda : theta_{i,lambda} in G} u {1}|, beta = |{lambda :
// tau_{i,j,lambda} in G}| for a circle; verified independent of i, j, with
// alpha | beta and beta even.
std::pair<long, long> circle_parameters(const PBWPresentation& a, const FiniteGroup& g,
                                        const std::vector<int>& circle);

struct StcVerdict {
    bool generated_by_qr = false;
    FiniteGroup reflection_subgroup;           // R
    bool r_is_normal = false;
    std::vector<QRClass> element_classes;      // parallel to G.elements
    std::optional<BlockCircleDecomp> decomposition; // skew rings only
    std::string structure;                     // Corollary-4.6-style description
    std::string fixed_ring_verdict;            // finite global dimension or not
};

// Theorem-4.5 decision: A^G has finite global dimension iff G is generated by
// quasi-reflections; the structural description per part comes with it.
StcVerdict decide_stc(const PBWPresentation& a, const FiniteGroup& g);

// The group M(n, alpha, beta) on k_{-1}[x1..xn]: closure of the theta and tau
// generators with lambda ranging over alpha-th and beta-th roots of unity.
// Round-trips through circle_parameters.
FiniteGroup make_M_group(const PBWPresentation& a, long alpha, long beta, long cap = 10000);

} // namespace qreflect
