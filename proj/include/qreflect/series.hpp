#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qreflect/algebra.hpp"
#include "qreflect/autgroup.hpp"

namespace qreflect {

// Truncated power series with exact coefficients, indices 0..D.
struct TruncSeries {
    long field_order = 1;
    std::vector<CycScalar> c;

    int truncation() const { return static_cast<int>(c.size()) - 1; }
    bool operator==(const TruncSeries& o) const { return c == o.c; }
    // All coefficients rational integers?
    bool is_integral() const;
    std::string str() const;
};

TruncSeries series_zero(long field_order, int D);
TruncSeries series_mul(const TruncSeries& a, const TruncSeries& b);

// Trace of g on the degree-d component, from the ordered monomial basis.
CycScalar trace_on_degree(const PBWPresentation& a, const GradedMap& g, int d);

// Tr_A(g, t) up to degree D, computed degreewise (presentation agnostic).
TruncSeries trace_series(const PBWPresentation& a, const GradedMap& g, int D);

// (1/|G|) sum_h Tr_A(h, t): the Hilbert series of the fixed subring. All
// coefficients must come out as non-negative integers; anything else is an
// internal-consistency error.
TruncSeries molien_fixed_hilbert(const PBWPresentation& a, const FiniteGroup& g, int D);

// Expansion of 1/((1-t)^{n-1}(1-lambda t)).
TruncSeries expand_qr_form(long field_order, int n, const CycScalar& lambda, int D);

bool matches_qr_form(const TruncSeries& s, int n, const CycScalar& lambda);

// Expansion of prod_i 1/(1 - t^{deg_i}).
TruncSeries expand_product_form(long field_order, const std::vector<int>& degrees, int D);

// Greedy peeling of (1 - t^d) factors. Sound when it answers: the product
// expansion is re-checked against s. Absent when no n-factor form is found
// within the truncation.
std::optional<std::vector<int>> recognize_product_form(const TruncSeries& s, int nfactors);

std::string product_form_str(const std::vector<int>& degrees);

} // namespace qreflect
