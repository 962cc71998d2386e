#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qreflect/cyclotomic.hpp"

namespace qreflect {

using Vec = std::vector<CycScalar>;

// Dense matrix over Q(zeta_M), row-major. Small: everything here is exact
// Gaussian elimination with first-nonzero pivoting, so results are
// deterministic.
struct Matrix {
    int rows = 0;
    int cols = 0;
    long field_order = 1;
    std::vector<CycScalar> a;

    Matrix() = default;
    Matrix(int r, int c, long m)
        : rows(r), cols(c), field_order(m), a(static_cast<size_t>(r) * c, CycScalar::zero(m)) {}

    static Matrix identity(int n, long m);

    CycScalar& at(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    const CycScalar& at(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

    Matrix operator*(const Matrix& o) const;
    Vec operator*(const Vec& v) const;
    bool operator==(const Matrix& o) const;

    bool is_identity() const;
    bool is_diagonal() const;
    // Exactly one nonzero entry per row and per column.
    bool is_monomial() const;

    std::string key() const;
};

CycScalar det(const Matrix& m);
std::optional<Matrix> try_inverse(const Matrix& m);

// In-place reduced row echelon form; returns rank. Pivot columns appended to
// pivot_cols when given.
int rref(Matrix& m, std::vector<int>* pivot_cols = nullptr);

// Basis of the right kernel {v : m v = 0}, deterministic.
std::vector<Vec> kernel_basis(const Matrix& m);

// Solves A x = b exactly; absent when inconsistent.
std::optional<Vec> solve(const Matrix& a, const Vec& b);

// Incrementally maintained row-reduced basis of a subspace of Q(zeta)^dim.
// Used for rank bookkeeping, span membership and complement extraction.
class RowSpan {
public:
    RowSpan(int dim, long field_order);

    int dim() const { return dim_; }
    int rank() const { return static_cast<int>(rows_.size()); }
    // Residual of v after reduction against the basis (zero iff v in span).
    Vec reduce(Vec v) const;
    bool contains(const Vec& v) const;
    // Adds v to the span; returns true if the rank grew.
    bool insert(Vec v);
    const std::vector<Vec>& rows() const { return rows_; }

private:
    int dim_;
    long order_;
    std::vector<Vec> rows_;      // reduced rows, pivot normalized to 1
    std::vector<int> pivots_;    // pivot column of each row
};

} // namespace qreflect
