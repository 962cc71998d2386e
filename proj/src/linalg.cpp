#include "qreflect/linalg.hpp"

#include <sstream>

#include "qreflect/errors.hpp"

namespace qreflect {

Matrix Matrix::identity(int n, long m) {
    Matrix out(n, n, m);
    for (int i = 0; i < n; ++i) out.at(i, i) = CycScalar::one(m);
    return out;
}

Matrix Matrix::operator*(const Matrix& o) const {
    if (cols != o.rows) throw UserError("matrix dimension mismatch in product");
    Matrix out(rows, o.cols, field_order);
    for (int i = 0; i < rows; ++i) {
        for (int k = 0; k < cols; ++k) {
            const CycScalar& x = at(i, k);
            if (x.is_zero()) continue;
            for (int j = 0; j < o.cols; ++j) {
                const CycScalar& y = o.at(k, j);
                if (y.is_zero()) continue;
                out.at(i, j) = out.at(i, j) + x * y;
            }
        }
    }
    return out;
}

Vec Matrix::operator*(const Vec& v) const {
    if (static_cast<int>(v.size()) != cols) throw UserError("matrix/vector size mismatch");
    Vec out(rows, CycScalar::zero(field_order));
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            if (at(i, j).is_zero() || v[j].is_zero()) continue;
            out[i] = out[i] + at(i, j) * v[j];
        }
    }
    return out;
}

bool Matrix::operator==(const Matrix& o) const {
    if (rows != o.rows || cols != o.cols || field_order != o.field_order) return false;
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i] != o.a[i]) return false;
    return true;
}

bool Matrix::is_identity() const {
    if (rows != cols) return false;
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            if (i == j ? !at(i, j).is_one() : !at(i, j).is_zero()) return false;
        }
    return true;
}

bool Matrix::is_diagonal() const {
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            if (i != j && !at(i, j).is_zero()) return false;
    return true;
}

bool Matrix::is_monomial() const {
    if (rows != cols) return false;
    std::vector<int> row_hits(rows, 0), col_hits(cols, 0);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            if (!at(i, j).is_zero()) {
                ++row_hits[i];
                ++col_hits[j];
            }
    for (int i = 0; i < rows; ++i)
        if (row_hits[i] != 1 || col_hits[i] != 1) return false;
    return true;
}

std::string Matrix::key() const {
    std::ostringstream out;
    out << rows << "x" << cols << ";";
    for (const auto& x : a) out << x.key() << "|";
    return out.str();
}

CycScalar det(const Matrix& m) {
    if (m.rows != m.cols) throw UserError("determinant of a non-square matrix");
    Matrix w = m;
    const long M = m.field_order;
    CycScalar result = CycScalar::one(M);
    for (int col = 0; col < w.cols; ++col) {
        int pivot = -1;
        for (int r = col; r < w.rows; ++r)
            if (!w.at(r, col).is_zero()) {
                pivot = r;
                break;
            }
        if (pivot < 0) return CycScalar::zero(M);
        if (pivot != col) {
            for (int j = 0; j < w.cols; ++j) std::swap(w.at(pivot, j), w.at(col, j));
            result = -result;
        }
        result = result * w.at(col, col);
        CycScalar inv = w.at(col, col).inverse();
        for (int r = col + 1; r < w.rows; ++r) {
            if (w.at(r, col).is_zero()) continue;
            CycScalar factor = w.at(r, col) * inv;
            for (int j = col; j < w.cols; ++j)
                w.at(r, j) = w.at(r, j) - factor * w.at(col, j);
        }
    }
    return result;
}

int rref(Matrix& m, std::vector<int>* pivot_cols) {
    int rank = 0;
    for (int col = 0; col < m.cols && rank < m.rows; ++col) {
        int pivot = -1;
        for (int r = rank; r < m.rows; ++r)
            if (!m.at(r, col).is_zero()) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        if (pivot != rank)
            for (int j = 0; j < m.cols; ++j) std::swap(m.at(pivot, j), m.at(rank, j));
        CycScalar inv = m.at(rank, col).inverse();
        for (int j = col; j < m.cols; ++j) m.at(rank, j) = m.at(rank, j) * inv;
        for (int r = 0; r < m.rows; ++r) {
            if (r == rank || m.at(r, col).is_zero()) continue;
            CycScalar factor = m.at(r, col);
            for (int j = col; j < m.cols; ++j)
                m.at(r, j) = m.at(r, j) - factor * m.at(rank, j);
        }
        if (pivot_cols) pivot_cols->push_back(col);
        ++rank;
    }
    return rank;
}

std::optional<Matrix> try_inverse(const Matrix& m) {
    if (m.rows != m.cols) return std::nullopt;
    const int n = m.rows;
    Matrix aug(n, 2 * n, m.field_order);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) aug.at(i, j) = m.at(i, j);
        aug.at(i, n + i) = CycScalar::one(m.field_order);
    }
    std::vector<int> pivots;
    int rank = rref(aug, &pivots);
    if (rank < n || pivots != [&] {
            std::vector<int> expect(n);
            for (int i = 0; i < n; ++i) expect[i] = i;
            return expect;
        }())
        return std::nullopt;
    Matrix out(n, n, m.field_order);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.at(i, j) = aug.at(i, n + j);
    return out;
}

std::vector<Vec> kernel_basis(const Matrix& m) {
    Matrix w = m;
    std::vector<int> pivots;
    rref(w, &pivots);
    std::vector<bool> is_pivot(m.cols, false);
    for (int c : pivots) is_pivot[c] = true;
    std::vector<Vec> out;
    for (int free_col = 0; free_col < m.cols; ++free_col) {
        if (is_pivot[free_col]) continue;
        Vec v(m.cols, CycScalar::zero(m.field_order));
        v[free_col] = CycScalar::one(m.field_order);
        for (size_t r = 0; r < pivots.size(); ++r) {
            // row r reads: x_{pivot[r]} + sum_{j free} w(r,j) x_j = 0
            v[pivots[r]] = -w.at(static_cast<int>(r), free_col);
        }
        out.push_back(std::move(v));
    }
    return out;
}

std::optional<Vec> solve(const Matrix& a, const Vec& b) {
    if (static_cast<int>(b.size()) != a.rows) throw UserError("solve: size mismatch");
    Matrix aug(a.rows, a.cols + 1, a.field_order);
    for (int i = 0; i < a.rows; ++i) {
        for (int j = 0; j < a.cols; ++j) aug.at(i, j) = a.at(i, j);
        aug.at(i, a.cols) = b[i];
    }
    std::vector<int> pivots;
    rref(aug, &pivots);
    for (int c : pivots)
        if (c == a.cols) return std::nullopt; // inconsistent
    Vec x(a.cols, CycScalar::zero(a.field_order));
    for (size_t r = 0; r < pivots.size(); ++r) x[pivots[r]] = aug.at(static_cast<int>(r), a.cols);
    return x;
}

RowSpan::RowSpan(int dim, long field_order) : dim_(dim), order_(field_order) {}

Vec RowSpan::reduce(Vec v) const {
    for (size_t r = 0; r < rows_.size(); ++r) {
        const CycScalar& c = v[pivots_[r]];
        if (c.is_zero()) continue;
        CycScalar factor = c;
        for (int j = 0; j < dim_; ++j) {
            if (rows_[r][j].is_zero()) continue;
            v[j] = v[j] - factor * rows_[r][j];
        }
    }
    return v;
}

bool RowSpan::contains(const Vec& v) const {
    Vec r = reduce(v);
    for (const auto& x : r)
        if (!x.is_zero()) return false;
    return true;
}

bool RowSpan::insert(Vec v) {
    v = reduce(std::move(v));
    int pivot = -1;
    for (int j = 0; j < dim_; ++j)
        if (!v[j].is_zero()) {
            pivot = j;
            break;
        }
    if (pivot < 0) return false;
    CycScalar inv = v[pivot].inverse();
    for (int j = 0; j < dim_; ++j)
        if (!v[j].is_zero()) v[j] = v[j] * inv;
    // Back-substitute into existing rows to keep the basis fully reduced.
    for (size_t r = 0; r < rows_.size(); ++r) {
        const CycScalar& c = rows_[r][pivot];
        if (c.is_zero()) continue;
        CycScalar factor = c;
        for (int j = 0; j < dim_; ++j) {
            if (v[j].is_zero()) continue;
            rows_[r][j] = rows_[r][j] - factor * v[j];
        }
    }
    rows_.push_back(std::move(v));
    pivots_.push_back(pivot);
    return true;
}

} // namespace qreflect
