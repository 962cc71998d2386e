#include "qreflect/autgroup.hpp"

#include <algorithm>
#include <deque>

#include "qreflect/errors.hpp"

namespace qreflect {

bool is_graded_automorphism(const PBWPresentation& a, const Matrix& mat) {
    if (mat.rows != a.n() || mat.cols != a.n())
        throw UserError("automorphism matrix must be n x n");
    if (det(mat).is_zero())
        throw UserError("singular matrix can never define a graded automorphism");
    return preserves_relations(a, mat);
}

GradedMap validate_map(const PBWPresentation& a, Matrix mat) {
    if (!is_graded_automorphism(a, mat))
        throw UserError("matrix is not a graded automorphism: a defining relation "
                        "is not preserved");
    return GradedMap{std::move(mat), true};
}

NCPoly apply(const PBWPresentation& a, const GradedMap& g, const NCPoly& f) {
    if (!g.validated) throw UserError("apply: map has not been validated");
    return substitute_linear(a, g.mat, f);
}

GradedMap make_theta(const PBWPresentation& a, int s, const CycScalar& lambda) {
    if (s < 0 || s >= a.n()) throw UserError("theta: index out of range");
    if (lambda.is_zero() || lambda.is_one())
        throw UserError("theta: lambda must be nonzero and different from 1");
    Matrix m = Matrix::identity(a.n(), a.field_order());
    m.at(s, s) = lambda;
    return validate_map(a, std::move(m));
}

GradedMap make_tau(const PBWPresentation& a, int s, int t, const CycScalar& lambda) {
    if (s < 0 || s >= a.n() || t < 0 || t >= a.n() || s == t)
        throw UserError("tau: indices out of range or equal");
    if (lambda.is_zero()) throw UserError("tau: lambda must be nonzero");
    if (!a.is_skew()) throw UserError("tau: standard mystic reflections live on skew rings");
    const long M = a.field_order();
    if (a.p(s, t) != -CycScalar::one(M))
        throw UserError("tau: requires p_st = -1");
    for (int j = 0; j < a.n(); ++j) {
        if (j == s || j == t) continue;
        if (a.p(s, j) != a.p(t, j))
            throw UserError("tau: requires p_sj = p_tj for all j outside {s,t}; "
                            "fails at j = " + std::to_string(j + 1));
    }
    Matrix m = Matrix::identity(a.n(), M);
    m.at(s, s) = CycScalar::zero(M);
    m.at(t, t) = CycScalar::zero(M);
    m.at(t, s) = lambda;                 // x_s -> lambda x_t
    m.at(s, t) = -lambda.inverse();      // x_t -> -lambda^{-1} x_s
    return validate_map(a, std::move(m));
}

GradedMap make_scaling_pair(const PBWPresentation& a, int i, int j, const CycScalar& lambda) {
    if (i < 0 || i >= a.n() || j < 0 || j >= a.n() || i == j)
        throw UserError("scaling pair: indices out of range or equal");
    if (lambda.is_zero()) throw UserError("scaling pair: lambda must be nonzero");
    Matrix m = Matrix::identity(a.n(), a.field_order());
    m.at(i, i) = lambda;
    m.at(j, j) = lambda.inverse();
    return validate_map(a, std::move(m));
}

Partition block_partition(const PBWPresentation& a) {
    const int n = a.n();
    std::vector<int> label(n, -1);
    Partition d;
    for (int i = 0; i < n; ++i) {
        if (label[i] >= 0) continue;
        std::vector<int> part{i};
        label[i] = static_cast<int>(d.parts.size());
        for (int k = i + 1; k < n; ++k) {
            if (label[k] >= 0) continue;
            bool same = true;
            for (int j = 0; j < n; ++j)
                if (a.p(i, j) != a.p(k, j)) {
                    same = false;
                    break;
                }
            if (same) {
                part.push_back(k);
                label[k] = label[i];
            }
        }
        d.parts.push_back(std::move(part));
    }
    return d;
}

GradedMap make_elementary(const PBWPresentation& a, Matrix mat) {
    if (mat.rows != a.n() || mat.cols != a.n())
        throw UserError("elementary: matrix must be n x n");
    Partition blocks = block_partition(a);
    for (int j = 0; j < a.n(); ++j)
        for (int i = 0; i < a.n(); ++i) {
            if (mat.at(i, j).is_zero()) continue;
            if (blocks.part_of(i) != blocks.part_of(j))
                throw UserError("elementary: entry (" + std::to_string(i + 1) + "," +
                                std::to_string(j + 1) + ") crosses blocks");
        }
    return validate_map(a, std::move(mat));
}

std::vector<GradedMap> classical_family(const PBWPresentation& a, long m, long p, int n) {
    if (n != a.n()) throw UserError("classical family: rank mismatch with the ring");
    if (m < 1 || p < 1 || m % p != 0) throw UserError("classical family: requires p | m");
    const long M = a.field_order();
    if (M % m != 0)
        throw UserError("classical family: zeta_m outside the working field; "
                        "enlarge the field order");
    std::vector<GradedMap> gens;
    for (int i = 0; i + 1 < n; ++i) {
        Matrix t = Matrix::identity(n, M);
        t.at(i, i) = CycScalar::zero(M);
        t.at(i + 1, i + 1) = CycScalar::zero(M);
        t.at(i, i + 1) = CycScalar::one(M);
        t.at(i + 1, i) = CycScalar::one(M);
        gens.push_back(validate_map(a, std::move(t)));
    }
    if (m > 1) {
        if (n >= 2) {
            Matrix d = Matrix::identity(n, M);
            d.at(0, 0) = CycScalar::zeta(M, M / m);
            d.at(1, 1) = CycScalar::zeta(M, M / m).inverse();
            gens.push_back(validate_map(a, std::move(d)));
        }
        if (p < m || n == 1) {
            Matrix d = Matrix::identity(n, M);
            d.at(0, 0) = CycScalar::zeta(M, M / m).pow(p);
            gens.push_back(validate_map(a, std::move(d)));
        }
    }
    return gens;
}

int FiniteGroup::find(const Matrix& m) const {
    auto it = index.find(m.key());
    if (it == index.end()) return -1;
    return it->second;
}

std::vector<const GradedMap*> FiniteGroup::generating_set() const {
    std::vector<const GradedMap*> out;
    if (!generators.empty()) {
        for (int i : generators) out.push_back(&elements[i]);
    } else {
        for (const auto& e : elements) out.push_back(&e);
    }
    return out;
}

FiniteGroup close_group(const PBWPresentation& a, const std::vector<GradedMap>& gens,
                        long cap) {
    if (cap < 1) throw UserError("close_group: cap must be at least 1");
    const long M = a.field_order();
    FiniteGroup g;
    GradedMap id{Matrix::identity(a.n(), M), true};
    g.elements.push_back(id);
    g.words.push_back({});
    g.index.emplace(id.mat.key(), 0);
    for (const auto& gen : gens) {
        if (!gen.validated) throw UserError("close_group: generators must be validated");
        if (gen.mat.rows != a.n()) throw UserError("close_group: generator size mismatch");
    }
    std::deque<int> frontier;
    frontier.push_back(0);
    while (!frontier.empty()) {
        int cur = frontier.front();
        frontier.pop_front();
        for (size_t k = 0; k < gens.size(); ++k) {
            Matrix prod = g.elements[cur].mat * gens[k].mat;
            std::string key = prod.key();
            auto it = g.index.find(key);
            if (it != g.index.end()) continue;
            if (static_cast<long>(g.elements.size()) + 1 > cap)
                throw UserError("group order exceeds cap (" + std::to_string(cap) +
                                "); the group may be infinite or the cap too small");
            int idx = static_cast<int>(g.elements.size());
            g.elements.push_back(GradedMap{std::move(prod), true});
            std::vector<int> word = g.words[cur];
            word.push_back(static_cast<int>(k));
            g.words.push_back(std::move(word));
            g.index.emplace(std::move(key), idx);
            frontier.push_back(idx);
        }
    }
    // Record generator positions inside the closure.
    for (const auto& gen : gens) {
        int idx = g.find(gen.mat);
        if (idx >= 0 &&
            std::find(g.generators.begin(), g.generators.end(), idx) == g.generators.end())
            g.generators.push_back(idx);
    }
    return g;
}

long element_order(const GradedMap& g, long cap) {
    Matrix acc = g.mat;
    for (long k = 1; k <= cap; ++k) {
        if (acc.is_identity()) return k;
        acc = acc * g.mat;
    }
    throw UserError("element order exceeds cap " + std::to_string(cap));
}

long monomial_cycle_order(const GradedMap& g) {
    const int n = g.n();
    const long M = g.mat.field_order;
    std::vector<int> target(n, -1);
    int minus_count = 0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const CycScalar& c = g.mat.at(i, j);
            if (c.is_zero()) continue;
            if (target[j] != -1)
                throw UserError("monomial_cycle_order: matrix is not monomial");
            target[j] = i;
            if (c == -CycScalar::one(M))
                ++minus_count;
            else if (!c.is_one())
                throw UserError("monomial_cycle_order: weights must be +-1");
        }
        if (target[j] == -1) throw UserError("monomial_cycle_order: matrix is not monomial");
    }
    // The permutation must be a single n-cycle.
    std::vector<bool> seen(n, false);
    int cur = 0, len = 0;
    while (!seen[cur]) {
        seen[cur] = true;
        cur = target[cur];
        ++len;
    }
    if (len != n || cur != 0)
        throw UserError("monomial_cycle_order: permutation is not a single n-cycle");
    return (minus_count % 2 == 0) ? n : 2L * n;
}

std::map<long, long> order_distribution(const FiniteGroup& g) {
    std::map<long, long> dist;
    for (const auto& e : g.elements) dist[element_order(e, g.order())] += 1;
    return dist;
}

OrderComparison compare_order_distributions(const FiniteGroup& a, const FiniteGroup& b) {
    OrderComparison out{order_distribution(a), order_distribution(b), true, std::nullopt};
    std::vector<long> orders;
    for (const auto& [o, c] : out.left) orders.push_back(o);
    for (const auto& [o, c] : out.right) orders.push_back(o);
    std::sort(orders.begin(), orders.end());
    orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
    for (long o : orders) {
        long ca = out.left.count(o) ? out.left.at(o) : 0;
        long cb = out.right.count(o) ? out.right.at(o) : 0;
        if (ca != cb) {
            out.identical = false;
            out.first_differing = o;
            break;
        }
    }
    return out;
}

std::optional<std::pair<int, int>> find_dicyclic_pair(const FiniteGroup& g, long m) {
    if (g.order() != 4 * m) return std::nullopt;
    for (int ia = 0; ia < g.order(); ++ia) {
        const GradedMap& a = g.elements[ia];
        if (element_order(a, g.order()) != 2 * m) continue;
        // Powers of a.
        std::vector<std::string> cyc;
        Matrix acc = Matrix::identity(a.n(), a.mat.field_order);
        for (long k = 0; k < 2 * m; ++k) {
            cyc.push_back(acc.key());
            acc = acc * a.mat;
        }
        Matrix am = Matrix::identity(a.n(), a.mat.field_order);
        for (long k = 0; k < m; ++k) am = am * a.mat;
        auto a_inv = try_inverse(a.mat);
        for (int ib = 0; ib < g.order(); ++ib) {
            const Matrix& b = g.elements[ib].mat;
            if (std::find(cyc.begin(), cyc.end(), b.key()) != cyc.end()) continue;
            if (!(b * b == am)) continue;
            auto b_inv = try_inverse(b);
            if (!b_inv) continue;
            if (*b_inv * a.mat * b == *a_inv) return std::make_pair(ia, ib);
        }
    }
    return std::nullopt;
}

} // namespace qreflect
