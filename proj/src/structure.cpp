#include "qreflect/structure.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "qreflect/errors.hpp"

namespace qreflect {

std::string QRClass::variant_str() const {
    switch (variant) {
        case QRVariant::NotQR: return "not_quasi_reflection";
        case QRVariant::Reflection: return "reflection";
        case QRVariant::Mystic: return "mystic_reflection";
    }
    return "?";
}

std::vector<std::vector<int>> block_decomposition(const PBWPresentation& a) {
    return block_partition(a).parts;
}

namespace {

int eigen_multiplicity(const Matrix& m, const CycScalar& mu) {
    Matrix shifted = m;
    for (int i = 0; i < m.rows; ++i) shifted.at(i, i) = shifted.at(i, i) - mu;
    return static_cast<int>(kernel_basis(shifted).size());
}

Vec eigenvector_for(const Matrix& m, const CycScalar& mu) {
    Matrix shifted = m;
    for (int i = 0; i < m.rows; ++i) shifted.at(i, i) = shifted.at(i, i) - mu;
    auto basis = kernel_basis(shifted);
    if (basis.empty()) throw ConsistencyError("expected eigenvector is missing");
    return basis.front();
}

NCPoly vec_to_poly(const Vec& v, int n) {
    NCPoly out;
    for (int i = 0; i < n; ++i) out.add_term(Monomial::var(n, i), v[i]);
    return out;
}

// Detects the standard form tau_{s,t,lambda}: column s = lambda e_t, column
// t = -lambda^{-1} e_s, identity elsewhere.
std::optional<std::tuple<int, int, CycScalar>> standard_tau_form(const Matrix& m) {
    const int n = m.rows;
    const long M = m.field_order;
    std::vector<int> moved;
    for (int j = 0; j < n; ++j) {
        bool is_id_col = true;
        for (int i = 0; i < n; ++i) {
            const CycScalar& c = m.at(i, j);
            if (i == j ? !c.is_one() : !c.is_zero()) is_id_col = false;
        }
        if (!is_id_col) moved.push_back(j);
    }
    if (moved.size() != 2) return std::nullopt;
    int s = moved[0], t = moved[1];
    auto check = [&](int ss, int tt) -> std::optional<std::tuple<int, int, CycScalar>> {
        const CycScalar& lam = m.at(tt, ss);
        if (lam.is_zero()) return std::nullopt;
        for (int i = 0; i < n; ++i) {
            if (i != tt && !m.at(i, ss).is_zero()) return std::nullopt;
            if (i != ss && !m.at(i, tt).is_zero()) return std::nullopt;
        }
        if (m.at(ss, tt) != -lam.inverse()) return std::nullopt;
        return std::make_tuple(ss, tt, lam);
    };
    if (auto r = check(s, t)) return r;
    if (auto r = check(t, s)) return r;
    return std::nullopt;
}

} // namespace

QRClass classify_quasi_reflection(const PBWPresentation& a, const GradedMap& g) {
    if (!g.validated) throw UserError("classify: map has not been validated");
    const long M = a.field_order();
    const int n = a.n();
    QRClass cls;
    cls.order = element_order(g);
    cls.det = det(g.mat);
    const CycScalar one = CycScalar::one(M);

    int mult_one = eigen_multiplicity(g.mat, one);
    if (mult_one == n) return cls; // identity: not a quasi-reflection by convention

    if (mult_one == n - 1) {
        // Finite order makes g diagonalizable, so the remaining eigenvalue is
        // det(g) and differs from 1.
        cls.variant = QRVariant::Reflection;
        cls.lambda = cls.det;
        cls.hdet = cls.det;
        Vec v = eigenvector_for(g.mat, cls.det);
        cls.eigenvector = vec_to_poly(v, n);
        if (a.is_skew() && !is_normal_deg1(a, *cls.eigenvector))
            throw ConsistencyError("reflection has a non-normal non-invariant eigenvector");
    } else if (cls.order == 4 && mult_one == n - 2) {
        if (M % 4 != 0)
            throw UserError("classification needs i = zeta_4 in the working field; "
                            "enlarge the field order to a multiple of 4");
        const CycScalar imag = CycScalar::zeta(M, M / 4);
        if (eigen_multiplicity(g.mat, imag) == 1 &&
            eigen_multiplicity(g.mat, -imag) == 1) {
            cls.variant = QRVariant::Mystic;
            cls.lambda = -one;
            cls.hdet = -one;
            if (cls.det != one)
                throw ConsistencyError("mystic reflection with determinant != 1");
            cls.mystic_eigenvectors = std::make_pair(
                vec_to_poly(eigenvector_for(g.mat, imag), n),
                vec_to_poly(eigenvector_for(g.mat, -imag), n));
            if (auto form = standard_tau_form(g.mat)) {
                auto [s, t, lam] = *form;
                cls.mystic_pair = std::make_pair(s, t);
            }
        }
    }

    if (cls.is_qr()) {
        TruncSeries tr = trace_series(a, g, 12);
        if (!matches_qr_form(tr, n, *cls.lambda))
            throw ConsistencyError("classified quasi-reflection fails the trace-form "
                                   "cross-check: " + tr.str());
    }
    return cls;
}

std::pair<NCPoly, NCPoly> mystic_anticommuting_pair(const PBWPresentation& a,
                                                    const GradedMap& g, const QRClass& cls) {
    if (cls.variant != QRVariant::Mystic || !cls.mystic_eigenvectors)
        throw UserError("anticommuting pair: mystic classification required");
    const long M = a.field_order();
    const auto& [y, z] = *cls.mystic_eigenvectors;
    std::vector<CycScalar> candidates{
        CycScalar::one(M), -CycScalar::one(M)};
    if (M % 4 == 0) {
        candidates.push_back(CycScalar::zeta(M, M / 4));
        candidates.push_back(-CycScalar::zeta(M, M / 4));
    }
    // The right mixing satisfies kappa^2 = y^2 / z^2; add it when it exists
    // in the field.
    NCPoly y2 = a.multiply(y, y);
    NCPoly z2 = a.multiply(z, z);
    if (!z2.is_zero() && !y2.is_zero()) {
        const auto& [m0, c0] = *z2.terms().begin();
        CycScalar rho = y2.coeff(m0, M) / c0;
        if (y2 == z2.scaled(rho)) {
            if (auto e = rho.zeta_exponent()) {
                if (*e % 2 == 0) candidates.push_back(CycScalar::zeta(M, *e / 2));
            }
        }
    }
    for (const auto& kappa : candidates) {
        NCPoly u = y + z.scaled(kappa);
        if (u.is_zero()) continue;
        NCPoly v = apply(a, g, u);
        NCPoly anti = a.multiply(v, u) + a.multiply(u, v);
        if (anti.is_zero()) return {u, v};
    }
    throw ConsistencyError("no anticommuting pair found in the mystic eigenplane "
                           "(field may be too small)");
}

// --- block-circle decomposition ---

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int x, int y) {
        x = find(x);
        y = find(y);
        if (x == y) return;
        if (y < x) std::swap(x, y);
        parent[y] = x; // smallest index becomes the representative
    }
};

bool element_in_part(const Matrix& m, const std::vector<int>& part) {
    const int n = m.rows;
    std::vector<bool> inside(n, false);
    for (int i : part) inside[i] = true;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const CycScalar& c = m.at(i, j);
            if (!inside[j]) {
                // outside columns must be identity
                if (i == j ? !c.is_one() : !c.is_zero()) return false;
            } else if (!inside[i] && !c.is_zero()) {
                return false;
            }
        }
    }
    return true;
}

} // namespace

BlockCircleDecomp block_circle_decomposition(const PBWPresentation& a, const FiniteGroup& g) {
    if (!a.is_skew())
        throw UserError("block-circle decomposition is defined for skew rings only");
    const int n = a.n();
    std::vector<QRClass> classes;
    classes.reserve(g.order());
    for (const auto& e : g.elements) classes.push_back(classify_quasi_reflection(a, e));

    Partition blocks = block_partition(a);
    UnionFind uf(n);
    std::vector<bool> in_circle(n, false);
    for (int k = 0; k < g.order(); ++k) {
        if (classes[k].variant != QRVariant::Mystic) continue;
        if (!classes[k].mystic_pair)
            throw ConsistencyError("mystic reflection not in standard form in the x-basis");
        auto [s, t] = *classes[k].mystic_pair;
        for (int i : {s, t}) {
            if (blocks.parts[blocks.part_of(i)].size() != 1)
                throw ConsistencyError("mystic-reflection index " + std::to_string(i + 1) +
                                       " is not a singleton block");
        }
        uf.unite(s, t);
        in_circle[s] = in_circle[t] = true;
    }

    BlockCircleDecomp out;
    std::vector<bool> used(n, false);
    for (int i = 0; i < n; ++i) {
        if (used[i]) continue;
        PartInfo part;
        if (in_circle[i]) {
            int root = uf.find(i);
            for (int j = 0; j < n; ++j)
                if (in_circle[j] && uf.find(j) == root) {
                    part.indices.push_back(j);
                    used[j] = true;
                }
            part.is_circle = true;
        } else {
            part.indices = blocks.parts[blocks.part_of(i)];
            // Circle membership splits blocks only for singletons, so a block
            // reached here is circle-free.
            for (int j : part.indices) used[j] = true;
            part.is_circle = false;
        }
        out.parts.push_back(std::move(part));
    }

    long product = 1;
    for (auto& part : out.parts) {
        for (int k = 0; k < g.order(); ++k)
            if (element_in_part(g.elements[k].mat, part.indices))
                part.member_elements.push_back(k);
        part.subgroup_order = static_cast<long>(part.member_elements.size());
        product *= part.subgroup_order;
        if (part.is_circle) part.circle_params = circle_parameters(a, g, part.indices);
    }

    // When G is generated by quasi-reflections, G = prod G_v.
    std::vector<GradedMap> qrs;
    for (int k = 0; k < g.order(); ++k)
        if (classes[k].is_qr()) qrs.push_back(g.elements[k]);
    FiniteGroup r = close_group(a, qrs, g.order());
    out.group_is_qr_generated = (r.order() == g.order());
    if (out.group_is_qr_generated) {
        if (product != g.order())
            throw ConsistencyError("product of part subgroup orders (" +
                                   std::to_string(product) + ") differs from |G| (" +
                                   std::to_string(g.order()) + ")");
        out.product_order_verified = true;
    }
    return out;
}

std::pair<long, long> circle_parameters(const PBWPresentation& a, const FiniteGroup& g,
                                        const std::vector<int>& circle) {
    if (circle.size() < 2) throw UserError("circle_parameters: circle needs >= 2 indices");
    const long M = a.field_order();
    const int n = a.n();
    const CycScalar one = CycScalar::one(M);

    auto theta_set_size = [&](int i) {
        long count = 1; // lambda = 1 joins by convention
        for (const auto& e : g.elements) {
            if (!e.mat.is_diagonal()) continue;
            bool others_one = true;
            for (int j = 0; j < n; ++j)
                if (j != i && !e.mat.at(j, j).is_one()) {
                    others_one = false;
                    break;
                }
            if (others_one && !e.mat.at(i, i).is_one()) ++count;
        }
        return count;
    };
    auto is_tau_on = [&](const Matrix& m, int s, int t) {
        const CycScalar& lam = m.at(t, s);
        if (lam.is_zero()) return false;
        if (m.at(s, t) != -lam.inverse()) return false;
        for (int r = 0; r < n; ++r) {
            for (int c2 = 0; c2 < n; ++c2) {
                if ((r == t && c2 == s) || (r == s && c2 == t)) continue;
                const CycScalar& x = m.at(r, c2);
                if (c2 == s || c2 == t || r == s || r == t) {
                    if (!x.is_zero()) return false;
                } else if (r == c2 ? !x.is_one() : !x.is_zero()) {
                    return false;
                }
            }
        }
        return true;
    };
    auto tau_set_size = [&](int i, int j) {
        long count = 0;
        for (const auto& e : g.elements)
            if (is_tau_on(e.mat, i, j)) ++count;
        return count;
    };

    long alpha = theta_set_size(circle[0]);
    for (size_t k = 1; k < circle.size(); ++k)
        if (theta_set_size(circle[k]) != alpha)
            throw ConsistencyError("Theta_i depends on the index inside a circle");
    long beta = -1;
    for (int i : circle)
        for (int j : circle) {
            if (i == j) continue;
            long b = tau_set_size(i, j);
            if (beta == -1)
                beta = b;
            else if (b != beta)
                throw ConsistencyError("T_{i,j} depends on the pair inside a circle");
        }
    if (beta <= 0 || beta % 2 != 0)
        throw ConsistencyError("beta must be a positive even integer, got " +
                               std::to_string(beta));
    if (beta % alpha != 0)
        throw ConsistencyError("alpha does not divide beta: alpha = " +
                               std::to_string(alpha) + ", beta = " + std::to_string(beta));
    (void)one;
    return {alpha, beta};
}

namespace {

std::string part_structure_str(const PartInfo& part) {
    std::ostringstream out;
    if (part.is_circle) {
        out << "M(" << part.indices.size() << "," << part.circle_params->first << ","
            << part.circle_params->second << ")";
    } else if (part.subgroup_order == 1) {
        out << "trivial";
    } else {
        out << "classical reflection group of rank " << part.indices.size() << " (order "
            << part.subgroup_order << ")";
    }
    return out.str();
}

// Prop-5.8 structure for the quantum matrix algebra: QR-generated groups are
// dihedral (or C2); the diagonal subgroup d_c has index 2.
std::string quantum_matrix_structure(const FiniteGroup& g) {
    long diag = 0;
    for (const auto& e : g.elements)
        if (e.mat.is_diagonal()) ++diag;
    std::ostringstream out;
    if (g.order() == 1)
        out << "trivial";
    else if (g.order() == 2)
        out << "cyclic of order 2";
    else
        out << "dihedral of order " << (2 * diag) << " (m = " << diag << ")";
    return out.str();
}

} // namespace

StcVerdict decide_stc(const PBWPresentation& a, const FiniteGroup& g) {
    StcVerdict v;
    v.element_classes.reserve(g.order());
    for (const auto& e : g.elements)
        v.element_classes.push_back(classify_quasi_reflection(a, e));

    std::vector<GradedMap> qrs;
    for (int k = 0; k < g.order(); ++k)
        if (v.element_classes[k].is_qr()) qrs.push_back(g.elements[k]);
    v.reflection_subgroup = close_group(a, qrs, g.order());
    v.generated_by_qr = (v.reflection_subgroup.order() == g.order());

    // R is normal in G: conjugating its generators stays inside.
    v.r_is_normal = true;
    for (const auto& ge : g.elements) {
        auto inv = try_inverse(ge.mat);
        if (!inv) throw ConsistencyError("group element is singular");
        for (const auto& r : qrs) {
            Matrix conj = ge.mat * r.mat * *inv;
            if (v.reflection_subgroup.find(conj) < 0) {
                v.r_is_normal = false;
                break;
            }
        }
        if (!v.r_is_normal) break;
    }
    if (!v.r_is_normal)
        throw ConsistencyError("the subgroup generated by quasi-reflections is not normal");

    if (a.is_skew()) {
        v.decomposition = block_circle_decomposition(a, g);
        if (v.generated_by_qr) {
            std::ostringstream st;
            bool first = true;
            for (const auto& part : v.decomposition->parts) {
                if (!first) st << " x ";
                first = false;
                st << part_structure_str(part);
            }
            v.structure = st.str();
        } else {
            v.structure = "not generated by quasi-reflections";
        }
    } else {
        v.structure = v.generated_by_qr ? quantum_matrix_structure(g)
                                        : "not generated by quasi-reflections";
    }
    v.fixed_ring_verdict = v.generated_by_qr
                               ? "A^G has finite global dimension"
                               : "A^G has infinite global dimension";
    return v;
}

FiniteGroup make_M_group(const PBWPresentation& a, long alpha, long beta, long cap) {
    if (!a.is_skew()) throw UserError("M(n,alpha,beta) lives on k_{-1}[x1..xn]");
    const int n = a.n();
    const long M = a.field_order();
    if (n < 2) throw UserError("M(n,alpha,beta) requires n >= 2");
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (a.p(i, j) != -CycScalar::one(M))
                throw UserError("M(n,alpha,beta) requires all p_ij = -1");
    if (alpha < 1 || beta < 1 || beta % alpha != 0 || beta % 2 != 0)
        throw UserError("M(n,alpha,beta) requires alpha | beta and 2 | beta");
    if (M % beta != 0 || (alpha > 1 && M % alpha != 0))
        throw UserError("zeta_beta outside the working field; enlarge the field order");

    std::vector<GradedMap> gens;
    for (int i = 0; i < n; ++i)
        for (long k = 1; k < alpha; ++k)
            gens.push_back(make_theta(a, i, CycScalar::zeta(M, (M / alpha) * k)));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            for (long k = 0; k < beta; ++k)
                gens.push_back(make_tau(a, i, j, CycScalar::zeta(M, (M / beta) * k)));
        }
    FiniteGroup g = close_group(a, gens, cap);

    std::vector<int> full_circle(n);
    std::iota(full_circle.begin(), full_circle.end(), 0);
    auto params = circle_parameters(a, g, full_circle);
    if (params.first != alpha || params.second != beta)
        throw ConsistencyError("M-group round trip failed: got (" +
                               std::to_string(params.first) + "," +
                               std::to_string(params.second) + ")");
    return g;
}

} // namespace qreflect
