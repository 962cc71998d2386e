#include "qreflect/invariants.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

#include "qreflect/errors.hpp"

namespace qreflect {

NCPoly reynolds(const PBWPresentation& a, const FiniteGroup& g, const NCPoly& f) {
    if (!f.is_homogeneous()) throw UserError("reynolds: homogeneous input required");
    NCPoly sum;
    for (const auto& e : g.elements) sum = sum + apply(a, e, f);
    return sum.scaled(CycScalar::from_long(a.field_order(), g.order()).inverse());
}

namespace {

struct MonomialEdge {
    int target;
    CycScalar weight;
};

// Images of every degree-d basis monomial under a map whose generator images
// are single terms; absent when some image is not a single term.
std::optional<std::vector<MonomialEdge>> monomial_images(const PBWPresentation& a,
                                                         const GradedMap& g,
                                                         const std::vector<Monomial>& basis) {
    if (!g.mat.is_monomial()) return std::nullopt;
    std::vector<MonomialEdge> out;
    out.reserve(basis.size());
    std::map<Monomial, int, MonomialOrder> position;
    for (size_t i = 0; i < basis.size(); ++i) position.emplace(basis[i], static_cast<int>(i));
    for (const auto& m : basis) {
        NCPoly img = substitute_linear(a, g.mat, NCPoly::term(m, CycScalar::one(a.field_order())));
        if (img.term_count() != 1) return std::nullopt;
        const auto& [tm, tc] = *img.terms().begin();
        out.push_back(MonomialEdge{position.at(tm), tc});
    }
    return out;
}

CycScalar molien_coefficient(const PBWPresentation& a, const FiniteGroup& g, int d) {
    CycScalar sum = CycScalar::zero(a.field_order());
    for (const auto& h : g.elements) sum = sum + trace_on_degree(a, h, d);
    return sum * CycScalar::from_long(a.field_order(), g.order()).inverse();
}

// Sort polynomials by leading monomial so downstream choices are canonical.
void sort_by_leading_term(std::vector<NCPoly>& polys) {
    MonomialOrder less;
    std::stable_sort(polys.begin(), polys.end(), [&](const NCPoly& x, const NCPoly& y) {
        return less(x.terms().begin()->first, y.terms().begin()->first);
    });
}

} // namespace

std::vector<NCPoly> fixed_space_basis(const PBWPresentation& a, const FiniteGroup& g, int d) {
    if (d < 0) throw UserError("fixed_space_basis: degree must be non-negative");
    const long M = a.field_order();
    std::vector<Monomial> basis = a.basis(d);
    const int dim = static_cast<int>(basis.size());
    std::vector<const GradedMap*> gens = g.generating_set();
    std::vector<NCPoly> result;

    if (d == 0) {
        result.push_back(NCPoly::term(Monomial::unit(a.n()), CycScalar::one(M)));
    } else {
        std::vector<std::vector<MonomialEdge>> edges;
        bool all_monomial = true;
        for (const auto* gen : gens) {
            auto img = monomial_images(a, *gen, basis);
            if (!img) {
                all_monomial = false;
                break;
            }
            edges.push_back(std::move(*img));
        }
        if (all_monomial) {
            // Weighted orbit propagation: v fixed iff v_{sigma(a)} = w(a) v_a
            // along every edge, so each consistent orbit contributes one
            // basis vector.
            std::vector<int> state(dim, -1); // -1 unvisited, else orbit id
            std::vector<CycScalar> val(dim, CycScalar::zero(M));
            int orbit_count = 0;
            for (int root = 0; root < dim; ++root) {
                if (state[root] >= 0) continue;
                int orbit = orbit_count++;
                std::vector<int> members{root};
                state[root] = orbit;
                val[root] = CycScalar::one(M);
                bool alive = true;
                for (size_t head = 0; head < members.size(); ++head) {
                    int cur = members[head];
                    for (const auto& gen_edges : edges) {
                        // forward edge cur -> t with weight w
                        const auto& fwd = gen_edges[cur];
                        std::pair<int, CycScalar> steps[1] = {{fwd.target, fwd.weight}};
                        for (const auto& [nxt, w] : steps) {
                            CycScalar expect = w * val[cur];
                            if (state[nxt] == -1) {
                                state[nxt] = orbit;
                                val[nxt] = expect;
                                members.push_back(nxt);
                            } else if (alive && val[nxt] != expect) {
                                alive = false;
                            }
                        }
                    }
                }
                if (alive) {
                    NCPoly p;
                    for (int m : members) p.add_term(basis[m], val[m]);
                    result.push_back(std::move(p));
                }
            }
        } else {
            Matrix stacked(dim * static_cast<int>(gens.size()), dim, M);
            for (size_t k = 0; k < gens.size(); ++k) {
                for (int col = 0; col < dim; ++col) {
                    NCPoly img = substitute_linear(a, gens[k]->mat,
                                                   NCPoly::term(basis[col], CycScalar::one(M)));
                    Vec coords = img.coords(basis, M);
                    for (int row = 0; row < dim; ++row) {
                        CycScalar v = coords[row];
                        if (row == col) v = v - CycScalar::one(M);
                        stacked.at(static_cast<int>(k) * dim + row, col) = v;
                    }
                }
            }
            for (const Vec& v : kernel_basis(stacked))
                result.push_back(NCPoly::from_coords(basis, v));
        }
        sort_by_leading_term(result);
    }

    CycScalar molien = molien_coefficient(a, g, d);
    if (molien != CycScalar::from_long(M, static_cast<long>(result.size())))
        throw ConsistencyError("fixed-space dimension " + std::to_string(result.size()) +
                               " at degree " + std::to_string(d) +
                               " disagrees with the Molien coefficient " + molien.str());
    return result;
}

// Orbit propagation above misses nothing: every orbit edge is traversed
// forward, and sigma is a bijection on the basis, so components are reached
// from their smallest member.

SubalgebraSpans::SubalgebraSpans(const PBWPresentation& a, int max_degree)
    : a_(a), max_degree_(max_degree) {
    spans_.resize(max_degree + 1);
    span_polys_.resize(max_degree + 1);
    spans_[0].emplace(1, a.field_order());
    NCPoly unit = NCPoly::term(Monomial::unit(a.n()), CycScalar::one(a.field_order()));
    spans_[0]->insert(unit.coords(a.basis(0), a.field_order()));
    span_polys_[0].push_back(unit);
}

void SubalgebraSpans::add_generator(const NCPoly& gen) {
    auto deg = gen.degree();
    if (!deg || *deg < 1) throw UserError("subalgebra generator must be homogeneous, degree >= 1");
    gens_.push_back(gen);
    gen_degrees_.push_back(*deg);
    if (*deg <= max_degree_ && spans_[*deg].has_value()) {
        if (spans_[*deg]->insert(gen.coords(a_.basis(*deg), a_.field_order())))
            span_polys_[*deg].push_back(gen);
    }
}

void SubalgebraSpans::ensure(int d) {
    if (d < 0 || d > max_degree_) throw UserError("subalgebra span degree out of range");
    if (spans_[d].has_value()) return;
    for (int e = 0; e < d; ++e) ensure(e);
    const long M = a_.field_order();
    std::vector<Monomial> basis = a_.basis(d);
    spans_[d].emplace(static_cast<int>(basis.size()), M);
    for (size_t k = 0; k < gens_.size(); ++k) {
        int e = gen_degrees_[k];
        if (e > d) continue;
        for (const NCPoly& tail : span_polys_[d - e]) {
            NCPoly prod = a_.multiply(gens_[k], tail);
            if (prod.is_zero()) continue;
            if (spans_[d]->insert(prod.coords(basis, M))) span_polys_[d].push_back(prod);
        }
    }
}

const RowSpan& SubalgebraSpans::span(int d) {
    ensure(d);
    return *spans_[d];
}

bool SubalgebraSpans::contains(int d, const NCPoly& f) {
    ensure(d);
    return spans_[d]->contains(f.coords(a_.basis(d), a_.field_order()));
}

bool GeneratorSet::zero_deficit() const {
    for (const auto& st : status)
        if (st.deficit() != 0) return false;
    return true;
}

GeneratorSet mine_generators(const PBWPresentation& a, const FiniteGroup& g, int D) {
    if (D < 1) throw UserError("mining needs D >= 1");
    GeneratorSet out;
    out.verified_to = D;
    out.label = "mined";
    SubalgebraSpans spans(a, D);
    for (int d = 1; d <= D; ++d) {
        std::vector<NCPoly> fixed = fixed_space_basis(a, g, d);
        DegreeStatus st{d, static_cast<int>(fixed.size()), spans.dim(d)};
        out.status.push_back(st);
        for (const NCPoly& f : fixed) {
            if (spans.contains(d, f)) continue;
            spans.add_generator(f);
            out.generators.push_back(f);
            out.degrees.push_back(d);
        }
    }
    return out;
}

GeneratorSet verify_generators(const PBWPresentation& a, const FiniteGroup& g,
                               const std::vector<NCPoly>& gens, int D) {
    if (D < 1) throw UserError("verification needs D >= 1");
    GeneratorSet out;
    out.generators = gens;
    out.verified_to = D;
    out.label = "verified";
    SubalgebraSpans spans(a, D);
    for (const NCPoly& f : gens) {
        auto deg = f.degree();
        if (!deg) throw UserError("invariant generators must be homogeneous and nonzero");
        out.degrees.push_back(*deg);
        for (const auto* h : g.generating_set())
            if (!(apply(a, *h, f) == f))
                throw UserError("claimed invariant generator is not G-fixed: " + f.str());
        spans.add_generator(f);
    }
    for (int d = 1; d <= D; ++d) {
        std::vector<NCPoly> fixed = fixed_space_basis(a, g, d);
        out.status.push_back(DegreeStatus{d, static_cast<int>(fixed.size()), spans.dim(d)});
    }
    return out;
}

namespace {

std::vector<GradedMap> m_group_generators(const PBWPresentation& a, long alpha, long beta) {
    const long M = a.field_order();
    const int n = a.n();
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
    return gens;
}

} // namespace

GeneratorSet circle_invariant_generators(long field_order, int n, long alpha, long beta,
                                         int mine_depth) {
    if (n < 2) throw UserError("circle generators need n >= 2");
    if (alpha < 1 || beta < 1 || beta % alpha != 0 || beta % 2 != 0)
        throw UserError("circle generators require alpha | beta and 2 | beta");
    if (field_order % 2 != 0 || field_order % beta != 0)
        throw UserError("field order must contain -1 and zeta_beta");
    const long M = field_order;
    std::vector<CycScalar> minus_one(static_cast<size_t>(n) * (n - 1) / 2,
                                     -CycScalar::one(M));
    PBWPresentation a = PBWPresentation::skew(n, M, minus_one);
    std::vector<GradedMap> group_gens = m_group_generators(a, alpha, beta);

    GeneratorSet out;
    if (alpha % 2 == 1) {
        const long two_t = beta / alpha; // beta of the induced group on the z's
        out.label = "explicit (odd alpha)";
        out.verified_to = 0;
        Monomial all_alpha = Monomial::unit(n);
        for (int i = 0; i < n; ++i) all_alpha.e[i] = static_cast<int>(alpha);
        out.generators.push_back(NCPoly::term(all_alpha, CycScalar::one(M)));
        out.degrees.push_back(static_cast<int>(n * alpha));
        for (int k = 1; k <= n - 1; ++k) {
            NCPoly psum;
            for (int i = 0; i < n; ++i) {
                Monomial m = Monomial::unit(n);
                m.e[i] = static_cast<int>(two_t * k * alpha);
                psum.add_term(m, CycScalar::one(M));
            }
            out.generators.push_back(psum);
            out.degrees.push_back(static_cast<int>(two_t * k * alpha));
        }
        for (const NCPoly& f : out.generators)
            for (const auto& gmap : group_gens)
                if (!(apply(a, gmap, f) == f))
                    throw ConsistencyError("explicit circle generator is not fixed: " + f.str());
        return out;
    }

    // Even alpha: the induced group on z_i = x_i^alpha acts on a commutative
    // ring; mine there and rescale degrees.
    std::vector<CycScalar> ones(static_cast<size_t>(n) * (n - 1) / 2, CycScalar::one(M));
    PBWPresentation b = PBWPresentation::skew(n, M, ones);
    FiniteGroup g = close_group(a, group_gens, 10000);
    FiniteGroup induced;
    {
        GradedMap id{Matrix::identity(n, M), true};
        induced.elements.push_back(id);
        induced.words.push_back({});
        induced.index.emplace(id.mat.key(), 0);
        for (const auto& e : g.elements) {
            Matrix z(n, n, M);
            for (int j = 0; j < n; ++j)
                for (int i = 0; i < n; ++i)
                    if (!e.mat.at(i, j).is_zero()) z.at(i, j) = e.mat.at(i, j).pow(alpha);
            std::string key = z.key();
            if (induced.index.count(key)) continue;
            int idx = induced.order();
            induced.elements.push_back(validate_map(b, std::move(z)));
            induced.words.push_back({});
            induced.index.emplace(key, idx);
        }
    }
    GeneratorSet mined = mine_generators(b, induced, mine_depth);
    out.label = "mined (classical case)";
    out.verified_to = mined.verified_to;
    out.status = mined.status;
    for (size_t k = 0; k < mined.generators.size(); ++k) {
        // Substitute z_i -> x_i^alpha back into the x grading.
        NCPoly in_x;
        for (const auto& [m, c] : mined.generators[k].terms()) {
            Monomial mx = Monomial::unit(n);
            for (int i = 0; i < n; ++i) mx.e[i] = m.e[i] * static_cast<int>(alpha);
            in_x.add_term(mx, c);
        }
        for (const auto& gmap : group_gens)
            if (!(apply(a, gmap, in_x) == in_x))
                throw ConsistencyError("mined circle generator is not fixed");
        out.generators.push_back(in_x);
        out.degrees.push_back(mined.degrees[k] * static_cast<int>(alpha));
    }
    return out;
}

// --- abelian free-module identity ---

namespace {

bool is_abelian(const FiniteGroup& g) {
    for (int i = 0; i < g.order(); ++i)
        for (int j = i + 1; j < g.order(); ++j)
            if (!(g.elements[i].mat * g.elements[j].mat ==
                  g.elements[j].mat * g.elements[i].mat))
                return false;
    return true;
}

// Smallest subset of the candidate elements whose closure is all of G,
// searched in lexicographic index order by increasing size.
std::optional<std::vector<int>> minimal_generating_subset(const PBWPresentation& a,
                                                          const FiniteGroup& g,
                                                          const std::vector<int>& candidates) {
    const int m = static_cast<int>(candidates.size());
    for (int size = 1; size <= m; ++size) {
        std::vector<int> pick(size);
        std::function<std::optional<std::vector<int>>(int, int)> rec =
            [&](int start, int depth) -> std::optional<std::vector<int>> {
            if (depth == size) {
                std::vector<GradedMap> gens;
                for (int idx : pick) gens.push_back(g.elements[candidates[idx]]);
                if (close_group(a, gens, g.order()).order() == g.order()) {
                    std::vector<int> chosen;
                    for (int idx : pick) chosen.push_back(candidates[idx]);
                    return chosen;
                }
                return std::nullopt;
            }
            for (int i = start; i < m; ++i) {
                pick[depth] = i;
                if (auto r = rec(i + 1, depth + 1)) return r;
            }
            return std::nullopt;
        };
        if (auto r = rec(0, 0)) return r;
    }
    return std::nullopt;
}

// Joint eigenbasis of a commuting family of finite-order maps, when every
// eigenvalue lies in the field. Returns false when a split fails.
bool jointly_diagonalizable(const PBWPresentation& a, const std::vector<const GradedMap*>& maps) {
    const long M = a.field_order();
    const int n = a.n();
    // Subspaces as column matrices, refined per map.
    std::vector<Matrix> spaces;
    {
        Matrix full = Matrix::identity(n, M);
        spaces.push_back(full);
    }
    for (const auto* g : maps) {
        long o = element_order(*g);
        if (M % o != 0) return false; // eigenvalues outside the field
        std::vector<Matrix> next;
        for (const auto& w : spaces) {
            int captured = 0;
            for (long k = 0; k < o; ++k) {
                CycScalar mu = CycScalar::zeta(M, (M / o) * k);
                // Columns of w spanning ker(g - mu) within the subspace:
                // solve (g - mu) w c = 0 over combinations c.
                Matrix gw(n, w.cols, M);
                for (int col = 0; col < w.cols; ++col) {
                    Vec wc(n, CycScalar::zero(M));
                    for (int i = 0; i < n; ++i) wc[i] = w.at(i, col);
                    Vec img = g->mat * wc;
                    for (int i = 0; i < n; ++i) gw.at(i, col) = img[i] - mu * wc[i];
                }
                auto ker = kernel_basis(gw);
                if (ker.empty()) continue;
                Matrix sub(n, static_cast<int>(ker.size()), M);
                for (size_t c = 0; c < ker.size(); ++c)
                    for (int i = 0; i < n; ++i) {
                        CycScalar acc = CycScalar::zero(M);
                        for (int col = 0; col < w.cols; ++col)
                            acc = acc + w.at(i, col) * ker[c][col];
                        sub.at(i, static_cast<int>(c)) = acc;
                    }
                captured += sub.cols;
                next.push_back(std::move(sub));
            }
            if (captured != w.cols) return false;
        }
        spaces = std::move(next);
    }
    return true;
}

} // namespace

FreeModuleReport free_module_check(const PBWPresentation& a, const FiniteGroup& g, int D) {
    FreeModuleReport rep;
    const long M = a.field_order();
    rep.coset_series = series_zero(M, D);
    rep.lhs = series_zero(M, D);
    rep.rhs = series_zero(M, D);

    rep.abelian = is_abelian(g);
    if (!rep.abelian) throw UserError("free-module check requires an abelian group");

    std::vector<QRClass> classes;
    std::vector<int> qr_indices;
    for (int k = 0; k < g.order(); ++k) {
        classes.push_back(classify_quasi_reflection(a, g.elements[k]));
        if (classes.back().is_qr()) qr_indices.push_back(k);
    }
    std::vector<GradedMap> qrs;
    for (int k : qr_indices) qrs.push_back(g.elements[k]);
    rep.qr_generated =
        g.order() == 1 || close_group(a, qrs, g.order()).order() == g.order();
    if (!rep.qr_generated)
        throw UserError("free-module check requires a group generated by quasi-reflections");

    if (g.order() > 1) {
        auto minimal = minimal_generating_subset(a, g, qr_indices);
        if (!minimal) throw ConsistencyError("no quasi-reflection generating set found");
        rep.minimal_generator_elements = *minimal;
    }

    std::vector<const GradedMap*> chosen;
    bool x_basis_ok = true;
    for (int k : rep.minimal_generator_elements) {
        chosen.push_back(&g.elements[k]);
        const QRClass& c = classes[k];
        if (c.variant == QRVariant::Reflection) {
            rep.reflection_orders.push_back(c.order);
            if (!g.elements[k].mat.is_diagonal()) x_basis_ok = false;
        } else {
            rep.mystic_count += 1;
            if (!c.mystic_pair) x_basis_ok = false;
        }
    }
    if (!x_basis_ok && !jointly_diagonalizable(a, chosen)) {
        rep.basis_change_required = true;
        return rep;
    }

    // Coset degrees: r in [0, o) per reflection; (0, 1, 1, 2) per mystic.
    rep.coset_series.c[0] = CycScalar::one(M);
    for (long o : rep.reflection_orders) {
        TruncSeries factor = series_zero(M, D);
        for (int k = 0; k < static_cast<int>(o) && k <= D; ++k)
            factor.c[k] = CycScalar::one(M);
        rep.coset_series = series_mul(rep.coset_series, factor);
    }
    for (int j = 0; j < rep.mystic_count; ++j) {
        TruncSeries factor = series_zero(M, D);
        factor.c[0] = CycScalar::one(M);
        if (D >= 1) factor.c[1] = CycScalar::from_long(M, 2);
        if (D >= 2) factor.c[2] = CycScalar::one(M);
        rep.coset_series = series_mul(rep.coset_series, factor);
    }

    rep.lhs = expand_product_form(M, std::vector<int>(a.n(), 1), D);
    rep.rhs = series_mul(rep.coset_series, molien_fixed_hilbert(a, g, D));
    rep.identity_holds = true;
    for (int d = 0; d <= D; ++d) {
        if (rep.lhs.c[d] != rep.rhs.c[d]) {
            rep.identity_holds = false;
            rep.first_mismatch_degree = d;
            break;
        }
    }
    return rep;
}

PowerRelationsReport quantum_power_relations(const PBWPresentation& c, const CycScalar& q) {
    if (c.kind() != RingKind::QuantumMatrix)
        throw UserError("power relations are about the quantum matrix algebra");
    auto m = q.root_order();
    if (!m || *m < 3) throw UserError("q must be a primitive m-th root of unity, m >= 3");
    PowerRelationsReport rep;
    rep.n = (*m % 2 == 1) ? *m : *m / 2;
    CycScalar ql = q.lift(c.field_order());
    rep.q_n_squared = ql.pow(rep.n * rep.n);
    const long M = c.field_order();
    auto var = [&](int i) {
        return NCPoly::term(Monomial::var(4, i), CycScalar::one(M));
    };
    std::vector<NCPoly> X(4);
    for (int i = 0; i < 4; ++i) X[i] = c.power(var(i), static_cast<int>(rep.n));
    const CycScalar one = CycScalar::one(M);
    struct Rel {
        int left, right;
        CycScalar coeff;
        const char* name;
    };
    std::vector<Rel> rels = {
        {1, 0, rep.q_n_squared, "X12 X11 = q^{n^2} X11 X12"},
        {2, 0, rep.q_n_squared, "X21 X11 = q^{n^2} X11 X21"},
        {3, 1, rep.q_n_squared, "X22 X12 = q^{n^2} X12 X22"},
        {3, 2, rep.q_n_squared, "X22 X21 = q^{n^2} X21 X22"},
        {2, 1, one, "X21 X12 = X12 X21"},
        {3, 0, one, "X22 X11 = X11 X22"},
    };
    rep.all_hold = true;
    for (const auto& r : rels) {
        NCPoly lhs = c.multiply(X[r.left], X[r.right]);
        NCPoly rhs = c.multiply(X[r.right], X[r.left]).scaled(r.coeff);
        if (!(lhs == rhs)) {
            rep.all_hold = false;
            rep.failed.push_back(r.name);
        }
    }
    return rep;
}

} // namespace qreflect
