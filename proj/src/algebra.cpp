#include "qreflect/algebra.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>

#include "qreflect/errors.hpp"

namespace qreflect {

int Monomial::degree() const {
    int d = 0;
    for (int x : e) d += x;
    return d;
}

Monomial Monomial::unit(int n) {
    return Monomial{std::vector<int>(n, 0)};
}

Monomial Monomial::var(int n, int i) {
    Monomial m = unit(n);
    m.e[i] = 1;
    return m;
}

std::vector<int> Monomial::word() const {
    std::vector<int> w;
    for (int i = 0; i < n(); ++i)
        for (int k = 0; k < e[i]; ++k) w.push_back(i);
    return w;
}

Monomial Monomial::from_word(int n, const std::vector<int>& w) {
    Monomial m = unit(n);
    for (int i : w) m.e[i] += 1;
    return m;
}

std::string Monomial::str() const {
    std::ostringstream out;
    bool first = true;
    for (int i = 0; i < n(); ++i) {
        if (e[i] == 0) continue;
        if (!first) out << "*";
        first = false;
        out << "x" << (i + 1);
        if (e[i] > 1) out << "^" << e[i];
    }
    if (first) out << "1";
    return out.str();
}

bool MonomialOrder::operator()(const Monomial& a, const Monomial& b) const {
    int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    for (int i = a.n() - 1; i >= 0; --i) {
        if (a.e[i] != b.e[i]) return a.e[i] < b.e[i];
    }
    return false;
}

NCPoly NCPoly::term(Monomial m, CycScalar c) {
    NCPoly p;
    if (!c.is_zero()) p.terms_.emplace(std::move(m), std::move(c));
    return p;
}

std::optional<int> NCPoly::degree() const {
    if (terms_.empty()) return std::nullopt;
    int d = terms_.begin()->first.degree();
    for (const auto& [m, c] : terms_)
        if (m.degree() != d) return std::nullopt;
    return d;
}

bool NCPoly::is_homogeneous() const {
    return terms_.empty() || degree().has_value();
}

void NCPoly::add_term(const Monomial& m, const CycScalar& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        terms_.emplace(m, c);
        return;
    }
    it->second = it->second + c;
    if (it->second.is_zero()) terms_.erase(it);
}

CycScalar NCPoly::coeff(const Monomial& m, long field_order) const {
    auto it = terms_.find(m);
    if (it == terms_.end()) return CycScalar::zero(field_order);
    return it->second;
}

NCPoly NCPoly::operator+(const NCPoly& o) const {
    NCPoly out = *this;
    for (const auto& [m, c] : o.terms_) out.add_term(m, c);
    return out;
}

NCPoly NCPoly::operator-(const NCPoly& o) const {
    NCPoly out = *this;
    for (const auto& [m, c] : o.terms_) out.add_term(m, -c);
    return out;
}

NCPoly NCPoly::scaled(const CycScalar& c) const {
    NCPoly out;
    if (c.is_zero()) return out;
    for (const auto& [m, x] : terms_) out.terms_.emplace(m, x * c);
    return out;
}

bool NCPoly::operator==(const NCPoly& o) const {
    if (terms_.size() != o.terms_.size()) return false;
    auto it = terms_.begin();
    auto jt = o.terms_.begin();
    for (; it != terms_.end(); ++it, ++jt) {
        if (!(it->first == jt->first) || it->second != jt->second) return false;
    }
    return true;
}

Vec NCPoly::coords(const std::vector<Monomial>& basis, long field_order) const {
    Vec v(basis.size(), CycScalar::zero(field_order));
    for (size_t i = 0; i < basis.size(); ++i) {
        auto it = terms_.find(basis[i]);
        if (it != terms_.end()) v[i] = it->second;
    }
    return v;
}

NCPoly NCPoly::from_coords(const std::vector<Monomial>& basis, const Vec& v) {
    NCPoly out;
    for (size_t i = 0; i < basis.size(); ++i) out.add_term(basis[i], v[i]);
    return out;
}

std::string NCPoly::str(const std::vector<std::string>& var_names) const {
    if (terms_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        std::string cs = c.str();
        if (!first) out << " + ";
        first = false;
        std::ostringstream ms;
        bool mfirst = true;
        for (int i = 0; i < m.n(); ++i) {
            if (m.e[i] == 0) continue;
            if (!mfirst) ms << "*";
            mfirst = false;
            if (var_names.empty())
                ms << "x" << (i + 1);
            else
                ms << var_names[i];
            if (m.e[i] > 1) ms << "^" << m.e[i];
        }
        if (mfirst) {
            out << cs;
        } else if (c.is_one()) {
            out << ms.str();
        } else {
            if (cs.find(' ') != std::string::npos) cs = "(" + cs + ")";
            out << cs << "*" << ms.str();
        }
    }
    return out.str();
}

// --- PBWPresentation ---

PBWPresentation PBWPresentation::skew(int n, long field_order,
                                      const std::vector<CycScalar>& p_upper) {
    if (n < 1) throw UserError("skew ring needs at least one generator");
    if (static_cast<int>(p_upper.size()) != n * (n - 1) / 2)
        throw UserError("skew ring expects n(n-1)/2 upper parameters");
    PBWPresentation a;
    a.n_ = n;
    a.field_order_ = field_order;
    a.kind_ = RingKind::Skew;
    a.tails_trivial_ = true;
    a.p_full_.assign(static_cast<size_t>(n) * n, CycScalar::one(field_order));
    size_t k = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j, ++k) {
            CycScalar pij = p_upper[k];
            if (pij.order() != field_order)
                throw UserError("skew parameter field order mismatch");
            if (pij.is_zero()) throw UserError("parameter must be nonzero: p_" +
                                               std::to_string(i + 1) + std::to_string(j + 1));
            a.p_full_[static_cast<size_t>(i) * n + j] = pij;
            a.p_full_[static_cast<size_t>(j) * n + i] = pij.inverse();
            a.rules_[{i, j}] = RewriteRule{pij, NCPoly::zero()};
        }
    }
    a.names_.resize(n);
    for (int i = 0; i < n; ++i) a.names_[i] = "x" + std::to_string(i + 1);
    return a;
}

PBWPresentation PBWPresentation::quantum_matrix(const CycScalar& q) {
    if (q.is_zero()) throw UserError("quantum matrix parameter q must be nonzero");
    const long M = q.order();
    PBWPresentation a;
    a.n_ = 4;
    a.field_order_ = M;
    a.kind_ = RingKind::QuantumMatrix;
    a.tails_trivial_ = false;
    const CycScalar one = CycScalar::one(M);
    CycScalar qinv = q.inverse();
    // Generators ordered (x11, x12, x21, x22) = (0, 1, 2, 3).
    a.rules_[{0, 1}] = RewriteRule{q, NCPoly::zero()};        // x12 x11 = q x11 x12
    a.rules_[{0, 2}] = RewriteRule{q, NCPoly::zero()};        // x21 x11 = q x11 x21
    a.rules_[{1, 2}] = RewriteRule{one, NCPoly::zero()};      // x21 x12 = x12 x21
    a.rules_[{1, 3}] = RewriteRule{q, NCPoly::zero()};        // x22 x12 = q x12 x22
    a.rules_[{2, 3}] = RewriteRule{q, NCPoly::zero()};        // x22 x21 = q x21 x22
    Monomial cross = Monomial::unit(4);
    cross.e[1] = 1;
    cross.e[2] = 1;
    // x22 x11 = x11 x22 + (q^-1 - q) x12 x21
    a.rules_[{0, 3}] = RewriteRule{one, NCPoly::term(cross, qinv - q)};
    a.names_ = {"x11", "x12", "x21", "x22"};
    return a;
}

PBWPresentation PBWPresentation::general(int n, long field_order,
                                         std::map<std::pair<int, int>, RewriteRule> rules) {
    PBWPresentation a;
    a.n_ = n;
    a.field_order_ = field_order;
    a.kind_ = RingKind::General;
    a.tails_trivial_ = true;
    MonomialOrder less;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            auto it = rules.find({i, j});
            if (it == rules.end())
                throw UserError("missing rewrite rule for pair (" + std::to_string(i + 1) +
                                "," + std::to_string(j + 1) + ")");
            if (it->second.lead.is_zero())
                throw UserError("parameter must be nonzero: leading coefficient of pair (" +
                                std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
            Monomial lead = Monomial::unit(n);
            lead.e[i] += 1;
            lead.e[j] += 1;
            for (const auto& [m, c] : it->second.tail.terms()) {
                if (m.degree() != 2)
                    throw UserError("rewrite tails must be homogeneous of degree 2");
                if (!less(m, lead))
                    throw UserError("rewrite tail is not below the leading monomial "
                                    "in the term order");
            }
            if (!it->second.tail.is_zero()) a.tails_trivial_ = false;
        }
    }
    a.rules_ = std::move(rules);
    a.names_.resize(n);
    for (int i = 0; i < n; ++i) a.names_[i] = "x" + std::to_string(i + 1);
    a.check_overlaps();
    return a;
}

const CycScalar& PBWPresentation::p(int i, int j) const {
    if (kind_ != RingKind::Skew) throw UserError("parameter matrix defined for skew rings only");
    return p_full_[static_cast<size_t>(i) * n_ + j];
}

const RewriteRule& PBWPresentation::rule(int i, int j) const {
    auto it = rules_.find({i, j});
    if (it == rules_.end()) throw UserError("no rewrite rule for this pair");
    return it->second;
}

NCPoly PBWPresentation::normal_order(const std::vector<int>& word,
                                     const CycScalar& coeff) const {
    for (int i : word)
        if (i < 0 || i >= n_) throw UserError("generator index out of range");
    NCPoly result;
    if (coeff.is_zero()) return result;

    if (tails_trivial_) {
        // No branching: collect one scalar factor per inversion.
        CycScalar c = coeff;
        std::vector<int> w = word;
        for (size_t k = 1; k < w.size(); ++k) {
            int v = w[k];
            size_t pos = k;
            while (pos > 0 && w[pos - 1] > v) {
                c = c * rule(v, w[pos - 1]).lead;
                w[pos] = w[pos - 1];
                --pos;
            }
            w[pos] = v;
        }
        result.add_term(Monomial::from_word(n_, w), c);
        return result;
    }

    std::vector<std::pair<CycScalar, std::vector<int>>> stack;
    stack.emplace_back(coeff, word);
    while (!stack.empty()) {
        auto [c, w] = std::move(stack.back());
        stack.pop_back();
        size_t k = 0;
        bool sorted = true;
        for (; k + 1 < w.size(); ++k) {
            if (w[k] > w[k + 1]) {
                sorted = false;
                break;
            }
        }
        if (sorted) {
            result.add_term(Monomial::from_word(n_, w), c);
            continue;
        }
        const int j = w[k], i = w[k + 1];
        const RewriteRule& r = rule(i, j);
        std::vector<int> swapped = w;
        std::swap(swapped[k], swapped[k + 1]);
        stack.emplace_back(c * r.lead, std::move(swapped));
        for (const auto& [m, tc] : r.tail.terms()) {
            std::vector<int> t = m.word();
            std::vector<int> spliced;
            spliced.reserve(w.size());
            spliced.insert(spliced.end(), w.begin(), w.begin() + k);
            spliced.insert(spliced.end(), t.begin(), t.end());
            spliced.insert(spliced.end(), w.begin() + k + 2, w.end());
            stack.emplace_back(c * tc, std::move(spliced));
        }
    }
    return result;
}

NCPoly PBWPresentation::multiply(const NCPoly& f, const NCPoly& g) const {
    NCPoly out;
    for (const auto& [mf, cf] : f.terms()) {
        std::vector<int> wf = mf.word();
        for (const auto& [mg, cg] : g.terms()) {
            std::vector<int> w = wf;
            std::vector<int> wg = mg.word();
            w.insert(w.end(), wg.begin(), wg.end());
            NCPoly part = normal_order(w, cf * cg);
            for (const auto& [m, c] : part.terms()) out.add_term(m, c);
        }
    }
    return out;
}

NCPoly PBWPresentation::power(const NCPoly& f, int e) const {
    NCPoly acc = NCPoly::term(Monomial::unit(n_), CycScalar::one(field_order_));
    for (int k = 0; k < e; ++k) acc = multiply(acc, f);
    return acc;
}

namespace {

void enumerate_exponents(int n, int degree, std::vector<int>& cur, int pos,
                         std::vector<Monomial>& out) {
    if (pos == n - 1) {
        cur[pos] = degree;
        out.push_back(Monomial{cur});
        return;
    }
    for (int e = 0; e <= degree; ++e) {
        cur[pos] = e;
        enumerate_exponents(n, degree - e, cur, pos + 1, out);
    }
    cur[pos] = 0;
}

} // namespace

std::vector<Monomial> PBWPresentation::basis(int degree) const {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::vector<Monomial>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n_, degree);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<Monomial> out;
    std::vector<int> cur(n_, 0);
    enumerate_exponents(n_, degree, cur, 0, out);
    std::sort(out.begin(), out.end(), MonomialOrder{});
    cache[key] = out;
    return out;
}

std::vector<PBWPresentation::FreeRelation> PBWPresentation::relations() const {
    std::vector<FreeRelation> out;
    for (const auto& [pair, r] : rules_) {
        const auto [i, j] = pair;
        FreeRelation rel;
        rel.terms.push_back({{j, i}, CycScalar::one(field_order_)});
        rel.terms.push_back({{i, j}, -r.lead});
        for (const auto& [m, c] : r.tail.terms()) rel.terms.push_back({m.word(), -c});
        out.push_back(std::move(rel));
    }
    return out;
}

std::string PBWPresentation::describe() const {
    std::ostringstream out;
    switch (kind_) {
        case RingKind::Skew: out << "skew(" << n_ << ")"; break;
        case RingKind::QuantumMatrix: out << "quantum_matrix"; break;
        case RingKind::General: out << "general(" << n_ << ")"; break;
    }
    return out.str();
}

void PBWPresentation::check_overlaps() const {
    // Diamond check on every descending triple: both first steps must agree.
    for (int k = 2; k < n_; ++k) {
        for (int j = 1; j < k; ++j) {
            for (int i = 0; i < j; ++i) {
                const CycScalar one = CycScalar::one(field_order_);
                // First step rewrites (x_k x_j) x_i.
                const RewriteRule& rkj = rule(j, k);
                NCPoly via_left = normal_order({j, k, i}, rkj.lead);
                for (const auto& [m, c] : rkj.tail.terms()) {
                    std::vector<int> w = m.word();
                    w.push_back(i);
                    via_left = via_left + normal_order(w, c);
                }
                // First step rewrites x_k (x_j x_i).
                const RewriteRule& rji = rule(i, j);
                NCPoly via_right = normal_order({k, i, j}, rji.lead);
                for (const auto& [m, c] : rji.tail.terms()) {
                    std::vector<int> w = {k};
                    std::vector<int> t = m.word();
                    w.insert(w.end(), t.begin(), t.end());
                    via_right = via_right + normal_order(w, c);
                }
                (void)one;
                if (!(via_left == via_right))
                    throw UserError("not a PBW presentation: degree-3 overlap fails on (" +
                                    std::to_string(i + 1) + "," + std::to_string(j + 1) + "," +
                                    std::to_string(k + 1) + ")");
            }
        }
    }
}

// --- normality and q-commutation ---

namespace {

NCPoly var_poly(const PBWPresentation& a, int i) {
    return NCPoly::term(Monomial::var(a.n(), i), CycScalar::one(a.field_order()));
}

void require_deg1(const NCPoly& f, const char* what) {
    if (f.is_zero() || f.degree() != 1)
        throw UserError(std::string(what) + ": nonzero homogeneous degree-1 input required");
}

} // namespace

bool is_normal_deg1(const PBWPresentation& a, const NCPoly& f) {
    require_deg1(f, "is_normal_deg1");
    const long M = a.field_order();
    std::vector<Monomial> b2 = a.basis(2);
    RowSpan left(static_cast<int>(b2.size()), M);  // A_1 f
    RowSpan right(static_cast<int>(b2.size()), M); // f A_1
    std::vector<Vec> xf(a.n()), fx(a.n());
    for (int i = 0; i < a.n(); ++i) {
        xf[i] = a.multiply(var_poly(a, i), f).coords(b2, M);
        fx[i] = a.multiply(f, var_poly(a, i)).coords(b2, M);
        left.insert(xf[i]);
        right.insert(fx[i]);
    }
    for (int i = 0; i < a.n(); ++i) {
        if (!left.contains(fx[i])) return false;
        if (!right.contains(xf[i])) return false;
    }
    return true;
}

std::optional<CycScalar> q_commutator(const PBWPresentation& a, const NCPoly& f,
                                      const NCPoly& g) {
    if (f.is_zero() || g.is_zero()) throw UserError("q_commutator: nonzero inputs required");
    NCPoly fg = a.multiply(f, g);
    NCPoly gf = a.multiply(g, f);
    if (gf.is_zero()) return std::nullopt;
    const auto& [m0, c0] = *gf.terms().begin();
    CycScalar num = fg.coeff(m0, a.field_order());
    if (num.is_zero()) return std::nullopt;
    CycScalar q = num / c0;
    if (fg == gf.scaled(q)) return q;
    return std::nullopt;
}

std::vector<NormalFamily> normal_deg1_families(const PBWPresentation& a) {
    const long M = a.field_order();
    const int n = a.n();
    std::vector<Monomial> b1 = a.basis(1);
    std::vector<Monomial> b2 = a.basis(2);
    std::vector<NormalFamily> out;
    std::vector<RowSpan> seen;
    for (int k = 0; k < n; ++k) {
        NCPoly xk = var_poly(a, k);
        if (!is_normal_deg1(a, xk)) continue;
        NormalFamily fam;
        fam.mu.resize(n);
        bool all_scalar = true;
        for (int j = 0; j < n; ++j) {
            fam.mu[j] = q_commutator(a, xk, var_poly(a, j));
            if (!fam.mu[j]) all_scalar = false;
        }
        if (all_scalar) {
            // Solve f x_j = mu_j x_j f for all j over generic f.
            Matrix cond(static_cast<int>(b2.size()) * n, n, M);
            for (int j = 0; j < n; ++j) {
                for (int i = 0; i < n; ++i) {
                    NCPoly diff = a.multiply(var_poly(a, i), var_poly(a, j)) -
                                  a.multiply(var_poly(a, j), var_poly(a, i)).scaled(*fam.mu[j]);
                    Vec col = diff.coords(b2, M);
                    for (size_t r = 0; r < b2.size(); ++r)
                        cond.at(j * static_cast<int>(b2.size()) + static_cast<int>(r), i) = col[r];
                }
            }
            for (const Vec& v : kernel_basis(cond)) fam.basis.push_back(NCPoly::from_coords(b1, v));
        } else {
            fam.basis.push_back(xk);
        }
        // Every member must be normal; the scalar conditions guarantee it.
        for (const auto& f : fam.basis)
            if (!is_normal_deg1(a, f))
                throw ConsistencyError("normal_deg1_families produced a non-normal element");
        RowSpan span(n, M);
        for (const auto& f : fam.basis) span.insert(f.coords(b1, M));
        bool duplicate = false;
        for (const auto& old : seen) {
            if (old.rank() != span.rank()) continue;
            bool same = true;
            for (const auto& f : fam.basis)
                if (!old.contains(f.coords(b1, M))) {
                    same = false;
                    break;
                }
            if (same) {
                duplicate = true;
                break;
            }
        }
        if (!duplicate) {
            seen.push_back(std::move(span));
            out.push_back(std::move(fam));
        }
    }
    return out;
}

// --- partitions and graded twists ---

int Partition::part_of(int i) const {
    for (size_t v = 0; v < parts.size(); ++v)
        for (int j : parts[v])
            if (j == i) return static_cast<int>(v);
    return -1;
}

bool is_p_partition(const PBWPresentation& a, const Partition& d) {
    if (!a.is_skew()) throw UserError("p-partitions are defined for skew rings");
    std::vector<int> seen(a.n(), 0);
    for (const auto& part : d.parts)
        for (int i : part) {
            if (i < 0 || i >= a.n() || seen[i]) return false;
            seen[i] = 1;
        }
    for (int i = 0; i < a.n(); ++i)
        if (!seen[i]) return false;
    for (const auto& part : d.parts) {
        for (int i : part)
            for (int i2 : part) {
                if (i == i2) continue;
                for (int j = 0; j < a.n(); ++j) {
                    if (d.part_of(j) == d.part_of(i)) continue;
                    if (a.p(i, j) != a.p(i2, j)) return false;
                }
            }
    }
    return true;
}

namespace {

// Square root of a root of unity inside Q(zeta_M) itself, when it exists.
std::optional<CycScalar> sqrt_in_field(const CycScalar& p) {
    const long M = p.order();
    auto e = p.zeta_exponent();
    if (e) {
        if (*e % 2 == 0) return CycScalar::zeta(M, *e / 2);
        if (M % 2 == 1) return CycScalar::zeta(M, (*e + M) / 2);
        return std::nullopt;
    }
    return std::nullopt;
}

} // namespace

std::vector<Matrix> partition_twist_maps(const PBWPresentation& a, const Partition& d) {
    if (!is_p_partition(a, d)) throw UserError("not a p-partition");
    const long M = a.field_order();
    const int n = a.n();
    std::vector<int> rep(d.parts.size());
    for (size_t v = 0; v < d.parts.size(); ++v)
        rep[v] = *std::min_element(d.parts[v].begin(), d.parts[v].end());
    std::vector<Matrix> twists;
    for (size_t v = 0; v < d.parts.size(); ++v) {
        Matrix phi = Matrix::identity(n, M);
        for (int i = 0; i < n; ++i) {
            int w = d.part_of(i);
            if (w == static_cast<int>(v)) continue;
            // Coherent branch: orient each pair of parts by its smallest
            // representative, then take the canonical square root of the
            // forward parameter.
            CycScalar q = CycScalar::one(M);
            if (rep[v] < rep[w]) {
                auto s = sqrt_in_field(a.p(rep[v], i));
                if (!s)
                    throw UserError("square root of p_{" + std::to_string(rep[v] + 1) + "," +
                                    std::to_string(i + 1) + "} is outside the working field; "
                                    "enlarge the field order");
                q = *s;
            } else {
                auto s = sqrt_in_field(a.p(i, rep[v]));
                if (!s)
                    throw UserError("square root of p_{" + std::to_string(i + 1) + "," +
                                    std::to_string(rep[v] + 1) + "} is outside the working field; "
                                    "enlarge the field order");
                q = s->inverse();
            }
            phi.at(i, i) = q;
        }
        twists.push_back(std::move(phi));
    }
    return twists;
}

std::optional<std::vector<int>> multidegree(const NCPoly& f, const Partition& d) {
    if (f.is_zero()) return std::nullopt;
    std::optional<std::vector<int>> result;
    for (const auto& [m, c] : f.terms()) {
        std::vector<int> deg(d.parts.size(), 0);
        for (size_t v = 0; v < d.parts.size(); ++v)
            for (int i : d.parts[v]) deg[v] += m.e[i];
        if (!result)
            result = deg;
        else if (*result != deg)
            return std::nullopt;
    }
    return result;
}

NCPoly twisted_multiply(const PBWPresentation& a, const NCPoly& f, const NCPoly& g,
                        const Partition& d, const std::vector<Matrix>& twists) {
    if (!is_p_partition(a, d)) throw UserError("twisted_multiply: not a p-partition");
    if (twists.size() != d.parts.size())
        throw UserError("twisted_multiply: one twist map per part required");
    const long M = a.field_order();
    for (const auto& t : twists) {
        if (t.rows != a.n() || t.cols != a.n() || !t.is_diagonal())
            throw UserError("twisted_multiply: twist maps must be diagonal n x n");
        if (!preserves_relations(a, t))
            throw UserError("twisted_multiply: twist map does not preserve the relations");
    }
    for (size_t u = 0; u < twists.size(); ++u)
        for (size_t v = u + 1; v < twists.size(); ++v)
            if (!(twists[u] * twists[v] == twists[v] * twists[u]))
                throw UserError("twisted_multiply: twist maps do not commute");
    auto mdeg = multidegree(f, d);
    if (f.is_zero()) return NCPoly::zero();
    if (!mdeg) throw UserError("twisted_multiply: left factor not multihomogeneous");
    if (!multidegree(g, d) && !g.is_zero())
        throw UserError("twisted_multiply: right factor not multihomogeneous");
    // phi^{|f|} is diagonal; scale each variable accordingly.
    std::vector<CycScalar> scale(a.n(), CycScalar::one(M));
    for (size_t v = 0; v < twists.size(); ++v) {
        if ((*mdeg)[v] == 0) continue;
        for (int i = 0; i < a.n(); ++i)
            scale[i] = scale[i] * twists[v].at(i, i).pow((*mdeg)[v]);
    }
    NCPoly g_twisted;
    for (const auto& [m, c] : g.terms()) {
        CycScalar factor = c;
        for (int i = 0; i < a.n(); ++i)
            if (m.e[i] > 0) factor = factor * scale[i].pow(m.e[i]);
        g_twisted.add_term(m, factor);
    }
    return a.multiply(f, g_twisted);
}

// --- linear substitution (images of generators given by a matrix) ---

NCPoly substitute_linear(const PBWPresentation& a, const Matrix& images, const NCPoly& f) {
    if (images.rows != a.n() || images.cols != a.n())
        throw UserError("substitute_linear: matrix must be n x n");
    const long M = a.field_order();
    const int n = a.n();
    const bool monomial = images.is_monomial();
    NCPoly out;
    if (monomial) {
        std::vector<int> target(n, -1);
        std::vector<CycScalar> weight(n, CycScalar::one(M));
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                if (!images.at(i, j).is_zero()) {
                    target[j] = i;
                    weight[j] = images.at(i, j);
                }
        for (const auto& [m, c] : f.terms()) {
            std::vector<int> w;
            CycScalar coeff = c;
            for (int j = 0; j < n; ++j) {
                for (int k = 0; k < m.e[j]; ++k) w.push_back(target[j]);
                if (m.e[j] > 0) coeff = coeff * weight[j].pow(m.e[j]);
            }
            NCPoly part = a.normal_order(w, coeff);
            for (const auto& [mm, cc] : part.terms()) out.add_term(mm, cc);
        }
        return out;
    }
    std::vector<NCPoly> img(n);
    for (int j = 0; j < n; ++j) {
        NCPoly p;
        for (int i = 0; i < n; ++i)
            p.add_term(Monomial::var(n, i), images.at(i, j));
        img[j] = std::move(p);
    }
    for (const auto& [m, c] : f.terms()) {
        NCPoly acc = NCPoly::term(Monomial::unit(n), c);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < m.e[j]; ++k) acc = a.multiply(acc, img[j]);
        out = out + acc;
    }
    return out;
}

bool preserves_relations(const PBWPresentation& a, const Matrix& mat) {
    if (mat.rows != a.n() || mat.cols != a.n()) return false;
    for (const auto& rel : a.relations()) {
        NCPoly image;
        for (const auto& [word, c] : rel.terms) {
            NCPoly w = NCPoly::term(Monomial::unit(a.n()), c);
            for (int idx : word) {
                NCPoly xi = NCPoly::term(Monomial::var(a.n(), idx), CycScalar::one(a.field_order()));
                w = a.multiply(w, substitute_linear(a, mat, xi));
            }
            image = image + w;
        }
        if (!image.is_zero()) return false;
    }
    return true;
}

} // namespace qreflect
