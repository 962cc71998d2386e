#include "qreflect/series.hpp"

#include <algorithm>
#include <sstream>

#include "qreflect/errors.hpp"

namespace qreflect {

bool TruncSeries::is_integral() const {
    for (const auto& x : c) {
        auto r = x.as_rational();
        if (!r || !rat_is_integer(*r)) return false;
    }
    return true;
}

std::string TruncSeries::str() const {
    std::ostringstream out;
    out << "(";
    for (size_t i = 0; i < c.size(); ++i) {
        if (i) out << ", ";
        out << c[i].str();
    }
    out << ")";
    return out.str();
}

TruncSeries series_zero(long field_order, int D) {
    return TruncSeries{field_order,
                       std::vector<CycScalar>(D + 1, CycScalar::zero(field_order))};
}

TruncSeries series_mul(const TruncSeries& a, const TruncSeries& b) {
    int D = std::min(a.truncation(), b.truncation());
    TruncSeries out = series_zero(a.field_order, D);
    for (int i = 0; i <= D; ++i) {
        if (a.c[i].is_zero()) continue;
        for (int j = 0; i + j <= D; ++j) {
            if (b.c[j].is_zero()) continue;
            out.c[i + j] = out.c[i + j] + a.c[i] * b.c[j];
        }
    }
    return out;
}

namespace {

// For a monomial matrix, image monomial and scalar weight of x^m. The weight
// includes the parameter factors picked up when reordering.
struct MonomialAction {
    std::vector<int> target;
    std::vector<CycScalar> weight;
};

std::optional<MonomialAction> monomial_action(const Matrix& m) {
    if (!m.is_monomial()) return std::nullopt;
    MonomialAction act;
    act.target.assign(m.cols, -1);
    act.weight.assign(m.cols, CycScalar::one(m.field_order));
    for (int j = 0; j < m.cols; ++j)
        for (int i = 0; i < m.rows; ++i)
            if (!m.at(i, j).is_zero()) {
                act.target[j] = i;
                act.weight[j] = m.at(i, j);
            }
    return act;
}

} // namespace

CycScalar trace_on_degree(const PBWPresentation& a, const GradedMap& g, int d) {
    if (!g.validated) throw UserError("trace: map has not been validated");
    const long M = a.field_order();
    if (d == 0) return CycScalar::one(M);
    std::vector<Monomial> basis = a.basis(d);
    CycScalar tr = CycScalar::zero(M);

    if (auto act = monomial_action(g.mat)) {
        // Only monomials fixed by the exponent permutation contribute.
        for (const auto& m : basis) {
            Monomial img = Monomial::unit(a.n());
            for (int j = 0; j < a.n(); ++j) img.e[act->target[j]] += m.e[j];
            if (!(img == m)) continue;
            std::vector<int> w;
            CycScalar coeff = CycScalar::one(M);
            for (int j = 0; j < a.n(); ++j) {
                for (int k = 0; k < m.e[j]; ++k) w.push_back(act->target[j]);
                if (m.e[j] > 0) coeff = coeff * act->weight[j].pow(m.e[j]);
            }
            tr = tr + a.normal_order(w, coeff).coeff(m, M);
        }
        return tr;
    }

    // General path: build images degree by degree, reusing lower degrees.
    std::vector<NCPoly> img(a.n());
    for (int j = 0; j < a.n(); ++j) {
        NCPoly p;
        for (int i = 0; i < a.n(); ++i) p.add_term(Monomial::var(a.n(), i), g.mat.at(i, j));
        img[j] = std::move(p);
    }
    std::map<Monomial, NCPoly, MonomialOrder> prev;
    prev.emplace(Monomial::unit(a.n()),
                 NCPoly::term(Monomial::unit(a.n()), CycScalar::one(M)));
    for (int e = 1; e <= d; ++e) {
        std::map<Monomial, NCPoly, MonomialOrder> cur;
        for (const auto& m : a.basis(e)) {
            int first = 0;
            while (m.e[first] == 0) ++first;
            Monomial rest = m;
            rest.e[first] -= 1;
            cur.emplace(m, a.multiply(img[first], prev.at(rest)));
        }
        prev = std::move(cur);
    }
    for (const auto& m : basis) tr = tr + prev.at(m).coeff(m, M);
    return tr;
}

TruncSeries trace_series(const PBWPresentation& a, const GradedMap& g, int D) {
    if (D < 0) throw UserError("trace_series: D must be non-negative");
    TruncSeries out = series_zero(a.field_order(), D);
    for (int d = 0; d <= D; ++d) out.c[d] = trace_on_degree(a, g, d);
    return out;
}

TruncSeries molien_fixed_hilbert(const PBWPresentation& a, const FiniteGroup& g, int D) {
    const long M = a.field_order();
    TruncSeries sum = series_zero(M, D);
    for (const auto& h : g.elements) {
        for (int d = 0; d <= D; ++d) sum.c[d] = sum.c[d] + trace_on_degree(a, h, d);
    }
    CycScalar inv_order = CycScalar::from_long(M, g.order()).inverse();
    for (int d = 0; d <= D; ++d) {
        sum.c[d] = sum.c[d] * inv_order;
        auto r = sum.c[d].as_rational();
        if (!r || !rat_is_integer(*r) || *r < 0)
            throw ConsistencyError("Molien coefficient at degree " + std::to_string(d) +
                                   " is not a non-negative integer: " + sum.c[d].str());
    }
    return sum;
}

TruncSeries expand_qr_form(long field_order, int n, const CycScalar& lambda, int D) {
    // 1/(1-t)^{n-1} has coefficients C(d+n-2, n-2); multiply by geometric
    // series in lambda t.
    TruncSeries binom = series_zero(field_order, D);
    binom.c[0] = CycScalar::one(field_order);
    for (int d = 1; d <= D && n >= 2; ++d) {
        Rat b = 1;
        for (int k = 1; k <= n - 2; ++k) b *= Rat(d + k) / Rat(k);
        binom.c[d] = CycScalar::from_rat(field_order, b);
    }
    TruncSeries geo = series_zero(field_order, D);
    CycScalar acc = CycScalar::one(field_order);
    for (int d = 0; d <= D; ++d) {
        geo.c[d] = acc;
        acc = acc * lambda;
    }
    return series_mul(binom, geo);
}

bool matches_qr_form(const TruncSeries& s, int n, const CycScalar& lambda) {
    TruncSeries expect = expand_qr_form(s.field_order, n, lambda, s.truncation());
    return s == expect;
}

TruncSeries expand_product_form(long field_order, const std::vector<int>& degrees, int D) {
    TruncSeries out = series_zero(field_order, D);
    out.c[0] = CycScalar::one(field_order);
    for (int deg : degrees) {
        // Multiply by 1/(1 - t^deg) via the prefix recurrence.
        for (int k = deg; k <= D; ++k) out.c[k] = out.c[k] + out.c[k - deg];
    }
    return out;
}

std::optional<std::vector<int>> recognize_product_form(const TruncSeries& s, int nfactors) {
    const int D = s.truncation();
    std::vector<Rat> r(D + 1);
    for (int d = 0; d <= D; ++d) {
        auto q = s.c[d].as_rational();
        if (!q || !rat_is_integer(*q) || *q < 0) return std::nullopt;
        r[d] = *q;
    }
    if (r[0] != 1) return std::nullopt;
    std::vector<int> factors;
    for (int step = 0; step < nfactors; ++step) {
        int d = 0;
        for (int k = 1; k <= D; ++k)
            if (r[k] != 0) {
                d = k;
                break;
            }
        if (d == 0) break; // residual already 1
        if (r[d] < 0) return std::nullopt;
        factors.push_back(d);
        for (int k = D; k >= d; --k) r[k] -= r[k - d];
    }
    for (int k = 1; k <= D; ++k)
        if (r[k] != 0) return std::nullopt;
    if (static_cast<int>(factors.size()) != nfactors) return std::nullopt;
    std::sort(factors.begin(), factors.end());
    // Re-check the claimed factorization against the input.
    TruncSeries check = expand_product_form(s.field_order, factors, D);
    if (!(check == s)) return std::nullopt;
    return factors;
}

std::string product_form_str(const std::vector<int>& degrees) {
    std::ostringstream out;
    out << "1/(";
    for (int d : degrees) out << "(1-t" << (d == 1 ? "" : "^" + std::to_string(d)) << ")";
    out << ")";
    return out.str();
}

} // namespace qreflect
