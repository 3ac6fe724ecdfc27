#include "field.hpp"

#include <cmath>
#include <sstream>

namespace adelic {

FieldDesc FieldDesc::quadratic(long d) {
    if (d == 0 || d == 1) fail(Errc::UnsupportedField, "d must be a squarefree integer != 0, 1");
    long m = d < 0 ? -d : d;
    for (long q = 2; q * q <= m; ++q)
        if (m % (q * q) == 0) fail(Errc::UnsupportedField, "d must be squarefree");
    FieldDesc F;
    F.rational = false;
    F.d = d;
    return F;
}

FieldDesc FieldDesc::parse(const std::string& literal) {
    if (literal == "q" || literal == "Q") return make_rational();
    const std::string prefix = "quad:";
    if (literal.rfind(prefix, 0) == 0) {
        try {
            return quadratic(std::stol(literal.substr(prefix.size())));
        } catch (const std::logic_error&) {
            fail(Errc::ParseError, "bad field literal '" + literal + "'");
        }
    }
    fail(Errc::ParseError, "bad field literal '" + literal + "' (expected 'q' or 'quad:<d>')");
}

std::string FieldDesc::literal() const {
    return rational ? "q" : ("quad:" + std::to_string(d));
}

mpz_class FieldDesc::discriminant() const {
    if (rational) return 1;
    long r = (d % 4 + 4) % 4;
    return r == 1 ? mpz_class(d) : mpz_class(4 * mpz_class(d));
}

mpz_class FieldDesc::omega_norm() const {
    if (rational) return 0;
    if (omega_trace() == 1) return mpz_class(d - 1) / 4;
    return mpz_class(d);
}

PlaceRef PlaceRef::real(const FieldDesc& F, int index) {
    if (index < 0 || index >= F.real_places()) fail(Errc::UnsupportedPlace, "no such real place");
    PlaceRef P;
    P.field = F;
    P.kind = PlaceKind::Real;
    P.index = index;
    return P;
}

PlaceRef PlaceRef::complex(const FieldDesc& F, int index) {
    if (index < 0 || index >= F.complex_places()) fail(Errc::UnsupportedPlace, "no such complex place");
    PlaceRef P;
    P.field = F;
    P.kind = PlaceKind::Complex;
    P.index = index;
    return P;
}

PlaceRef PlaceRef::finite(const FieldDesc& F, const mpz_class& p, int e, int f, int index) {
    PlaceRef P;
    P.field = F;
    P.kind = PlaceKind::Finite;
    P.p = p;
    P.e = e;
    P.f = f;
    P.index = index;
    if (e * f > F.degree()) fail(Errc::UnsupportedPlace, "e*f exceeds field degree");
    return P;
}

std::string PlaceRef::str() const {
    std::ostringstream os;
    switch (kind) {
        case PlaceKind::Real: os << "real#" << index; break;
        case PlaceKind::Complex: os << "complex#" << index; break;
        case PlaceKind::Finite:
            os << "P(" << p.get_str();
            if (e == 2) os << ",ram";
            if (f == 2) os << ",inert";
            if (index > 0) os << ",#" << index;
            os << ")";
            break;
    }
    return os.str();
}

FieldElem fe_add(const FieldElem& a, const FieldElem& b) { return {a.u + b.u, a.v + b.v}; }
FieldElem fe_sub(const FieldElem& a, const FieldElem& b) { return {a.u - b.u, a.v - b.v}; }
FieldElem fe_neg(const FieldElem& a) { return {-a.u, -a.v}; }

FieldElem fe_mul(const FieldDesc& F, const FieldElem& a, const FieldElem& b) {
    // (u1 + v1 w)(u2 + v2 w) with w^2 = t w + m.
    mpq_class t(F.omega_trace()), m(F.omega_norm());
    mpq_class vv = a.v * b.v;
    return {a.u * b.u + m * vv, a.u * b.v + a.v * b.u + t * vv};
}

FieldElem fe_conj(const FieldDesc& F, const FieldElem& a) {
    return {a.u + mpq_class(F.omega_trace()) * a.v, -a.v};
}

mpq_class fe_norm(const FieldDesc& F, const FieldElem& a) {
    if (F.rational) return a.u;
    mpq_class t(F.omega_trace()), m(F.omega_norm());
    return a.u * a.u + t * a.u * a.v - m * a.v * a.v;
}

mpq_class fe_trace(const FieldDesc& F, const FieldElem& a) {
    if (F.rational) return a.u;
    return 2 * a.u + mpq_class(F.omega_trace()) * a.v;
}

FieldElem fe_inv(const FieldDesc& F, const FieldElem& a) {
    if (a.is_zero()) fail(Errc::ZeroElement, "inverse of zero field element");
    if (F.rational) return {1 / a.u, 0};
    mpq_class n = fe_norm(F, a);
    FieldElem c = fe_conj(F, a);
    return {c.u / n, c.v / n};
}

FieldElem fe_div(const FieldDesc& F, const FieldElem& a, const FieldElem& b) {
    return fe_mul(F, a, fe_inv(F, b));
}

FieldElem fe_pow(const FieldDesc& F, FieldElem a, long e) {
    if (e < 0) { a = fe_inv(F, a); e = -e; }
    FieldElem r{1, 0};
    while (e > 0) {
        if (e & 1) r = fe_mul(F, r, a);
        a = fe_mul(F, a, a);
        e >>= 1;
    }
    return r;
}

FieldElem fe_parse(const FieldDesc& F, const std::string& s) {
    // Terms of the form [+-]rational or [+-][rational]w.
    FieldElem out{0, 0};
    size_t i = 0;
    if (s.empty()) fail(Errc::ParseError, "empty field element literal");
    while (i < s.size()) {
        int sign = 1;
        if (s[i] == '+' || s[i] == '-') {
            sign = s[i] == '-' ? -1 : 1;
            ++i;
        }
        size_t j = i;
        while (j < s.size() && s[j] != '+' && s[j] != '-') ++j;
        std::string term = s.substr(i, j - i);
        if (term.empty()) fail(Errc::ParseError, "bad field element literal '" + s + "'");
        bool has_w = term.back() == 'w';
        if (has_w) {
            term.pop_back();
            if (!term.empty() && term.back() == '*') term.pop_back();
        }
        mpq_class coeff = term.empty() ? mpq_class(1) : parse_rational(term);
        if (sign < 0) coeff = -coeff;
        if (has_w) {
            if (F.rational) fail(Errc::ParseError, "'w' not valid over the rationals");
            out.v += coeff;
        } else {
            out.u += coeff;
        }
        i = j;
    }
    return out;
}

std::string fe_str(const FieldElem& a) {
    if (a.v == 0) return rational_str(a.u);
    std::string s;
    if (a.u != 0) s = rational_str(a.u);
    if (a.v > 0 && !s.empty()) s += "+";
    if (a.v == -1) s += "-";
    else if (a.v != 1) s += rational_str(a.v) + "*";
    s += "w";
    return s;
}

SqrtCoord sc_add(const SqrtCoord& a, const SqrtCoord& b) { return {a.plain + b.plain, a.root + b.root}; }
SqrtCoord sc_sub(const SqrtCoord& a, const SqrtCoord& b) { return {a.plain - b.plain, a.root - b.root}; }

SqrtCoord sc_mul(const SqrtCoord& a, const SqrtCoord& b, const mpz_class& abs_d) {
    return {a.plain * b.plain + mpq_class(abs_d) * a.root * b.root,
            a.plain * b.root + a.root * b.plain};
}

double sc_double(const SqrtCoord& a, const mpz_class& abs_d) {
    return a.plain.get_d() + a.root.get_d() * std::sqrt(abs_d.get_d());
}

std::string sc_str(const SqrtCoord& a) {
    if (a.root == 0) return rational_str(a.plain);
    std::string s;
    if (a.plain != 0) s = rational_str(a.plain) + (a.root > 0 ? "+" : "");
    s += rational_str(a.root) + "*sqrt";
    return s;
}

} // namespace adelic
