#pragma once

#include <gmpxx.h>

#include <compare>
#include <string>

#include "error.hpp"
#include "numutil.hpp"

namespace adelic {

// Global field descriptor: the rationals or a quadratic field Q(sqrt d),
// d squarefree, d != 0, 1.  The integral basis is {1, w} with
//   w = sqrt(d)        and w^2 = d              when d = 2, 3 mod 4,
//   w = (1+sqrt(d))/2  and w^2 = w + (d-1)/4    when d = 1 mod 4.
struct FieldDesc {
    bool rational = true;
    long d = 0;

    static FieldDesc make_rational() { return FieldDesc{}; }
    static FieldDesc quadratic(long d);
    // "q" or "quad:<d>".
    static FieldDesc parse(const std::string& literal);

    std::string literal() const;
    int degree() const { return rational ? 1 : 2; }
    int real_places() const { return rational ? 1 : (d > 0 ? 2 : 0); }
    int complex_places() const { return rational ? 0 : (d > 0 ? 0 : 1); }
    int arch_place_count() const { return real_places() + complex_places(); }
    mpz_class discriminant() const;

    // w^2 = omega_trace * w + omega_norm  (so omega_norm = -N(w)).
    long omega_trace() const { return (!rational && ((d % 4 + 4) % 4 == 1)) ? 1 : 0; }
    mpz_class omega_norm() const;

    bool operator==(const FieldDesc& o) const { return rational == o.rational && (rational || d == o.d); }
    bool operator!=(const FieldDesc& o) const { return !(*this == o); }
};

enum class PlaceKind { Real, Complex, Finite };

// A place of the field: archimedean (indexed embedding) or finite
// (residue characteristic p, ramification e, residue degree f, and an
// index separating the two places above a split prime).
struct PlaceRef {
    FieldDesc field;
    PlaceKind kind = PlaceKind::Finite;
    mpz_class p = 0;
    int e = 1;
    int f = 1;
    int index = 0;

    bool is_finite() const { return kind == PlaceKind::Finite; }
    mpz_class residue_size() const { return f == 2 ? p * p : p; }

    static PlaceRef real(const FieldDesc& F, int index = 0);
    static PlaceRef complex(const FieldDesc& F, int index = 0);
    static PlaceRef finite(const FieldDesc& F, const mpz_class& p, int e, int f, int index = 0);

    std::string str() const;

    bool operator==(const PlaceRef& o) const {
        if (field != o.field || kind != o.kind) return false;
        if (!is_finite()) return index == o.index;
        return p == o.p && e == o.e && f == o.f && index == o.index;
    }
    bool operator!=(const PlaceRef& o) const { return !(*this == o); }
};

// Strict weak order used for place-indexed maps: finite places by (p, index),
// then arch places.
struct PlaceLess {
    bool operator()(const PlaceRef& a, const PlaceRef& b) const {
        auto rank = [](const PlaceRef& x) { return x.is_finite() ? 0 : (x.kind == PlaceKind::Real ? 1 : 2); };
        if (rank(a) != rank(b)) return rank(a) < rank(b);
        if (a.is_finite()) {
            if (a.p != b.p) return a.p < b.p;
            return a.index < b.index;
        }
        return a.index < b.index;
    }
};

// Element of the field in coordinates over the integral basis {1, w}.
struct FieldElem {
    mpq_class u, v; // u + v*w

    FieldElem() = default;
    FieldElem(mpq_class u_, mpq_class v_ = 0) : u(std::move(u_)), v(std::move(v_)) {}

    bool is_zero() const { return u == 0 && v == 0; }
    bool is_rational() const { return v == 0; }
    bool operator==(const FieldElem& o) const { return u == o.u && v == o.v; }
    bool operator!=(const FieldElem& o) const { return !(*this == o); }
};

FieldElem fe_add(const FieldElem& a, const FieldElem& b);
FieldElem fe_sub(const FieldElem& a, const FieldElem& b);
FieldElem fe_neg(const FieldElem& a);
FieldElem fe_mul(const FieldDesc& F, const FieldElem& a, const FieldElem& b);
FieldElem fe_conj(const FieldDesc& F, const FieldElem& a);
mpq_class fe_norm(const FieldDesc& F, const FieldElem& a);
mpq_class fe_trace(const FieldDesc& F, const FieldElem& a);
FieldElem fe_inv(const FieldDesc& F, const FieldElem& a);
FieldElem fe_div(const FieldDesc& F, const FieldElem& a, const FieldElem& b);
FieldElem fe_pow(const FieldDesc& F, FieldElem a, long e);

// Literal grammar: "3/4", "1/2+3w", "-w", "w-1/5".
FieldElem fe_parse(const FieldDesc& F, const std::string& s);
std::string fe_str(const FieldElem& a);

// Exact number x + y*sqrt(|d|), the coordinate type of Minkowski data and
// archimedean embeddings of real quadratic fields.
struct SqrtCoord {
    mpq_class plain, root; // plain + root*sqrt(|d|)

    bool operator==(const SqrtCoord& o) const { return plain == o.plain && root == o.root; }
    bool is_zero() const { return plain == 0 && root == 0; }
};

SqrtCoord sc_add(const SqrtCoord& a, const SqrtCoord& b);
SqrtCoord sc_sub(const SqrtCoord& a, const SqrtCoord& b);
SqrtCoord sc_mul(const SqrtCoord& a, const SqrtCoord& b, const mpz_class& abs_d);
double sc_double(const SqrtCoord& a, const mpz_class& abs_d);
std::string sc_str(const SqrtCoord& a);

} // namespace adelic
