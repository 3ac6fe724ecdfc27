#pragma once

#include <map>
#include <variant>
#include <vector>

#include "localfield.hpp"

namespace adelic {

// Finite places indexed by (p, index) within a fixed field.
struct PlaceKey {
    mpz_class p;
    int index = 0;
    bool operator<(const PlaceKey& o) const { return p != o.p ? p < o.p : index < o.index; }
    bool operator==(const PlaceKey& o) const { return p == o.p && index == o.index; }
};

inline PlaceKey key_of(const PlaceRef& P) { return PlaceKey{P.p, P.index}; }

std::vector<PlaceRef> split_prime(const FieldDesc& F, const mpz_class& p);
PlaceRef place_by_key(const FieldDesc& F, const PlaceKey& k);
std::vector<PlaceRef> arch_places(const FieldDesc& F);

// Value of x at an archimedean place, exactly: re + im*i with coordinates
// x0 + x1*sqrt(|d|).
struct ArchValue {
    bool is_complex = false;
    SqrtCoord re{0, 0};
    SqrtCoord im{0, 0};
};

using EmbedResult = std::variant<LocalElement, ArchValue>;

// The diagonal embedding iota at one place; exact to N digits at finite
// places, exact symbolic at archimedean ones.
EmbedResult embed_global(const FieldDesc& F, const FieldElem& x, const PlaceRef& P, long prec);
LocalElement embed_finite(const FieldDesc& F, const FieldElem& x, const PlaceRef& P, long prec);
ArchValue embed_arch(const FieldDesc& F, const FieldElem& x, const PlaceRef& P);

// Exact v_P(x) for nonzero x.
long global_valuation(const FieldDesc& F, const FieldElem& x, const PlaceRef& P);

long different_exponent(const PlaceRef& P);

// Fractional ideal as a finite-support exponent vector over finite places.
struct FracIdeal {
    std::map<PlaceKey, long> places;

    bool is_integral() const;
    bool empty() const { return places.empty(); }
    static FracIdeal one() { return {}; }
};

FracIdeal ideal_mul(const FracIdeal& a, const FracIdeal& b);
FracIdeal ideal_inv(const FracIdeal& a);
mpq_class ideal_norm(const FieldDesc& F, const FracIdeal& J);
// Least n >= 1 with n*J integral.
mpz_class ideal_denominator(const FieldDesc& F, const FracIdeal& J);
// Principal ideal (x); may include places above primes of the coordinates.
FracIdeal principal_ideal(const FieldDesc& F, const FieldElem& x);

// Z-basis of an integral ideal in HNF over {1, w}: {a, b + c*w}.
struct IdealBasis {
    mpz_class a, b, c;
};
IdealBasis ideal_z_basis(const FieldDesc& F, const FracIdeal& J);

struct MinkowskiData {
    // degree x degree matrix, rows = archimedean coordinates, columns = Z-basis
    // images; entries exact in Q(sqrt(|d|)).
    std::vector<std::vector<SqrtCoord>> basis;
    mpq_class covolume_squared;
    int torus_rank = 0;
    std::vector<std::vector<SqrtCoord>> torus_lattice;
};

MinkowskiData minkowski(const FieldDesc& F, const FracIdeal& J);

// Binary quadratic form class data for imaginary quadratic fields.
struct FormClass {
    mpz_class A, B, C;
    bool trivial() const { return A == 1; }
    std::string label() const;
    bool operator==(const FormClass& o) const { return A == o.A && B == o.B && C == o.C; }
};

FormClass ideal_class(const FieldDesc& F, const FracIdeal& J);
// All reduced forms of the field discriminant (h = size).
std::vector<FormClass> reduced_forms(const mpz_class& disc);
// Generator of a principal integral ideal; throws NonPrincipalFinitePart
// (with the class label in the message) otherwise.
FieldElem principal_generator(const FieldDesc& F, const FracIdeal& J);

// Units of the ring of integers that are roots of unity (all units for
// imaginary quadratic fields; {1,-1} over Q).
std::vector<FieldElem> torsion_units(const FieldDesc& F);

} // namespace adelic
