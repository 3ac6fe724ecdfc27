#pragma once

#include "numberfield.hpp"

namespace adelic {

// Multiplicative correction at an archimedean place, relative to the
// embedded global scalar: the component at sigma is sigma(g) * this.
struct ArchComp {
    bool is_complex = false;
    mpq_class re = 1, im = 0;

    bool is_one() const { return re == 1 && im == 0; }
    bool is_zero() const { return re == 0 && im == 0; }
    bool operator==(const ArchComp& o) const {
        return is_complex == o.is_complex && re == o.re && im == o.im;
    }
};

ArchComp arch_mul(const ArchComp& a, const ArchComp& b);
ArchComp arch_inv(const ArchComp& a);

// Finitely presented idele: component at a finite place P is
// iota_P(g) * e_P with e_P = 1 off the exception support, so the value is a
// unit almost everywhere by construction.
struct Idele {
    FieldDesc field;
    FieldElem g{1, 0};
    std::map<PlaceKey, LocalElement> exceptions;
    std::vector<ArchComp> arch;
};

Idele idele_identity(const FieldDesc& F);
Idele idele_iota(const FieldDesc& F, const FieldElem& q);
// Validates, fills missing arch entries, drops corrections equal to 1.
Idele idele_make(const FieldDesc& F, const FieldElem& g,
                 std::map<PlaceKey, LocalElement> exceptions,
                 std::vector<ArchComp> arch);

Idele idele_mul(const Idele& a, const Idele& b);
Idele idele_inv(const Idele& a);

// Exact valuation of the component at P.
long idele_valuation(const Idele& a, const PlaceRef& P);
// The finite set outside which components are provably units:
// exception support plus the places dividing the global scalar.
std::vector<PlaceKey> idele_unit_support(const Idele& a);

struct CanonicalIdele {
    FieldElem q;
    Idele unit;
};

// Realizes the quotient A^x / iota(F^x): q matches all finite valuations
// (and the real sign over Q); unit = a * iota(q)^{-1} has valuation 0
// components and is the canonical class representative.
CanonicalIdele canonicalize_idele(const Idele& a);

bool is_principal(const Idele& a);
bool class_equal(const Idele& a, const Idele& b);

// Additive counterpart; carried for completeness of the restricted-product
// presentation ("component integral at all but finitely many places").
struct ArchAdd {
    bool is_complex = false;
    mpq_class re = 0, im = 0;
    bool operator==(const ArchAdd& o) const {
        return is_complex == o.is_complex && re == o.re && im == o.im;
    }
};

struct Adele {
    FieldDesc field;
    FieldElem t{0, 0};
    std::map<PlaceKey, LocalElement> exceptions;
    std::vector<ArchAdd> arch;
};

Adele adele_make(const FieldDesc& F, const FieldElem& t,
                 std::map<PlaceKey, LocalElement> exceptions,
                 std::vector<ArchAdd> arch);
Adele adele_add(const Adele& a, const Adele& b);
Adele adele_neg(const Adele& a);
std::vector<PlaceKey> adele_integral_support(const Adele& a);

} // namespace adelic
