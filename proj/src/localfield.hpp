#pragma once

#include <optional>
#include <vector>

#include "field.hpp"

namespace adelic {

// Sentinel for "known exactly" (infinite absolute precision).
inline constexpr long kPrecInf = 1L << 40;

// Hard cap on stored unit digits; requests beyond it are clamped.  All
// comparisons are to-precision, so the cap only bounds working cost.
inline constexpr long kPrecMax = 512;

// A p-adic scalar in Q_p carried at relative precision: either zero to an
// absolute precision, or p^v * u with the unit u known modulo p^n.
struct ScalarPadic {
    mpz_class p;
    bool zero = true;
    long zero_absprec = kPrecInf; // x = 0 mod p^zero_absprec
    long v = 0;
    mpz_class u;                  // in [1, p^n), not divisible by p
    long n = 0;                   // significant p-adic digits of the unit

    long absprec() const { return zero ? zero_absprec : v + n; }

    static ScalarPadic zero_to(const mpz_class& p, long absprec);
    static ScalarPadic exact_zero(const mpz_class& p) { return zero_to(p, kPrecInf); }
    static ScalarPadic from_int(const mpz_class& p, const mpz_class& x, long prec);
    static ScalarPadic from_rat(const mpz_class& p, const mpq_class& x, long prec);
};

ScalarPadic sp_add(const ScalarPadic& a, const ScalarPadic& b);
ScalarPadic sp_neg(const ScalarPadic& a);
ScalarPadic sp_mul(const ScalarPadic& a, const ScalarPadic& b);
// Multiply by an exact nonzero rational (no precision cost).
ScalarPadic sp_scale(const ScalarPadic& a, const mpq_class& c);
ScalarPadic sp_inv(const ScalarPadic& a);
ScalarPadic sp_truncate(const ScalarPadic& a, long absprec);
bool sp_known_equal(const ScalarPadic& a, const ScalarPadic& b, long& agreement_absprec);

// The completion model attached to a finite place:
//   e=f=1           : Q_p itself.
//   f=2 (unramified): Q_p(th) with th^2 = gen_t*th + gen_n, gen irreducible
//                     mod p (smallest-nonresidue convention; x^2+x+1 at p=2).
//   e=2 (ramified)  : Q_p(pi) with pi^2 = s0 + s1*pi, v_p(s0) = 1; pi is a
//                     uniformizer derived from the field discriminant.
struct CompletionModel {
    mpz_class p;
    int e = 1, f = 1;
    mpz_class gen_t = 0, gen_n = 0; // th^2 = gen_t*th + gen_n (f=2)
    mpz_class s0 = 0, s1 = 0;       // pi^2 = s0 + s1*pi (e=2)
};

CompletionModel completion_model(const PlaceRef& P);

// Residue-field element of kappa(P): a + b*thbar, with b = 0 unless f = 2.
struct Residue {
    mpz_class a, b;
    Residue(mpz_class a_ = 0, mpz_class b_ = 0) : a(std::move(a_)), b(std::move(b_)) {}
    bool operator==(const Residue& o) const { return a == o.a && b == o.b; }
    bool is_zero() const { return a == 0 && b == 0; }
    std::string str() const;
};

Residue res_reduce(const CompletionModel& m, const Residue& r);
Residue res_add(const CompletionModel& m, const Residue& x, const Residue& y);
Residue res_mul(const CompletionModel& m, const Residue& x, const Residue& y);
Residue res_pow(const CompletionModel& m, Residue x, mpz_class e);
// Canonical enumeration order of kappa(P): a ascending, then b.
std::vector<Residue> all_residues(const CompletionModel& m);

// An element of the completion F^_P at a finite place, stored as
// x = a + b*gen over the Q_p-scalars (gen = th or pi per the model; b = 0
// over Q_p).  Valuation is pi-normalized: v(pi) = 1, so v(p) = e.
class LocalElement {
public:
    LocalElement() = default;
    LocalElement(PlaceRef place, ScalarPadic a, ScalarPadic b);

    static LocalElement zero(const PlaceRef& P, long absprec = kPrecInf);
    static LocalElement one(const PlaceRef& P, long prec);
    static LocalElement from_int(const PlaceRef& P, const mpz_class& x, long prec);
    static LocalElement from_rat(const PlaceRef& P, const mpq_class& x, long prec);
    // a + b*gen with exact rational coordinates.
    static LocalElement from_pair(const PlaceRef& P, const mpq_class& a, const mpq_class& b, long prec);
    static LocalElement uniformizer(const PlaceRef& P, long prec);

    const PlaceRef& place() const { return place_; }
    const ScalarPadic& coeff_a() const { return a_; }
    const ScalarPadic& coeff_b() const { return b_; }

    bool is_zero_to_precision() const;
    // pi-adic valuation; throws DivisionByZeroToPrecision on (apparent) zero.
    long valuation() const;
    // Significant pi-adic digits; 0 digits throws PrecisionExhausted upstream.
    long precision() const;
    long absolute_precision() const;

    LocalElement truncated(long rel_prec) const;

private:
    PlaceRef place_;
    ScalarPadic a_, b_;

    friend LocalElement le_add(const LocalElement&, const LocalElement&);
    friend LocalElement le_neg(const LocalElement&);
    friend LocalElement le_mul(const LocalElement&, const LocalElement&);
    friend LocalElement le_inv(const LocalElement&);
};

enum class LocalOp { Add, Mul, Inv, Neg };

LocalElement le_add(const LocalElement& x, const LocalElement& y);
LocalElement le_sub(const LocalElement& x, const LocalElement& y);
LocalElement le_neg(const LocalElement& x);
LocalElement le_mul(const LocalElement& x, const LocalElement& y);
LocalElement le_inv(const LocalElement& x);
LocalElement le_div(const LocalElement& x, const LocalElement& y);
LocalElement le_pow(const LocalElement& x, long e);
LocalElement le_scale(const LocalElement& x, const mpq_class& c);

// Spec operation surface: op in {add, mul, inv, neg}; y ignored for unary ops.
LocalElement local_arith(LocalOp op, const LocalElement& x, const LocalElement* y);

// Agreement check: true when x and y agree on every digit both carry; the
// number of jointly known digits (relative, from min valuation) is reported.
bool le_known_equal(const LocalElement& x, const LocalElement& y, long& agreement_digits);
bool le_is_one(const LocalElement& x, long& agreement_digits);

std::pair<long, Residue> valuation_residue(const LocalElement& x);
Residue residue_of_unit(const LocalElement& x);

// pi-adic digit expansion of the unit part (length = precision, capped).
std::vector<Residue> unit_digits(const LocalElement& x, long count);

// Hensel lifting of a simple root of an integer polynomial (coefficients
// listed from the constant term up).  With no seed, searches kappa(P) for a
// simple root and lifts the first one in enumeration order.
LocalElement hensel_lift(const std::vector<mpz_class>& poly,
                         const std::optional<Residue>& seed,
                         const PlaceRef& P, long prec);

// The (q_P - 1)-th root of unity congruent to the given nonzero residue.
LocalElement teichmuller(const Residue& r, const PlaceRef& P, long prec);

bool is_square(const LocalElement& x);

// Text form `p^v * (d0 + d1*p + ...) (O(p^(v+N)))`; ramified places print
// base `pi`, residue-ring digits print as [a+b*w].
std::string le_text(const LocalElement& x);
LocalElement le_parse_text(const PlaceRef& P, const std::string& text);

} // namespace adelic
