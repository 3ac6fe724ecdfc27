#include "localfield.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace adelic {

namespace {

long addcap(long a, long b) {
    long s = a + b;
    return s > kPrecInf ? kPrecInf : s;
}

mpz_class ppow(const mpz_class& p, long k) {
    if (k <= 0) return 1;
    return pow_int(p, static_cast<unsigned long>(k));
}

} // namespace

// ---------------------------------------------------------------------------
// ScalarPadic
// ---------------------------------------------------------------------------

ScalarPadic ScalarPadic::zero_to(const mpz_class& p, long absprec) {
    ScalarPadic s;
    s.p = p;
    s.zero = true;
    s.zero_absprec = std::min(absprec, kPrecInf);
    return s;
}

ScalarPadic ScalarPadic::from_int(const mpz_class& p, const mpz_class& x, long prec) {
    if (x == 0) return exact_zero(p);
    ScalarPadic s;
    s.p = p;
    s.zero = false;
    mpz_class unit;
    s.v = valuation_int(x, p, unit);
    s.n = std::clamp<long>(prec, 1, kPrecMax);
    s.u = mod_pos(unit, ppow(p, s.n));
    return s;
}

ScalarPadic ScalarPadic::from_rat(const mpz_class& p, const mpq_class& x, long prec) {
    if (x == 0) return exact_zero(p);
    mpz_class nu, du;
    long vn = valuation_int(x.get_num(), p, nu);
    long vd = valuation_int(x.get_den(), p, du);
    ScalarPadic s;
    s.p = p;
    s.zero = false;
    s.v = vn - vd;
    s.n = std::clamp<long>(prec, 1, kPrecMax);
    mpz_class M = ppow(p, s.n);
    s.u = mod_pos(nu * invmod(du, M), M);
    return s;
}

ScalarPadic sp_truncate(const ScalarPadic& a, long absprec) {
    if (a.absprec() <= absprec) return a;
    if (a.zero) return ScalarPadic::zero_to(a.p, absprec);
    if (a.v >= absprec) return ScalarPadic::zero_to(a.p, absprec);
    ScalarPadic r = a;
    r.n = absprec - a.v;
    r.u = mod_pos(a.u, ppow(a.p, r.n));
    if (r.u == 0) return ScalarPadic::zero_to(a.p, absprec); // cannot happen for a true unit
    return r;
}

ScalarPadic sp_add(const ScalarPadic& a, const ScalarPadic& b) {
    if (a.zero && b.zero) return ScalarPadic::zero_to(a.p, std::min(a.zero_absprec, b.zero_absprec));
    if (a.zero) return sp_truncate(b, a.zero_absprec);
    if (b.zero) return sp_truncate(a, b.zero_absprec);
    const ScalarPadic& x = a.v <= b.v ? a : b;
    const ScalarPadic& y = a.v <= b.v ? b : a;
    long A = std::min(x.absprec(), y.absprec());
    if (x.v >= A) return ScalarPadic::zero_to(a.p, A);
    long m = A - x.v;
    mpz_class M = ppow(a.p, m);
    mpz_class s;
    if (x.v < y.v) {
        s = mod_pos(x.u + y.u * ppow(a.p, y.v - x.v), M);
    } else {
        s = mod_pos(x.u + y.u, M);
    }
    if (s == 0) return ScalarPadic::zero_to(a.p, A);
    mpz_class unit;
    long delta = valuation_int(s, a.p, unit);
    ScalarPadic r;
    r.p = a.p;
    r.zero = false;
    r.v = x.v + delta;
    r.n = m - delta;
    r.u = mod_pos(unit, ppow(a.p, r.n));
    return r;
}

ScalarPadic sp_neg(const ScalarPadic& a) {
    if (a.zero) return a;
    ScalarPadic r = a;
    mpz_class M = ppow(a.p, a.n);
    r.u = mod_pos(M - a.u, M);
    return r;
}

ScalarPadic sp_mul(const ScalarPadic& a, const ScalarPadic& b) {
    if (a.zero || b.zero) {
        long bound;
        if (a.zero && b.zero) bound = addcap(a.zero_absprec, b.zero_absprec);
        else if (a.zero) bound = addcap(a.zero_absprec, b.v);
        else bound = addcap(b.zero_absprec, a.v);
        return ScalarPadic::zero_to(a.p, bound);
    }
    ScalarPadic r;
    r.p = a.p;
    r.zero = false;
    r.v = a.v + b.v;
    r.n = std::min(a.n, b.n);
    r.u = mod_pos(a.u * b.u, ppow(a.p, r.n));
    return r;
}

ScalarPadic sp_scale(const ScalarPadic& a, const mpq_class& c) {
    if (c == 0) fail(Errc::ZeroElement, "scale by zero");
    mpz_class nu, du;
    long v = valuation_int(c.get_num(), a.p, nu) - valuation_int(c.get_den(), a.p, du);
    if (a.zero) return ScalarPadic::zero_to(a.p, addcap(a.zero_absprec, v));
    ScalarPadic r = a;
    r.v = a.v + v;
    mpz_class M = ppow(a.p, a.n);
    r.u = mod_pos(a.u * mod_pos(nu, M) * invmod(mod_pos(du, M), M), M);
    return r;
}

ScalarPadic sp_inv(const ScalarPadic& a) {
    if (a.zero) fail(Errc::DivisionByZeroToPrecision, "inverse of zero to precision");
    ScalarPadic r = a;
    r.v = -a.v;
    r.u = invmod(a.u, ppow(a.p, a.n));
    return r;
}

bool sp_known_equal(const ScalarPadic& a, const ScalarPadic& b, long& agreement_absprec) {
    long A = std::min(a.absprec(), b.absprec());
    agreement_absprec = A;
    auto visible = [&](const ScalarPadic& s) { return !s.zero && s.v < A; };
    if (!visible(a) && !visible(b)) return true;
    if (visible(a) != visible(b)) return false;
    if (a.v != b.v) return false;
    long m = A - a.v;
    mpz_class M = ppow(a.p, m);
    return mod_pos(a.u, M) == mod_pos(b.u, M);
}

// ---------------------------------------------------------------------------
// Completion models
// ---------------------------------------------------------------------------

CompletionModel completion_model(const PlaceRef& P) {
    if (!P.is_finite()) fail(Errc::UnsupportedPlace, "no completion model at archimedean places");
    CompletionModel m;
    m.p = P.p;
    m.e = P.e;
    m.f = P.f;
    if (P.f == 2) {
        if (P.p == 2) {
            // x^2 + x + 1, the irreducible quadratic over F_2.
            m.gen_t = -1;
            m.gen_n = -1;
        } else {
            m.gen_t = 0;
            m.gen_n = smallest_quadratic_nonresidue(P.p);
        }
    } else if (P.e == 2) {
        long d = P.field.d;
        if (P.field.rational) fail(Errc::UnsupportedPlace, "no ramified places over Q");
        if (P.p != 2 || d % 2 == 0) {
            // pi = sqrt(d).
            m.s0 = d;
            m.s1 = 0;
        } else {
            // d = 3 mod 4: pi = 1 + sqrt(d), pi^2 = (d-1) + 2 pi.
            m.s0 = d - 1;
            m.s1 = 2;
        }
        if (valuation_int(m.s0, P.p) != 1)
            fail(Errc::UnsupportedPlace, "place is not ramified in this field");
    }
    return m;
}

std::string Residue::str() const {
    if (b == 0) return a.get_str();
    return "[" + a.get_str() + "+" + b.get_str() + "*w]";
}

Residue res_reduce(const CompletionModel& m, const Residue& r) {
    return Residue(mod_pos(r.a, m.p), m.f == 2 ? mod_pos(r.b, m.p) : mpz_class(0));
}

Residue res_add(const CompletionModel& m, const Residue& x, const Residue& y) {
    return res_reduce(m, Residue(x.a + y.a, x.b + y.b));
}

Residue res_mul(const CompletionModel& m, const Residue& x, const Residue& y) {
    if (m.f != 2) return Residue(mod_pos(x.a * y.a, m.p));
    mpz_class bb = x.b * y.b;
    return res_reduce(m, Residue(x.a * y.a + m.gen_n * bb, x.a * y.b + x.b * y.a + m.gen_t * bb));
}

Residue res_pow(const CompletionModel& m, Residue x, mpz_class e) {
    Residue r(1);
    x = res_reduce(m, x);
    while (e > 0) {
        if (mpz_odd_p(e.get_mpz_t())) r = res_mul(m, r, x);
        x = res_mul(m, x, x);
        e >>= 1;
    }
    return r;
}

std::vector<Residue> all_residues(const CompletionModel& m) {
    std::vector<Residue> out;
    if (m.f == 2) {
        for (mpz_class a = 0; a < m.p; ++a)
            for (mpz_class b = 0; b < m.p; ++b) out.emplace_back(a, b);
    } else {
        for (mpz_class a = 0; a < m.p; ++a) out.emplace_back(a);
    }
    return out;
}

// ---------------------------------------------------------------------------
// LocalElement
// ---------------------------------------------------------------------------

LocalElement::LocalElement(PlaceRef place, ScalarPadic a, ScalarPadic b)
    : place_(std::move(place)), a_(std::move(a)), b_(std::move(b)) {}

LocalElement LocalElement::zero(const PlaceRef& P, long absprec) {
    long sa = absprec, sb = absprec;
    if (P.e == 2 && absprec < kPrecInf) {
        sa = (absprec + 1) / 2;
        sb = absprec / 2;
    }
    return LocalElement(P, ScalarPadic::zero_to(P.p, sa), ScalarPadic::zero_to(P.p, sb));
}

LocalElement LocalElement::from_rat(const PlaceRef& P, const mpq_class& x, long prec) {
    return from_pair(P, x, 0, prec);
}

LocalElement LocalElement::from_int(const PlaceRef& P, const mpz_class& x, long prec) {
    return from_pair(P, mpq_class(x), 0, prec);
}

LocalElement LocalElement::one(const PlaceRef& P, long prec) {
    return from_int(P, 1, prec);
}

LocalElement LocalElement::from_pair(const PlaceRef& P, const mpq_class& a, const mpq_class& b, long prec) {
    long sprec = P.e == 2 ? (prec + 1) / 2 + 1 : prec;
    ScalarPadic sa = a == 0 ? ScalarPadic::exact_zero(P.p) : ScalarPadic::from_rat(P.p, a, sprec);
    ScalarPadic sb = b == 0 ? ScalarPadic::exact_zero(P.p) : ScalarPadic::from_rat(P.p, b, sprec);
    if (P.f != 2 && P.e != 2 && b != 0)
        fail(Errc::PlaceMismatch, "second coordinate requires a quadratic completion");
    LocalElement x(P, sa, sb);
    return x.truncated(prec);
}

LocalElement LocalElement::uniformizer(const PlaceRef& P, long prec) {
    if (P.e == 2) return from_pair(P, 0, 1, prec);
    return from_rat(P, mpq_class(P.p), prec);
}

bool LocalElement::is_zero_to_precision() const { return a_.zero && b_.zero; }

long LocalElement::absolute_precision() const {
    if (place_.e == 2) return std::min(addcap(2 * std::min(a_.absprec(), kPrecInf / 2), 0),
                                       addcap(2 * std::min(b_.absprec(), kPrecInf / 2), 1));
    if (place_.f == 2) return std::min(a_.absprec(), b_.absprec());
    return a_.absprec();
}

long LocalElement::valuation() const {
    if (is_zero_to_precision()) fail(Errc::DivisionByZeroToPrecision, "valuation of zero to precision");
    long va = a_.zero ? kPrecInf : a_.v;
    long vb = b_.zero ? kPrecInf : b_.v;
    long v;
    if (place_.e == 2)
        v = std::min(addcap(2 * std::min(va, kPrecInf / 2), 0), addcap(2 * std::min(vb, kPrecInf / 2), 1));
    else
        v = std::min(va, vb);
    if (v >= absolute_precision())
        fail(Errc::PrecisionExhausted, "valuation not determined at current precision");
    return v;
}

long LocalElement::precision() const {
    long A = absolute_precision();
    if (A >= kPrecInf) return kPrecInf;
    return A - valuation();
}

LocalElement LocalElement::truncated(long rel_prec) const {
    if (is_zero_to_precision()) return *this;
    long A = valuation() + std::max<long>(rel_prec, 1);
    if (place_.e == 2)
        return LocalElement(place_, sp_truncate(a_, (A + 1) / 2), sp_truncate(b_, A / 2));
    return LocalElement(place_, sp_truncate(a_, A), sp_truncate(b_, A));
}

static void check_same_place(const LocalElement& x, const LocalElement& y) {
    if (x.place() != y.place())
        fail(Errc::PlaceMismatch, x.place().str() + " vs " + y.place().str());
}

LocalElement le_add(const LocalElement& x, const LocalElement& y) {
    check_same_place(x, y);
    return LocalElement(x.place_, sp_add(x.a_, y.a_), sp_add(x.b_, y.b_));
}

LocalElement le_neg(const LocalElement& x) {
    return LocalElement(x.place_, sp_neg(x.a_), sp_neg(x.b_));
}

LocalElement le_sub(const LocalElement& x, const LocalElement& y) { return le_add(x, le_neg(y)); }

LocalElement le_mul(const LocalElement& x, const LocalElement& y) {
    check_same_place(x, y);
    const PlaceRef& P = x.place_;
    if (P.f != 2 && P.e != 2)
        return LocalElement(P, sp_mul(x.a_, y.a_), ScalarPadic::exact_zero(P.p));
    CompletionModel m = completion_model(P);
    mpz_class t = P.f == 2 ? m.gen_t : m.s1;
    mpz_class n = P.f == 2 ? m.gen_n : m.s0;
    ScalarPadic bb = sp_mul(x.b_, y.b_);
    ScalarPadic real = sp_add(sp_mul(x.a_, y.a_), n == 0 ? ScalarPadic::exact_zero(P.p) : sp_scale(bb, mpq_class(n)));
    ScalarPadic gpart = sp_add(sp_mul(x.a_, y.b_), sp_mul(x.b_, y.a_));
    if (t != 0) gpart = sp_add(gpart, sp_scale(bb, mpq_class(t)));
    return LocalElement(P, real, gpart);
}

LocalElement le_inv(const LocalElement& x) {
    if (x.is_zero_to_precision())
        fail(Errc::DivisionByZeroToPrecision, "inversion of a value indistinguishable from 0");
    const PlaceRef& P = x.place_;
    if (P.f != 2 && P.e != 2)
        return LocalElement(P, sp_inv(x.a_), ScalarPadic::exact_zero(P.p));
    CompletionModel m = completion_model(P);
    mpz_class t = P.f == 2 ? m.gen_t : m.s1;
    mpz_class n = P.f == 2 ? m.gen_n : m.s0;
    // norm = a^2 + t ab - n b^2; conj = (a + t b) - b*gen.
    ScalarPadic ab = sp_mul(x.a_, x.b_);
    ScalarPadic norm = sp_mul(x.a_, x.a_);
    if (t != 0) norm = sp_add(norm, sp_scale(ab, mpq_class(t)));
    if (n != 0) norm = sp_add(norm, sp_scale(sp_mul(x.b_, x.b_), mpq_class(-n)));
    if (norm.zero) fail(Errc::DivisionByZeroToPrecision, "norm vanishes to precision");
    ScalarPadic ninv = sp_inv(norm);
    ScalarPadic ca = x.a_;
    if (t != 0) ca = sp_add(ca, sp_scale(x.b_, mpq_class(t)));
    return LocalElement(P, sp_mul(ca, ninv), sp_mul(sp_neg(x.b_), ninv));
}

LocalElement le_div(const LocalElement& x, const LocalElement& y) { return le_mul(x, le_inv(y)); }

LocalElement le_scale(const LocalElement& x, const mpq_class& c) {
    if (c == 0) fail(Errc::ZeroElement, "scale by zero");
    const ScalarPadic& b = x.coeff_b();
    return LocalElement(x.place(), sp_scale(x.coeff_a(), c), b.zero ? b : sp_scale(b, c));
}

LocalElement le_pow(const LocalElement& x, long e) {
    if (e < 0) return le_pow(le_inv(x), -e);
    long prec = x.is_zero_to_precision() ? 8 : std::min(x.precision() + 4, kPrecMax);
    LocalElement r = LocalElement::one(x.place(), prec);
    LocalElement base = x;
    while (e > 0) {
        if (e & 1) r = le_mul(r, base);
        base = le_mul(base, base);
        e >>= 1;
    }
    return r;
}

LocalElement local_arith(LocalOp op, const LocalElement& x, const LocalElement* y) {
    LocalElement r;
    switch (op) {
        case LocalOp::Add:
            if (!y) fail(Errc::ShapeMismatch, "add needs two operands");
            r = le_add(x, *y);
            break;
        case LocalOp::Mul:
            if (!y) fail(Errc::ShapeMismatch, "mul needs two operands");
            r = le_mul(x, *y);
            break;
        case LocalOp::Inv: r = le_inv(x); break;
        case LocalOp::Neg: r = le_neg(x); break;
    }
    if (!r.is_zero_to_precision() && r.precision() <= 0)
        fail(Errc::PrecisionExhausted, "result has 0 significant digits");
    return r;
}

bool le_known_equal(const LocalElement& x, const LocalElement& y, long& agreement_digits) {
    check_same_place(x, y);
    LocalElement d = le_sub(x, y);
    long A = std::min(x.absolute_precision(), y.absolute_precision());
    if (!d.is_zero_to_precision() && d.valuation() < A) {
        agreement_digits = 0;
        return false;
    }
    long v;
    if (x.is_zero_to_precision() && y.is_zero_to_precision()) v = 0;
    else if (x.is_zero_to_precision()) v = y.valuation();
    else v = x.valuation();
    agreement_digits = std::min(A - v, kPrecInf);
    return true;
}

bool le_is_one(const LocalElement& x, long& agreement_digits) {
    return le_known_equal(x, LocalElement::one(x.place(), kPrecInf), agreement_digits);
}

// Unit part x * pi^{-v}.
static LocalElement unit_part(const LocalElement& x, long v) {
    if (v == 0) return x;
    const PlaceRef& P = x.place();
    if (P.e != 2) {
        mpq_class c(1);
        if (v > 0) c = mpq_class(1) / mpq_class(ppow(P.p, v));
        else c = mpq_class(ppow(P.p, -v));
        return le_scale(x, c);
    }
    CompletionModel m = completion_model(P);
    long work = std::min(x.precision() + 2 * std::abs(v) + 4, kPrecMax);
    // pi^{-1} = (pi - s1)/s0.
    LocalElement pi_inv = LocalElement::from_pair(P, mpq_class(-m.s1) / mpq_class(m.s0),
                                                  mpq_class(1) / mpq_class(m.s0), work);
    if (v > 0) return le_mul(x, le_pow(pi_inv, v));
    return le_mul(x, le_pow(LocalElement::from_pair(P, 0, 1, work), -v));
}

static mpz_class scalar_value_mod(const ScalarPadic& s, long k) {
    mpz_class M = ppow(s.p, k);
    if (s.zero) {
        if (s.zero_absprec < k) fail(Errc::InsufficientPrecision, "scalar not known to requested modulus");
        return 0;
    }
    if (s.v >= k) return 0;
    if (s.v < 0 || s.n < k - s.v) fail(Errc::InsufficientPrecision, "scalar not known to requested modulus");
    return mod_pos(s.u * ppow(s.p, s.v), M);
}

Residue residue_of_unit(const LocalElement& x) {
    long v = x.valuation();
    LocalElement u = unit_part(x, v);
    if (x.place().f == 2)
        return Residue(scalar_value_mod(u.coeff_a(), 1), scalar_value_mod(u.coeff_b(), 1));
    return Residue(scalar_value_mod(u.coeff_a(), 1));
}

std::pair<long, Residue> valuation_residue(const LocalElement& x) {
    if (x.is_zero_to_precision())
        fail(Errc::DivisionByZeroToPrecision, "valuation/residue of zero to precision");
    long v = x.valuation();
    return {v, residue_of_unit(x)};
}

std::vector<Residue> unit_digits(const LocalElement& x, long count) {
    long v = x.valuation();
    count = std::min(count, x.precision());
    std::vector<Residue> out;
    LocalElement u = unit_part(x, v);
    const PlaceRef& P = x.place();
    long work = std::min(count + 8, kPrecMax);
    LocalElement pi = LocalElement::uniformizer(P, work);
    for (long i = 0; i < count; ++i) {
        if (u.is_zero_to_precision()) {
            out.emplace_back(0);
            continue;
        }
        if (u.valuation() > 0) {
            out.emplace_back(0);
            u = le_div(u, pi);
            continue;
        }
        Residue d = residue_of_unit(u);
        out.push_back(d);
        LocalElement lift = LocalElement::from_pair(P, mpq_class(d.a), mpq_class(d.b), work);
        u = le_div(le_sub(u, lift), pi);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ring O/p^K used for Hensel lifting and Teichmuller representatives.
// Elements are pairs (a, b) = a + b*gen, exact integers mod p^K.
// ---------------------------------------------------------------------------

namespace {

struct UnitRing {
    CompletionModel m;
    long K;
    mpz_class M; // p^K
    mpz_class t, n; // gen^2 = t*gen + n

    UnitRing(const CompletionModel& model, long K_) : m(model), K(K_), M(ppow(model.p, K_)) {
        if (m.f == 2) { t = m.gen_t; n = m.gen_n; }
        else if (m.e == 2) { t = m.s1; n = m.s0; }
        else { t = 0; n = 0; }
    }

    using Elt = std::pair<mpz_class, mpz_class>;

    bool quadratic() const { return m.f == 2 || m.e == 2; }

    Elt reduce(const Elt& x) const { return {mod_pos(x.first, M), mod_pos(x.second, M)}; }
    Elt add(const Elt& x, const Elt& y) const { return reduce({x.first + y.first, x.second + y.second}); }
    Elt sub(const Elt& x, const Elt& y) const { return reduce({x.first - y.first, x.second - y.second}); }

    Elt mul(const Elt& x, const Elt& y) const {
        if (!quadratic()) return {mod_pos(x.first * y.first, M), 0};
        mpz_class bb = x.second * y.second;
        return reduce({x.first * y.first + n * bb, x.first * y.second + x.second * y.first + t * bb});
    }

    Elt inv(const Elt& x) const {
        if (!quadratic()) return {invmod(x.first, M), 0};
        mpz_class norm = mod_pos(x.first * x.first + t * x.first * x.second - n * x.second * x.second, M);
        mpz_class ninv = invmod(norm, M);
        return reduce({(x.first + t * x.second) * ninv, -x.second * ninv});
    }

    Elt pow(Elt x, mpz_class e) const {
        Elt r{1, 0};
        while (e > 0) {
            if (mpz_odd_p(e.get_mpz_t())) r = mul(r, x);
            x = mul(x, x);
            e >>= 1;
        }
        return r;
    }

    Elt eval_poly(const std::vector<mpz_class>& poly, const Elt& x) const {
        Elt acc{0, 0};
        for (auto it = poly.rbegin(); it != poly.rend(); ++it)
            acc = add(mul(acc, x), Elt{mod_pos(*it, M), 0});
        return acc;
    }
};

LocalElement element_from_ring(const PlaceRef& P, const UnitRing::Elt& x, long K, long rel_prec) {
    // The pair is exact mod p^K; convert with the matching absolute cap.
    auto mk = [&](const mpz_class& c) {
        if (c == 0) return ScalarPadic::zero_to(P.p, K);
        ScalarPadic s = ScalarPadic::from_int(P.p, c, K);
        return sp_truncate(s, K);
    };
    LocalElement out(P, mk(x.first), mk(x.second));
    if (out.is_zero_to_precision()) return out;
    return out.truncated(rel_prec);
}

std::vector<mpz_class> poly_derivative(const std::vector<mpz_class>& poly) {
    std::vector<mpz_class> d;
    for (size_t i = 1; i < poly.size(); ++i) d.push_back(mpz_class(i) * poly[i]);
    if (d.empty()) d.push_back(0);
    return d;
}

Residue eval_poly_residue(const CompletionModel& m, const std::vector<mpz_class>& poly, const Residue& x) {
    Residue acc(0);
    for (auto it = poly.rbegin(); it != poly.rend(); ++it)
        acc = res_add(m, res_mul(m, acc, x), Residue(mod_pos(*it, m.p)));
    return acc;
}

} // namespace

LocalElement hensel_lift(const std::vector<mpz_class>& poly,
                         const std::optional<Residue>& seed,
                         const PlaceRef& P, long prec) {
    CompletionModel m = completion_model(P);
    std::vector<mpz_class> dpoly = poly_derivative(poly);

    Residue s(0);
    if (seed) {
        s = res_reduce(m, *seed);
        if (!eval_poly_residue(m, poly, s).is_zero())
            fail(Errc::NotASimpleRoot, "seed is not a root of the polynomial mod P");
        if (eval_poly_residue(m, dpoly, s).is_zero())
            fail(Errc::NotASimpleRoot, "derivative vanishes at the seed");
    } else {
        bool found = false;
        for (const Residue& r : all_residues(m)) {
            if (eval_poly_residue(m, poly, r).is_zero() && !eval_poly_residue(m, dpoly, r).is_zero()) {
                s = r;
                found = true;
                break;
            }
        }
        if (!found) fail(Errc::NoRootInResidueField, "polynomial has no simple root in kappa(P)");
    }

    // Exactly zero root: no lifting needed.
    if (s.is_zero() && poly.size() > 0 && poly[0] == 0) return LocalElement::zero(P);

    long v_guess = s.is_zero() ? 1 : 0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        long target_abs = prec + v_guess;
        long K = P.e == 2 ? (target_abs + 1) / 2 + 1 : target_abs;
        UnitRing R(m, std::max<long>(K, 2));
        UnitRing::Elt x{s.a, s.b};
        long steps = 2;
        for (long w = 1; w < R.K; w *= 2) ++steps;
        for (long i = 0; i < steps; ++i) {
            UnitRing::Elt fx = R.eval_poly(poly, x);
            UnitRing::Elt dfx = R.eval_poly(dpoly, x);
            x = R.sub(x, R.mul(fx, R.inv(dfx)));
        }
        LocalElement root = element_from_ring(P, x, R.K, prec);
        if (root.is_zero_to_precision()) {
            v_guess = 2 * (v_guess + 1);
            continue;
        }
        if (root.precision() >= prec) return root;
        v_guess = root.valuation() + 1;
    }
    fail(Errc::PrecisionExhausted, "root valuation too large for requested precision");
}

LocalElement teichmuller(const Residue& r, const PlaceRef& P, long prec) {
    CompletionModel m = completion_model(P);
    Residue s = res_reduce(m, r);
    if (s.is_zero()) fail(Errc::ZeroResidue, "Teichmuller lift of zero");
    long K = P.e == 2 ? (prec + 1) / 2 + 1 : prec;
    K = std::max<long>(K, 2);
    UnitRing R(m, K);
    // omega(r) = r^(q^(K-1)) mod p^K stabilizes digit by digit.
    mpz_class q = P.residue_size();
    UnitRing::Elt x = R.pow({s.a, s.b}, pow_int(q, static_cast<unsigned long>(K - 1)));
    return element_from_ring(P, x, K, prec);
}

bool is_square(const LocalElement& x) {
    if (x.is_zero_to_precision())
        fail(Errc::DivisionByZeroToPrecision, "is_square of zero to precision");
    const PlaceRef& P = x.place();
    long v = x.valuation();
    long need = P.p == 2 ? (P.e == 2 ? 5 : 3) : 1;
    if (x.precision() < need)
        fail(Errc::InsufficientPrecision, "need " + std::to_string(need) + " digits at this place");
    if (v % 2 != 0) return false;
    LocalElement u = unit_part(x, v);
    CompletionModel m = completion_model(P);
    if (P.p != 2) {
        Residue r = residue_of_unit(u);
        if (P.f == 2) return res_pow(m, r, (P.p * P.p - 1) / 2) == Residue(1);
        return kronecker(r.a, P.p) == 1;
    }
    if (P.e == 1 && P.f == 1) return scalar_value_mod(u.coeff_a(), 3) == 1;
    if (P.f == 2) {
        // Unit square iff it is a square mod 8 (Hensel bound v(2)=1).
        mpz_class ua = scalar_value_mod(u.coeff_a(), 3), ub = scalar_value_mod(u.coeff_b(), 3);
        UnitRing R(m, 3);
        for (mpz_class a = 0; a < 8; ++a)
            for (mpz_class b = 0; b < 8; ++b) {
                if (mod_pos(a, 2) == 0 && mod_pos(b, 2) == 0) continue;
                auto sq = R.mul({a, b}, {a, b});
                if (sq.first == ua && sq.second == ub) return true;
            }
        return false;
    }
    // Ramified 2-adic case: square iff square mod pi^5 (Hensel bound v(2)=2).
    mpz_class ua = scalar_value_mod(u.coeff_a(), 3), ub = scalar_value_mod(u.coeff_b(), 2);
    UnitRing R(m, 3);
    for (mpz_class a = 0; a < 8; ++a)
        for (mpz_class b = 0; b < 8; ++b) {
            if (mod_pos(a, 2) == 0) continue; // units have unit first coordinate
            auto sq = R.mul({a, b}, {a, b});
            if (sq.first == ua && mod_pos(sq.second, 4) == mod_pos(ub, 4)) return true;
        }
    return false;
}

// ---------------------------------------------------------------------------
// Text rendering and parsing
// ---------------------------------------------------------------------------

std::string le_text(const LocalElement& x) {
    const PlaceRef& P = x.place();
    std::string base = P.e == 2 ? "pi" : P.p.get_str();
    if (x.is_zero_to_precision()) {
        long A = x.absolute_precision();
        if (A >= kPrecInf) return "0";
        return "0 (O(" + base + "^" + std::to_string(A) + "))";
    }
    long v = x.valuation();
    long N = std::min<long>(x.precision(), 1 << 20);
    std::vector<Residue> ds = unit_digits(x, N);
    std::ostringstream os;
    os << base << "^" << v << " * (";
    for (size_t i = 0; i < ds.size(); ++i) {
        if (i) os << " + ";
        os << ds[i].str();
        if (i == 1) os << "*" << base;
        if (i > 1) os << "*" << base << "^" << i;
    }
    os << ") (O(" << base << "^" << (v + N) << "))";
    return os.str();
}

LocalElement le_parse_text(const PlaceRef& P, const std::string& text) {
    std::string s;
    for (char c : text)
        if (!isspace(static_cast<unsigned char>(c))) s.push_back(c);
    std::string base = P.e == 2 ? "pi" : P.p.get_str();

    auto fail_parse = [&]() -> LocalElement { fail(Errc::ParseError, "bad local literal '" + text + "'"); };

    if (s == "0") return LocalElement::zero(P);
    if (s.rfind("0(O(", 0) == 0) {
        size_t caret = s.find('^');
        if (caret == std::string::npos) return fail_parse();
        long A = std::stol(s.substr(caret + 1, s.size() - caret - 3));
        return LocalElement::zero(P, A);
    }

    if (s.rfind(base + "^", 0) != 0) return fail_parse();
    size_t pos = base.size() + 1;
    size_t star = s.find("*(", pos);
    if (star == std::string::npos) return fail_parse();
    long v = std::stol(s.substr(pos, star - pos));
    size_t close = s.find(")(O(", star);
    if (close == std::string::npos) return fail_parse();
    std::string body = s.substr(star + 2, close - star - 2);
    size_t caret2 = s.rfind('^');
    long absprec = std::stol(s.substr(caret2 + 1, s.size() - caret2 - 3));
    long N = absprec - v;

    // Split the digit list on '+' at depth 0 ('[' opens a residue bracket).
    std::vector<std::string> terms;
    int depth = 0;
    std::string cur;
    for (char c : body) {
        if (c == '[') ++depth;
        if (c == ']') --depth;
        if (c == '+' && depth == 0) {
            terms.push_back(cur);
            cur.clear();
        } else cur.push_back(c);
    }
    if (!cur.empty()) terms.push_back(cur);

    LocalElement acc = LocalElement::zero(P, kPrecInf);
    LocalElement pi = LocalElement::uniformizer(P, N + 8);
    for (const std::string& term : terms) {
        std::string digit = term;
        long k = 0;
        size_t cut = term.find("*" + base);
        if (cut != std::string::npos) {
            digit = term.substr(0, cut);
            std::string rest = term.substr(cut + 1 + base.size());
            k = rest.empty() ? 1 : std::stol(rest.substr(1));
        }
        mpq_class da, db;
        if (!digit.empty() && digit.front() == '[') {
            size_t plus = digit.find('+');
            size_t starw = digit.find("*w");
            if (plus == std::string::npos || starw == std::string::npos) return fail_parse();
            da = parse_rational(digit.substr(1, plus - 1));
            db = parse_rational(digit.substr(plus + 1, starw - plus - 1));
        } else {
            da = parse_rational(digit);
        }
        LocalElement d = LocalElement::from_pair(P, da, db, N + 8);
        acc = le_add(acc, le_mul(d, le_pow(pi, k)));
    }
    acc = le_mul(acc, le_pow(pi, v));
    return acc.truncated(N);
}

} // namespace adelic
