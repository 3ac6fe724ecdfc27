#include "numberfield.hpp"

#include <algorithm>
#include <sstream>

namespace adelic {

namespace {

// Smallest square root of a mod p (odd prime), brute force; primes here are
// test-scale.
mpz_class sqrt_mod(const mpz_class& a, const mpz_class& p) {
    mpz_class r = mod_pos(a, p);
    for (mpz_class x = 0; x <= p / 2; ++x)
        if (mod_pos(x * x - r, p) == 0) return x;
    fail(Errc::UnsupportedPlace, "no square root mod " + p.get_str());
}

// Residue roots of the minimal polynomial of w, ascending.
std::vector<mpz_class> omega_residue_roots(const FieldDesc& F, const mpz_class& p) {
    mpz_class t(F.omega_trace()), m(F.omega_norm());
    if (p == 2) {
        std::vector<mpz_class> roots;
        for (mpz_class x = 0; x < 2; ++x)
            if (mod_pos(x * x - t * x - m, 2) == 0) roots.push_back(x);
        return roots;
    }
    mpz_class disc = mod_pos(t * t + 4 * m, p);
    int kr = kronecker(disc, p);
    if (kr == -1) return {};
    mpz_class s = sqrt_mod(disc, p);
    mpz_class half = invmod(2, p);
    mpz_class r0 = mod_pos((t + s) * half, p), r1 = mod_pos((t - s) * half, p);
    if (r0 > r1) std::swap(r0, r1);
    if (r0 == r1) return {r0};
    return {r0, r1};
}

} // namespace

std::vector<PlaceRef> split_prime(const FieldDesc& F, const mpz_class& p) {
    if (!is_prime(p)) fail(Errc::NotPrime, p.get_str() + " is not prime");
    if (F.rational) return {PlaceRef::finite(F, p, 1, 1, 0)};
    int kr = kronecker(F.discriminant(), p);
    if (kr == 0) return {PlaceRef::finite(F, p, 2, 1, 0)};
    if (kr == 1)
        return {PlaceRef::finite(F, p, 1, 1, 0), PlaceRef::finite(F, p, 1, 1, 1)};
    return {PlaceRef::finite(F, p, 1, 2, 0)};
}

PlaceRef place_by_key(const FieldDesc& F, const PlaceKey& k) {
    for (const PlaceRef& P : split_prime(F, k.p))
        if (P.index == k.index) return P;
    fail(Errc::UnsupportedPlace, "no place with index " + std::to_string(k.index) + " above " + k.p.get_str());
}

std::vector<PlaceRef> arch_places(const FieldDesc& F) {
    std::vector<PlaceRef> out;
    for (int i = 0; i < F.real_places(); ++i) out.push_back(PlaceRef::real(F, i));
    for (int i = 0; i < F.complex_places(); ++i) out.push_back(PlaceRef::complex(F, i));
    return out;
}

LocalElement embed_finite(const FieldDesc& F, const FieldElem& x, const PlaceRef& P, long prec) {
    if (x.is_zero()) fail(Errc::ZeroElement, "embedding of zero");
    if (!P.is_finite()) fail(Errc::PlaceFieldMismatch, "finite place required");
    if (P.field != F) fail(Errc::PlaceFieldMismatch, "place belongs to a different field");
    if (F.rational) return LocalElement::from_rat(P, x.u, prec);

    if (P.e == 2) {
        // w in exact pi-coordinates.
        mpq_class oa, ob;
        if (F.omega_trace() == 1) {
            oa = mpq_class(1, 2);
            ob = mpq_class(1, 2);
        } else if (P.p == 2 && ((F.d % 4) + 4) % 4 == 3) {
            oa = -1;
            ob = 1; // pi = 1 + sqrt(d)
        } else {
            oa = 0;
            ob = 1; // pi = sqrt(d)
        }
        return LocalElement::from_pair(P, x.u + x.v * oa, x.v * ob, prec);
    }

    // Split or inert: lift w adaptively until the target precision is visible.
    mpz_class t(F.omega_trace()), m(F.omega_norm());
    std::vector<mpz_class> minpoly = {-m, -t, 1};
    for (long K = prec + 8; K <= 64 * prec + 4096; K *= 2) {
        LocalElement w_local = [&]() {
            if (P.f == 2) return hensel_lift(minpoly, std::nullopt, P, K);
            auto roots = omega_residue_roots(F, P.p);
            if (static_cast<size_t>(P.index) >= roots.size())
                fail(Errc::UnsupportedPlace, "split root index out of range");
            return hensel_lift(minpoly, Residue(roots[P.index]), P, K);
        }();
        LocalElement acc = LocalElement::from_rat(P, x.u == 0 ? mpq_class(0) : x.u, K);
        if (x.u == 0) acc = LocalElement::zero(P, kPrecInf);
        if (x.v != 0) acc = le_add(acc, le_scale(w_local, x.v));
        if (!acc.is_zero_to_precision() && acc.precision() >= prec) return acc.truncated(prec);
    }
    fail(Errc::PrecisionExhausted, "embedding valuation too large for requested precision");
}

ArchValue embed_arch(const FieldDesc& F, const FieldElem& x, const PlaceRef& P) {
    if (P.is_finite()) fail(Errc::PlaceFieldMismatch, "archimedean place required");
    ArchValue out;
    if (F.rational) {
        out.re = {x.u, 0};
        return out;
    }
    mpq_class wp = F.omega_trace() == 1 ? mpq_class(1, 2) : mpq_class(0); // rational part of sigma(w)
    mpq_class wr = F.omega_trace() == 1 ? mpq_class(1, 2) : mpq_class(1); // sqrt coefficient
    if (P.kind == PlaceKind::Real) {
        mpq_class sign = P.index == 0 ? 1 : -1;
        out.re = {x.u + x.v * wp, x.v * wr * sign};
        return out;
    }
    out.is_complex = true;
    out.re = {x.u + x.v * wp, 0};
    out.im = {0, x.v * wr};
    return out;
}

EmbedResult embed_global(const FieldDesc& F, const FieldElem& x, const PlaceRef& P, long prec) {
    if (x.is_zero()) fail(Errc::ZeroElement, "embedding of zero");
    if (P.is_finite()) return embed_finite(F, x, P, prec);
    return embed_arch(F, x, P);
}

long global_valuation(const FieldDesc& F, const FieldElem& x, const PlaceRef& P) {
    return embed_finite(F, x, P, 4).valuation();
}

long different_exponent(const PlaceRef& P) {
    if (!P.is_finite()) fail(Errc::UnsupportedPlace, "different exponent requires a finite place");
    const FieldDesc& F = P.field;
    if (F.rational) return 0;
    // f'(w) = 2w - t for the minimal polynomial x^2 - t x - m.
    FieldElem fp{mpq_class(-F.omega_trace()), 2};
    return global_valuation(F, fp, P);
}

bool FracIdeal::is_integral() const {
    for (const auto& [k, e] : places)
        if (e < 0) return false;
    return true;
}

FracIdeal ideal_mul(const FracIdeal& a, const FracIdeal& b) {
    FracIdeal out = a;
    for (const auto& [k, e] : b.places) {
        out.places[k] += e;
        if (out.places[k] == 0) out.places.erase(k);
    }
    return out;
}

FracIdeal ideal_inv(const FracIdeal& a) {
    FracIdeal out;
    for (const auto& [k, e] : a.places) out.places[k] = -e;
    return out;
}

mpq_class ideal_norm(const FieldDesc& F, const FracIdeal& J) {
    mpq_class n = 1;
    for (const auto& [k, e] : J.places) {
        PlaceRef P = place_by_key(F, k);
        mpq_class q(P.residue_size());
        for (long i = 0; i < std::abs(e); ++i) n *= (e > 0 ? q : 1 / q);
    }
    return n;
}

mpz_class ideal_denominator(const FieldDesc& F, const FracIdeal& J) {
    mpz_class n = 1;
    for (const auto& [k, e] : J.places) {
        if (e >= 0) continue;
        PlaceRef P = place_by_key(F, k);
        // Multiplying by p raises v_P by e(P); need e*ceil(|e|/e(P)) more care:
        long need = (-e + P.e - 1) / P.e;
        n *= pow_int(k.p, static_cast<unsigned long>(need));
    }
    return n;
}

FracIdeal principal_ideal(const FieldDesc& F, const FieldElem& x) {
    if (x.is_zero()) fail(Errc::ZeroElement, "principal ideal of zero");
    FracIdeal out;
    std::map<mpz_class, long> primes;
    mpz_class den = lcm(x.u.get_den(), x.v.get_den());
    for (const auto& [p, e] : factor(den)) primes[p] = 1;
    FieldElem h{x.u * mpq_class(den), x.v * mpq_class(den)};
    mpq_class N = fe_norm(F, h);
    for (const auto& [p, e] : factor(N.get_num())) primes[p] = 1;
    for (const auto& [p, unused] : primes) {
        for (const PlaceRef& P : split_prime(F, p)) {
            long v = global_valuation(F, x, P);
            if (v != 0) out.places[key_of(P)] = v;
        }
    }
    return out;
}

namespace {

// Column HNF of a 2-row integer matrix; returns generators {a, b + c*w}
// with a, c > 0, c | a, c | b, 0 <= b < a.
IdealBasis hnf2(std::vector<std::pair<mpz_class, mpz_class>> cols) {
    // First clear the w-row to a single pivot via extended gcds.
    mpz_class g = 0, gx = 0, gy = 0;
    std::pair<mpz_class, mpz_class> pivot{0, 0};
    for (auto& col : cols) {
        if (col.second == 0) continue;
        if (pivot.second == 0) {
            pivot = col;
            col = {0, 0};
            continue;
        }
        mpz_class s, t_;
        mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t_.get_mpz_t(), pivot.second.get_mpz_t(),
                   col.second.get_mpz_t());
        std::pair<mpz_class, mpz_class> np{s * pivot.first + t_ * col.first, g};
        // Replace col by the combination killing the w-coefficient.
        mpz_class u1 = pivot.second / g, u2 = col.second / g;
        col = {u1 * col.first - u2 * pivot.first, 0};
        pivot = np;
    }
    mpz_class a = 0;
    for (const auto& col : cols) {
        mpz_class t0 = abs(col.first);
        mpz_gcd(a.get_mpz_t(), a.get_mpz_t(), t0.get_mpz_t());
    }
    if (pivot.second < 0) { pivot.first = -pivot.first; pivot.second = -pivot.second; }
    IdealBasis out;
    out.a = a;
    out.c = pivot.second;
    out.b = a == 0 ? pivot.first : mod_pos(pivot.first, a);
    if (out.a == 0 || out.c == 0) fail(Errc::ShapeMismatch, "ideal basis degenerated");
    return out;
}

// Z-module generators of the prime ideal above p with the given place.
std::vector<FieldElem> prime_ideal_gens(const FieldDesc& F, const PlaceRef& P) {
    mpq_class p(P.p);
    if (P.f == 2) return {FieldElem{p, 0}, FieldElem{0, p}};
    mpz_class a;
    if (P.e == 2) {
        if (P.p == 2) a = mod_pos(mpz_class(F.d), 2);
        else a = mod_pos(mpz_class(F.omega_trace()) * invmod(2, P.p), P.p);
    } else {
        auto roots = omega_residue_roots(F, P.p);
        a = roots.at(P.index);
    }
    return {FieldElem{p, 0}, FieldElem{mpq_class(-a), 1}};
}

} // namespace

IdealBasis ideal_z_basis(const FieldDesc& F, const FracIdeal& J) {
    if (F.rational) fail(Errc::UnsupportedField, "Z-basis is for quadratic fields");
    if (!J.is_integral()) fail(Errc::NonIntegralIdeal, "Z-basis requires an integral ideal");
    std::vector<FieldElem> gens = {FieldElem{1, 0}, FieldElem{0, 1}};
    for (const auto& [k, e] : J.places) {
        PlaceRef P = place_by_key(F, k);
        auto pg = prime_ideal_gens(F, P);
        for (long i = 0; i < e; ++i) {
            std::vector<FieldElem> prod;
            for (const FieldElem& g1 : gens)
                for (const FieldElem& g2 : pg) prod.push_back(fe_mul(F, g1, g2));
            std::vector<std::pair<mpz_class, mpz_class>> cols;
            for (const FieldElem& g : prod) {
                if (g.u.get_den() != 1 || g.v.get_den() != 1)
                    fail(Errc::ShapeMismatch, "non-integral coordinates in ideal product");
                cols.emplace_back(g.u.get_num(), g.v.get_num());
            }
            IdealBasis hb = hnf2(cols);
            gens = {FieldElem{mpq_class(hb.a), 0}, FieldElem{mpq_class(hb.b), mpq_class(hb.c)}};
        }
    }
    if (gens[0].u.get_den() != 1) fail(Errc::ShapeMismatch, "basis not integral");
    IdealBasis out;
    out.a = gens[0].u.get_num();
    out.b = gens[1].u.get_num();
    out.c = gens[1].v.get_num();
    return out;
}

MinkowskiData minkowski(const FieldDesc& F, const FracIdeal& J) {
    if (!J.is_integral())
        fail(Errc::NonIntegralIdeal, "exact embedding basis requires an integral ideal");
    MinkowskiData out;
    if (F.rational) {
        mpq_class n = ideal_norm(F, J);
        out.basis = {{SqrtCoord{n, 0}}};
        out.covolume_squared = n * n;
        out.torus_rank = 1;
        out.torus_lattice = out.basis;
        return out;
    }
    IdealBasis zb = ideal_z_basis(F, J);
    FieldElem g1{mpq_class(zb.a), 0}, g2{mpq_class(zb.b), mpq_class(zb.c)};
    out.basis.assign(2, std::vector<SqrtCoord>(2));
    if (F.d > 0) {
        for (int i = 0; i < 2; ++i) {
            ArchValue v1 = embed_arch(F, g1, PlaceRef::real(F, i));
            ArchValue v2 = embed_arch(F, g2, PlaceRef::real(F, i));
            out.basis[i][0] = v1.re;
            out.basis[i][1] = v2.re;
        }
    } else {
        ArchValue v1 = embed_arch(F, g1, PlaceRef::complex(F, 0));
        ArchValue v2 = embed_arch(F, g2, PlaceRef::complex(F, 0));
        out.basis[0][0] = v1.re;
        out.basis[0][1] = v2.re;
        out.basis[1][0] = v1.im;
        out.basis[1][1] = v2.im;
    }
    mpz_class abs_d = abs(mpz_class(F.d));
    SqrtCoord det = sc_sub(sc_mul(out.basis[0][0], out.basis[1][1], abs_d),
                           sc_mul(out.basis[0][1], out.basis[1][0], abs_d));
    SqrtCoord det2 = sc_mul(det, det, abs_d);
    if (det2.root != 0) fail(Errc::ShapeMismatch, "covolume squared is not rational");
    out.covolume_squared = det2.plain;
    if (out.covolume_squared < 0) out.covolume_squared = -out.covolume_squared;
    out.torus_rank = 2;
    out.torus_lattice = out.basis;
    return out;
}

std::string FormClass::label() const {
    if (trivial()) return "principal";
    std::ostringstream os;
    os << "(" << A.get_str() << "," << B.get_str() << "," << C.get_str() << ")";
    return os.str();
}

namespace {

struct FormWithTransform {
    mpz_class A, B, C;
    mpz_class u00 = 1, u01 = 0, u10 = 0, u11 = 1; // Q_red(v) = Q(U v)

    void apply(const mpz_class& t00, const mpz_class& t01, const mpz_class& t10, const mpz_class& t11) {
        mpz_class n00 = u00 * t00 + u01 * t10, n01 = u00 * t01 + u01 * t11;
        mpz_class n10 = u10 * t00 + u11 * t10, n11 = u10 * t01 + u11 * t11;
        u00 = n00; u01 = n01; u10 = n10; u11 = n11;
    }
};

void reduce_form(FormWithTransform& f) {
    for (int guard = 0; guard < 10000; ++guard) {
        if (f.B > f.A || f.B <= -f.A) {
            mpz_class k;
            mpz_class num = f.A - f.B, den = 2 * f.A;
            mpz_fdiv_q(k.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
            // (x, y) -> (x + k y, y)
            mpz_class newC = f.A * k * k + f.B * k + f.C;
            f.B = f.B + 2 * f.A * k;
            f.C = newC;
            f.apply(1, k, 0, 1);
            continue;
        }
        if (f.A > f.C) {
            // (x, y) -> (-y, x)
            std::swap(f.A, f.C);
            f.B = -f.B;
            f.apply(0, -1, 1, 0);
            continue;
        }
        if (f.A == f.C && f.B < 0) {
            f.B = -f.B;
            f.apply(0, -1, 1, 0);
            continue;
        }
        return;
    }
    fail(Errc::BudgetExceeded, "form reduction did not converge");
}

FormWithTransform form_of_ideal(const FieldDesc& F, const FracIdeal& J) {
    IdealBasis zb = ideal_z_basis(F, J);
    mpz_class t(F.omega_trace()), m(F.omega_norm());
    mpz_class NJ = zb.a * zb.c;
    FormWithTransform f;
    // Q(x, y) = N(x*a + y*(b + c w)) / N(J)
    f.A = zb.a * zb.a / NJ;
    f.B = zb.a * (2 * zb.b + t * zb.c) / NJ;
    f.C = (zb.b * zb.b + t * zb.b * zb.c - m * zb.c * zb.c) / NJ;
    if (f.B * f.B - 4 * f.A * f.C != F.discriminant())
        fail(Errc::ShapeMismatch, "form discriminant mismatch");
    return f;
}

} // namespace

FormClass ideal_class(const FieldDesc& F, const FracIdeal& J) {
    if (F.rational) return FormClass{1, 0, 0};
    if (F.d > 0) fail(Errc::UnsupportedField, "class computation is limited to imaginary quadratic fields");
    FracIdeal JJ = J;
    mpz_class den = ideal_denominator(F, J);
    if (den != 1) JJ = ideal_mul(J, principal_ideal(F, FieldElem{mpq_class(den), 0}));
    FormWithTransform f = form_of_ideal(F, JJ);
    reduce_form(f);
    return FormClass{f.A, f.B, f.C};
}

std::vector<FormClass> reduced_forms(const mpz_class& disc) {
    std::vector<FormClass> out;
    if (disc >= 0) fail(Errc::UnsupportedField, "negative discriminants only");
    for (mpz_class A = 1; 3 * A * A <= -disc; ++A) {
        for (mpz_class B = -A + 1; B <= A; ++B) {
            mpz_class num = B * B - disc;
            if (num % (4 * A) != 0) continue;
            mpz_class C = num / (4 * A);
            if (C < A) continue;
            if (A == C && B < 0) continue;
            mpz_class g;
            mpz_gcd(g.get_mpz_t(), A.get_mpz_t(), B.get_mpz_t());
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), C.get_mpz_t());
            if (g != 1) continue;
            out.push_back(FormClass{A, B, C});
        }
    }
    return out;
}

FieldElem principal_generator(const FieldDesc& F, const FracIdeal& J) {
    if (F.rational) {
        mpq_class q = 1;
        for (const auto& [k, e] : J.places) {
            for (long i = 0; i < std::abs(e); ++i) q *= (e > 0 ? mpq_class(k.p) : 1 / mpq_class(k.p));
        }
        return FieldElem{q, 0};
    }
    if (F.d > 0) fail(Errc::UnsupportedField, "class computation is limited to imaginary quadratic fields");
    mpz_class den = ideal_denominator(F, J);
    FracIdeal JJ = den == 1 ? J : ideal_mul(J, principal_ideal(F, FieldElem{mpq_class(den), 0}));
    IdealBasis zb = ideal_z_basis(F, JJ);
    FormWithTransform f = form_of_ideal(F, JJ);
    reduce_form(f);
    if (f.A != 1)
        fail(Errc::NonPrincipalFinitePart, "ideal class " + FormClass{f.A, f.B, f.C}.label());
    FieldElem alpha{mpq_class(zb.a), 0}, beta{mpq_class(zb.b), mpq_class(zb.c)};
    FieldElem gen = fe_add(fe_mul(F, alpha, FieldElem{mpq_class(f.u00), 0}),
                           fe_mul(F, beta, FieldElem{mpq_class(f.u10), 0}));
    if (den != 1) gen = FieldElem{gen.u / mpq_class(den), gen.v / mpq_class(den)};
    if (abs(fe_norm(F, gen)) != abs(ideal_norm(F, J)))
        fail(Errc::ShapeMismatch, "generator norm mismatch");
    return gen;
}

std::vector<FieldElem> torsion_units(const FieldDesc& F) {
    std::vector<FieldElem> out = {FieldElem{1, 0}, FieldElem{-1, 0}};
    if (F.rational || F.d > 0) return out;
    if (F.d == -1) {
        out.push_back(FieldElem{0, 1});
        out.push_back(FieldElem{0, -1});
    } else if (F.d == -3) {
        // zeta_6 = w, w^2 = w - 1.
        out.push_back(FieldElem{0, 1});
        out.push_back(FieldElem{0, -1});
        out.push_back(FieldElem{-1, 1});
        out.push_back(FieldElem{1, -1});
    }
    return out;
}

} // namespace adelic
