#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "localfield.hpp"

using namespace adelic;

namespace {

PlaceRef qp(long p) {
    return PlaceRef::finite(FieldDesc::make_rational(), p, 1, 1);
}

LocalElement q_elem(long p, const mpq_class& x, long prec = 32) {
    return LocalElement::from_rat(qp(p), x, prec);
}

} // namespace

TEST_CASE("valuation additivity and basic products") {
    auto x = q_elem(5, 2);
    auto y = q_elem(5, 15); // v=1, u=3
    auto z = le_mul(x, y);
    CHECK(z.valuation() == 1);
    CHECK(residue_of_unit(z) == Residue(1)); // 6 = 5^0*6 -> unit residue 6 mod 5 = 1
    auto [v, r] = valuation_residue(z);
    CHECK(v == 1);
    CHECK(r == Residue(1));
}

TEST_CASE("uniformizer inverse") {
    auto x = q_elem(5, 5);
    auto ix = le_inv(x);
    CHECK(ix.valuation() == -1);
    CHECK(residue_of_unit(ix) == Residue(1));
}

TEST_CASE("2 + 3 = 5 exactly in Q_5") {
    auto s = le_add(q_elem(5, 2), q_elem(5, 3));
    CHECK(s.valuation() == 1);
    CHECK(residue_of_unit(s) == Residue(1));
}

TEST_CASE("addition reports cancellation depth") {
    auto x = q_elem(5, 7, 10);
    auto y = q_elem(5, -7 + 125, 10); // differs from -x by 5^3
    auto s = le_add(x, y);
    CHECK(s.valuation() == 3);
    CHECK(s.precision() == 7); // lost exactly the cancellation depth
}

TEST_CASE("full cancellation produces zero-to-precision, inversion rejects it") {
    auto x = q_elem(7, 3, 12);
    auto z = le_add(x, le_neg(x));
    CHECK(z.is_zero_to_precision());
    CHECK_THROWS_AS(le_inv(z), Error);
}

TEST_CASE("valuation_residue worked examples") {
    auto a = q_elem(3, 18);
    CHECK(valuation_residue(a) == std::pair<long, Residue>(2, Residue(2)));
    auto b = q_elem(7, 1);
    CHECK(valuation_residue(b) == std::pair<long, Residue>(0, Residue(1)));
    auto c = q_elem(7, mpq_class(7, 5));
    CHECK(valuation_residue(c) == std::pair<long, Residue>(1, Residue(3)));
}

TEST_CASE("random multiplicativity of valuation") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 500; ++i) {
        long p = std::vector<long>{2, 3, 5, 7, 13}[rng() % 5];
        auto rnd = [&]() {
            mpz_class num = mpz_class(static_cast<long>(rng() % 4000) - 2000);
            if (num == 0) num = 1;
            mpz_class den = mpz_class(static_cast<long>(rng() % 2000) + 1);
            return mpq_class(num, den);
        };
        auto x = q_elem(p, rnd());
        auto y = q_elem(p, rnd());
        CHECK(le_mul(x, y).valuation() == x.valuation() + y.valuation());
    }
}

TEST_CASE("ultrametric inequality") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 300; ++i) {
        long p = 3;
        mpq_class a(static_cast<long>(rng() % 1000) + 1, static_cast<long>(rng() % 50) + 1);
        mpq_class b(static_cast<long>(rng() % 1000) + 1, static_cast<long>(rng() % 50) + 1);
        auto x = q_elem(p, a);
        auto y = q_elem(p, b);
        auto s = le_add(x, y);
        if (s.is_zero_to_precision()) continue;
        long vx = x.valuation(), vy = y.valuation();
        CHECK(s.valuation() >= std::min(vx, vy));
        if (vx != vy) CHECK(s.valuation() == std::min(vx, vy));
    }
}

TEST_CASE("hensel lift of sqrt(2) in Z_7") {
    std::vector<mpz_class> poly = {-2, 0, 1};
    auto r = hensel_lift(poly, Residue(3), qp(7), 2);
    // Exhaustive search mod 49 gives roots {10, 39}; seed 3 picks 10.
    CHECK(r.valuation() == 0);
    auto ds = unit_digits(r, 2);
    CHECK(ds[0] == Residue(3));
    CHECK(ds[1] == Residue(1)); // 10 = 3 + 1*7
}

TEST_CASE("hensel: linear polynomial and missing roots") {
    std::vector<mpz_class> lin = {-1, 1};
    auto r = hensel_lift(lin, Residue(1), qp(13), 8);
    long agree = 0;
    CHECK(le_is_one(r, agree));
    CHECK(agree >= 8);

    std::vector<mpz_class> poly = {-2, 0, 1};
    CHECK_THROWS_WITH_AS(hensel_lift(poly, std::nullopt, qp(5), 4), doctest::Contains("NoRootInResidueField"),
                         Error);
    CHECK_THROWS_AS(hensel_lift(poly, Residue(1), qp(7), 4), Error); // 1 is not a root
}

TEST_CASE("hensel idempotence: higher precision extends digits") {
    std::vector<mpz_class> poly = {-2, 0, 1};
    auto lo = hensel_lift(poly, Residue(3), qp(7), 6);
    auto hi = hensel_lift(poly, Residue(3), qp(7), 20);
    auto dlo = unit_digits(lo, 6);
    auto dhi = unit_digits(hi, 6);
    CHECK(dlo == dhi);
}

TEST_CASE("teichmuller worked examples") {
    auto t2 = teichmuller(Residue(2), qp(5), 2);
    auto ds = unit_digits(t2, 2);
    CHECK(ds[0] == Residue(2));
    CHECK(ds[1] == Residue(1)); // 7 = 2 + 1*5

    long agree = 0;
    CHECK(le_is_one(teichmuller(Residue(1), qp(11), 10), agree));

    auto m1 = teichmuller(Residue(4), qp(5), 6);
    for (const Residue& d : unit_digits(m1, 6)) CHECK(d == Residue(4)); // -1 has all digits 4
    CHECK_THROWS_AS(teichmuller(Residue(0), qp(5), 4), Error);
}

TEST_CASE("teichmuller closure under multiplication") {
    long p = 11;
    long q1 = p - 1;
    std::vector<LocalElement> roots;
    for (long r = 1; r < p; ++r) roots.push_back(teichmuller(Residue(r), qp(p), 24));
    CHECK(static_cast<long>(roots.size()) == q1);
    for (long i = 0; i < q1; ++i) {
        // x^(q-1) = 1 to working precision
        long agree = 0;
        CHECK(le_is_one(le_pow(roots[i], q1), agree));
        CHECK(agree >= 20);
        for (long j = 0; j < q1; ++j) {
            auto prod = le_mul(roots[i], roots[j]);
            auto expect = teichmuller(res_mul(completion_model(qp(p)), Residue(i + 1), Residue(j + 1)),
                                      qp(p), 24);
            long ag = 0;
            CHECK(le_known_equal(prod, expect, ag));
        }
    }
}

TEST_CASE("is_square") {
    CHECK(is_square(q_elem(7, 2)));        // 3^2 = 2 mod 7
    CHECK_FALSE(is_square(q_elem(5, 5)));  // odd valuation
    CHECK(is_square(q_elem(2, 17)));       // 1 mod 8
    CHECK_FALSE(is_square(q_elem(2, 3)));
    CHECK(is_square(q_elem(2, 4)));
    CHECK_THROWS_AS(is_square(q_elem(2, 3, 2)), Error); // needs 3 digits at p=2
}

TEST_CASE("unramified quadratic completion arithmetic") {
    FieldDesc F = FieldDesc::quadratic(-5);
    PlaceRef P = PlaceRef::finite(F, 11, 1, 2); // 11 inert in Q(sqrt(-5))
    auto x = LocalElement::from_pair(P, 3, 1, 20);
    auto y = LocalElement::from_pair(P, mpq_class(1, 11), 2, 20);
    auto z = le_mul(x, y);
    CHECK(z.valuation() == x.valuation() + y.valuation());
    auto w = le_mul(z, le_inv(z));
    long agree = 0;
    CHECK(le_is_one(w, agree));
    CHECK(agree >= 18);

    // Norm-based inversion keeps residues consistent.
    auto inv = le_inv(x);
    CHECK(inv.valuation() == -x.valuation());
}

TEST_CASE("ramified quadratic completion arithmetic") {
    FieldDesc F = FieldDesc::quadratic(-5);
    PlaceRef P5 = PlaceRef::finite(F, 5, 2, 1);
    auto pi = LocalElement::uniformizer(P5, 20);
    CHECK(pi.valuation() == 1);
    auto p5 = LocalElement::from_rat(P5, 5, 20);
    CHECK(p5.valuation() == 2); // v(p) = e
    auto sq = le_mul(pi, pi);
    CHECK(sq.valuation() == 2);
    long agree = 0;
    CHECK(le_is_one(le_mul(pi, le_inv(pi)), agree));

    PlaceRef P2 = PlaceRef::finite(F, 2, 2, 1);
    auto pi2 = LocalElement::uniformizer(P2, 20);
    CHECK(pi2.valuation() == 1);
    CHECK(le_mul(pi2, pi2).valuation() == 2);
    CHECK(LocalElement::from_rat(P2, 2, 20).valuation() == 2);
}

TEST_CASE("text rendering round-trips") {
    auto x = q_elem(5, mpq_class(7, 25), 6);
    std::string s = le_text(x);
    CHECK(s.find("5^-2") == 0);
    auto back = le_parse_text(qp(5), s);
    long agree = 0;
    CHECK(le_known_equal(x, back, agree));
    CHECK(agree >= 6);

    FieldDesc F = FieldDesc::quadratic(-5);
    PlaceRef P = PlaceRef::finite(F, 11, 1, 2);
    auto y = LocalElement::from_pair(P, mpq_class(14, 3), 9, 5);
    auto back2 = le_parse_text(P, le_text(y));
    CHECK(le_known_equal(y, back2, agree));

    PlaceRef P5 = PlaceRef::finite(F, 5, 2, 1);
    auto z = le_inv(LocalElement::from_pair(P5, 1, 3, 9));
    auto back3 = le_parse_text(P5, le_text(z));
    CHECK(le_known_equal(z, back3, agree));
}

TEST_CASE("local_arith surface rejects mixed places") {
    auto x = q_elem(5, 2);
    auto y = q_elem(7, 2);
    CHECK_THROWS_AS(local_arith(LocalOp::Add, x, &y), Error);
}
