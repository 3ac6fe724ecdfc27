#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "numberfield.hpp"

using namespace adelic;

namespace {
const FieldDesc Q = FieldDesc::make_rational();
const FieldDesc Qm5 = FieldDesc::quadratic(-5);
} // namespace

TEST_CASE("field descriptors") {
    CHECK(Q.discriminant() == 1);
    CHECK(Qm5.discriminant() == -20);
    CHECK(FieldDesc::quadratic(-7).discriminant() == -7);
    CHECK(FieldDesc::quadratic(5).discriminant() == 5);
    CHECK(FieldDesc::quadratic(2).discriminant() == 8);
    CHECK_THROWS_AS(FieldDesc::quadratic(12), Error);
    CHECK(FieldDesc::parse("quad:-5") == Qm5);
    CHECK(Qm5.real_places() == 0);
    CHECK(Qm5.complex_places() == 1);
    CHECK(FieldDesc::quadratic(5).real_places() == 2);
}

TEST_CASE("field element arithmetic and parsing") {
    FieldElem x = fe_parse(Qm5, "1/2+3w");
    CHECK(x.u == mpq_class(1, 2));
    CHECK(x.v == 3);
    CHECK(fe_norm(Qm5, x) == mpq_class(1, 4) + 45); // u^2 + 5 v^2
    FieldElem y = fe_mul(Qm5, x, fe_inv(Qm5, x));
    CHECK(y == FieldElem{1, 0});
    CHECK(fe_parse(Qm5, "-w") == FieldElem{0, -1});
    CHECK(fe_str(fe_parse(Qm5, "2-w")) == "2-w");
}

TEST_CASE("split_prime on worked examples") {
    auto s3 = split_prime(Qm5, 3);
    CHECK(s3.size() == 2); // split
    auto s11 = split_prime(Qm5, 11);
    REQUIRE(s11.size() == 1);
    CHECK(s11[0].f == 2); // inert
    auto s5 = split_prime(Qm5, 5);
    REQUIRE(s5.size() == 1);
    CHECK(s5[0].e == 2); // ramified
    CHECK_THROWS_AS(split_prime(Qm5, 15), Error);
    CHECK(split_prime(Q, 7).size() == 1);
}

TEST_CASE("splitting completeness: sum of e*f = degree") {
    for (long d : {-1L, -5L, -7L, 2L, 5L}) {
        FieldDesc F = FieldDesc::quadratic(d);
        for (mpz_class p = 2; p <= 200; ++p) {
            if (!is_prime(p)) continue;
            int total = 0;
            for (const PlaceRef& P : split_prime(F, p)) total += P.e * P.f;
            CHECK(total == 2);
        }
    }
}

TEST_CASE("embed_global examples") {
    // 1/2 into Q_7 has residue 4.
    auto x = embed_finite(Q, FieldElem{mpq_class(1, 2), 0}, split_prime(Q, 7)[0], 16);
    CHECK(valuation_residue(x) == std::pair<long, Residue>(0, Residue(4)));

    // sqrt(-5) has valuation 1 at the ramified place above 5.
    PlaceRef P5 = split_prime(Qm5, 5)[0];
    auto w = embed_finite(Qm5, FieldElem{0, 1}, P5, 12);
    CHECK(w.valuation() == 1);

    // identity everywhere
    for (const PlaceRef& P : split_prime(Qm5, 3)) {
        long agree = 0;
        CHECK(le_is_one(embed_finite(Qm5, FieldElem{1, 0}, P, 10), agree));
    }
    CHECK_THROWS_AS(embed_finite(Q, FieldElem{0, 0}, split_prime(Q, 3)[0], 8), Error);
}

TEST_CASE("embedding is a ring homomorphism") {
    std::mt19937_64 rng(11);
    auto rand_elem = [&](const FieldDesc& F) {
        auto rq = [&]() {
            return mpq_class(static_cast<long>(rng() % 200) - 100, static_cast<long>(rng() % 40) + 1);
        };
        FieldElem e{rq(), F.rational ? mpq_class(0) : rq()};
        if (e.is_zero()) e.u = 1;
        return e;
    };
    for (const FieldDesc& F : {Q, Qm5, FieldDesc::quadratic(-1)}) {
        std::vector<PlaceRef> places;
        for (long p : {2L, 3L, 5L, 7L, 11L})
            for (const PlaceRef& P : split_prime(F, p)) places.push_back(P);
        for (int i = 0; i < 200; ++i) {
            FieldElem a = rand_elem(F), b = rand_elem(F);
            const PlaceRef& P = places[rng() % places.size()];
            auto ea = embed_finite(F, a, P, 24);
            auto eb = embed_finite(F, b, P, 24);
            long agree = 0;
            CHECK(le_known_equal(embed_finite(F, fe_mul(F, a, b), P, 24), le_mul(ea, eb), agree));
            FieldElem s = fe_add(a, b);
            if (!s.is_zero())
                CHECK(le_known_equal(embed_finite(F, s, P, 24), le_add(ea, eb), agree));
        }
    }
}

TEST_CASE("product formula (exact form)") {
    std::mt19937_64 rng(23);
    for (const FieldDesc& F : {Q, Qm5}) {
        for (int i = 0; i < 100; ++i) {
            FieldElem x{mpq_class(static_cast<long>(rng() % 100) + 1, static_cast<long>(rng() % 30) + 1),
                        F.rational ? mpq_class(0) : mpq_class(static_cast<long>(rng() % 20))};
            if (rng() % 2) x.u = -x.u;
            // prod over finite places of q_P^{-v_P(x)} = |N(x)| (arch part).
            mpq_class lhs = 1;
            FracIdeal I = principal_ideal(F, x);
            for (const auto& [k, e] : I.places) {
                PlaceRef P = place_by_key(F, k);
                mpq_class q(P.residue_size());
                for (long j = 0; j < std::abs(e); ++j) lhs *= (e > 0 ? 1 / q : q);
            }
            mpq_class prod = lhs * abs(fe_norm(F, x));
            prod.canonicalize();
            CHECK(prod == 1);
        }
    }
}

TEST_CASE("different exponents") {
    CHECK(different_exponent(split_prime(Q, 5)[0]) == 0);
    CHECK(different_exponent(split_prime(Qm5, 5)[0]) == 1);
    CHECK(different_exponent(split_prime(Qm5, 2)[0]) == 2);
    CHECK(different_exponent(split_prime(Qm5, 3)[0]) == 0);
    CHECK(different_exponent(split_prime(Qm5, 11)[0]) == 0);
    // d = 2: place above 2 is ramified with different exponent 3.
    FieldDesc F2 = FieldDesc::quadratic(2);
    CHECK(different_exponent(split_prime(F2, 2)[0]) == 3);
}

TEST_CASE("minkowski data") {
    // Z in Q
    MinkowskiData m0 = minkowski(Q, FracIdeal::one());
    CHECK(m0.covolume_squared == 1);

    // O of Q(sqrt(-5))
    MinkowskiData m1 = minkowski(Qm5, FracIdeal::one());
    CHECK(m1.covolume_squared == 5);

    // (2, 1 + sqrt(-5)): the prime above 2.
    FracIdeal P2;
    P2.places[PlaceKey{2, 0}] = 1;
    MinkowskiData m2 = minkowski(Qm5, P2);
    CHECK(m2.covolume_squared == 20);
    CHECK(ideal_norm(Qm5, P2) == 2);

    FracIdeal bad;
    bad.places[PlaceKey{3, 0}] = -1;
    CHECK_THROWS_AS(minkowski(Qm5, bad), Error);
}

TEST_CASE("covolume identity on random integral ideals") {
    std::mt19937_64 rng(5);
    std::vector<FieldDesc> fields = {Qm5, FieldDesc::quadratic(-1), FieldDesc::quadratic(-7), Q};
    for (int i = 0; i < 50; ++i) {
        const FieldDesc& F = fields[rng() % fields.size()];
        FracIdeal J;
        for (long p : {2L, 3L, 5L, 7L}) {
            if (rng() % 2) continue;
            auto places = split_prime(F, p);
            const PlaceRef& P = places[rng() % places.size()];
            J.places[key_of(P)] = static_cast<long>(rng() % 3) + 1;
        }
        MinkowskiData m = minkowski(F, J);
        mpq_class N = ideal_norm(F, J);
        mpq_class expect = mpq_class(abs(F.discriminant())) * N * N;
        for (int s = 0; s < F.complex_places(); ++s) expect /= 4;
        CHECK(m.covolume_squared == expect);
    }
}

TEST_CASE("ideal classes of Q(sqrt(-5))") {
    CHECK(ideal_class(Q, FracIdeal::one()).trivial());

    auto forms = reduced_forms(mpz_class(-20));
    CHECK(forms.size() == 2); // h = 2: x^2+5y^2 and 2x^2+2xy+3y^2

    FracIdeal P2;
    P2.places[PlaceKey{2, 0}] = 1;
    FormClass c = ideal_class(Qm5, P2);
    CHECK_FALSE(c.trivial());
    CHECK(c == FormClass{2, 2, 3});
    CHECK_THROWS_WITH_AS(principal_generator(Qm5, P2), doctest::Contains("(2,2,3)"), Error);

    // principal ideal (3) is trivial by construction
    FracIdeal I3 = principal_ideal(Qm5, FieldElem{3, 0});
    CHECK(ideal_class(Qm5, I3).trivial());
    FieldElem g = principal_generator(Qm5, I3);
    CHECK(abs(fe_norm(Qm5, g)) == 9);

    // P2^2 = (2) is principal
    FracIdeal P2sq = ideal_mul(P2, P2);
    CHECK(ideal_class(Qm5, P2sq).trivial());
    FieldElem g2 = principal_generator(Qm5, P2sq);
    CHECK(abs(fe_norm(Qm5, g2)) == 4);

    CHECK_THROWS_AS(ideal_class(FieldDesc::quadratic(5), FracIdeal::one()), Error);
}

TEST_CASE("principal generator respects nontrivial products") {
    // (6, 1 + sqrt(-5))-style: product of split primes above 2 and 3 is
    // principal iff classes cancel: P2 * P3 with matching indexes is (1+w) or (1-w).
    auto p3 = split_prime(Qm5, 3);
    FracIdeal J;
    J.places[PlaceKey{2, 0}] = 1;
    J.places[key_of(p3[0])] = 1;
    if (ideal_class(Qm5, J).trivial()) {
        FieldElem g = principal_generator(Qm5, J);
        CHECK(abs(fe_norm(Qm5, g)) == 6);
    } else {
        J.places.erase(key_of(p3[0]));
        J.places[key_of(p3[1])] = 1;
        CHECK(ideal_class(Qm5, J).trivial());
        FieldElem g = principal_generator(Qm5, J);
        CHECK(abs(fe_norm(Qm5, g)) == 6);
    }
}

TEST_CASE("principal_ideal valuations match embeddings") {
    FieldElem x = fe_parse(Qm5, "3/2+w");
    FracIdeal I = principal_ideal(Qm5, x);
    for (const auto& [k, e] : I.places) {
        PlaceRef P = place_by_key(Qm5, k);
        CHECK(global_valuation(Qm5, x, P) == e);
    }
    // norm of the ideal = |N(x)|
    CHECK(ideal_norm(Qm5, I) == abs(fe_norm(Qm5, x)));
}

TEST_CASE("oracle-style splitting cross-check") {
    for (long d : {-5L, -1L, -7L}) {
        FieldDesc F = FieldDesc::quadratic(d);
        for (mpz_class p = 3; p <= 97; ++p) {
            if (!is_prime(p) || mpz_class(d) % p == 0) continue;
            bool has_root = false;
            for (mpz_class x = 0; x < p; ++x)
                if (mod_pos(x * x - d, p) == 0) { has_root = true; break; }
            auto places = split_prime(F, p);
            CHECK(has_root == (places.size() == 2));
        }
    }
}
