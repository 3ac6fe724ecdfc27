#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "adeles.hpp"

using namespace adelic;

namespace {

const FieldDesc Q = FieldDesc::make_rational();

LocalElement corr(const FieldDesc& F, long p, const mpq_class& value, long prec = 32) {
    return LocalElement::from_rat(split_prime(F, p)[0], value, prec);
}

mpq_class rnd_nonzero(std::mt19937_64& rng, long span = 60) {
    mpq_class q(static_cast<long>(rng() % span) - span / 2, static_cast<long>(rng() % 20) + 1);
    q.canonicalize();
    if (q == 0) q = 1;
    return q;
}

} // namespace

TEST_CASE("group law basics") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 50; ++i) {
        std::map<PlaceKey, LocalElement> exc;
        exc.emplace(PlaceKey{3, 0}, corr(Q, 3, rnd_nonzero(rng)));
        Idele a = idele_make(Q, FieldElem{rnd_nonzero(rng), 0}, exc, {ArchComp{false, rnd_nonzero(rng), 0}});
        Idele prod = idele_mul(a, idele_inv(a));
        CHECK(prod.g == FieldElem{1, 0});
        CHECK(prod.exceptions.empty());
        CHECK(prod.arch[0].is_one());
    }

    Idele two = idele_iota(Q, FieldElem{2, 0});
    Idele three = idele_iota(Q, FieldElem{3, 0});
    CHECK(idele_mul(two, three).g == FieldElem{6, 0});

    std::map<PlaceKey, LocalElement> exc;
    exc.emplace(PlaceKey{3, 0}, corr(Q, 3, 9));
    Idele withexc = idele_make(Q, FieldElem{1, 0}, exc, {});
    Idele nine = idele_iota(Q, FieldElem{9, 0});
    Idele m = idele_mul(withexc, nine);
    CHECK(m.g == FieldElem{9, 0});
    CHECK(m.exceptions.size() == 1);
}

TEST_CASE("canonicalize: correction at 3 forces q = 9") {
    std::map<PlaceKey, LocalElement> exc;
    exc.emplace(PlaceKey{3, 0}, corr(Q, 3, 9));
    Idele a = idele_make(Q, FieldElem{1, 0}, exc, {});
    CanonicalIdele c = canonicalize_idele(a);
    CHECK(c.q == FieldElem{9, 0});
    CHECK(c.unit.g == FieldElem{mpq_class(1, 9), 0});
    CHECK_FALSE(is_principal(a));
    // All finite components of the unit part have valuation 0.
    CHECK(idele_valuation(c.unit, split_prime(Q, 3)[0]) == 0);
}

TEST_CASE("canonicalize: diagonal ideles are exact sections") {
    CanonicalIdele c = canonicalize_idele(idele_iota(Q, FieldElem{mpq_class(-3, 4), 0}));
    CHECK(c.q == FieldElem{mpq_class(-3, 4), 0});
    CHECK(is_principal(idele_iota(Q, FieldElem{mpq_class(-3, 4), 0})));

    CanonicalIdele id = canonicalize_idele(idele_identity(Q));
    CHECK(id.q == FieldElem{1, 0});
    CHECK(is_principal(idele_identity(Q)));
}

TEST_CASE("is_principal worked examples") {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 100; ++i) {
        FieldElem q{rnd_nonzero(rng), 0};
        CHECK(is_principal(idele_iota(Q, q)));
    }

    std::map<PlaceKey, LocalElement> exc;
    exc.emplace(PlaceKey{2, 0}, corr(Q, 2, 2));
    CHECK_FALSE(is_principal(idele_make(Q, FieldElem{1, 0}, exc, {})));

    // (g=1, e2=-1, arch=-1): component -1 at 2 and the real place, +1 at all
    // other finite places; no rational q matches all components, so the
    // class is nontrivial.
    std::map<PlaceKey, LocalElement> exc2;
    exc2.emplace(PlaceKey{2, 0}, corr(Q, 2, -1));
    Idele mixed = idele_make(Q, FieldElem{1, 0}, exc2, {ArchComp{false, -1, 0}});
    CHECK_FALSE(is_principal(mixed));
    // ... while the honest diagonal iota(-1) is principal.
    CHECK(is_principal(idele_iota(Q, FieldElem{-1, 0})));
}

TEST_CASE("insufficient precision on near-1 comparisons is an error") {
    std::map<PlaceKey, LocalElement> exc;
    exc.emplace(PlaceKey{5, 0}, LocalElement::from_rat(split_prime(Q, 5)[0], 1 + mpq_class(3125), 4));
    // correction = 1 + 5^5 known to 4 digits: equal to 1 at precision 4 < 8.
    Idele a = idele_make(Q, FieldElem{1, 0}, exc, {});
    CHECK_THROWS_AS(is_principal(a), Error);
}

TEST_CASE("class_equal is an equivalence relation") {
    std::mt19937_64 rng(29);
    auto random_idele = [&]() {
        std::map<PlaceKey, LocalElement> exc;
        for (long p : {2L, 3L, 5L}) {
            if (rng() % 2) continue;
            exc.emplace(PlaceKey{p, 0}, corr(Q, p, rnd_nonzero(rng)));
        }
        return idele_make(Q, FieldElem{rnd_nonzero(rng), 0}, std::move(exc),
                          {ArchComp{false, rnd_nonzero(rng), 0}});
    };
    int transitive_hits = 0;
    for (int i = 0; i < 500; ++i) {
        Idele a = random_idele(), b = random_idele(), c = random_idele();
        CHECK(class_equal(a, a));
        bool ab = class_equal(a, b), ba = class_equal(b, a);
        CHECK(ab == ba);
        if (ab && class_equal(b, c)) {
            CHECK(class_equal(a, c));
            ++transitive_hits;
        }
        // Forced transitive instance: translate a by principal ideles.
        Idele a2 = idele_mul(a, idele_iota(Q, FieldElem{rnd_nonzero(rng), 0}));
        Idele a3 = idele_mul(a2, idele_iota(Q, FieldElem{rnd_nonzero(rng), 0}));
        CHECK(class_equal(a, a2));
        CHECK(class_equal(a2, a3));
        CHECK(class_equal(a, a3));
    }
    CHECK(transitive_hits >= 0);
}

TEST_CASE("kernel characterization") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 100; ++i) {
        std::map<PlaceKey, LocalElement> exc;
        if (rng() % 2) exc.emplace(PlaceKey{7, 0}, corr(Q, 7, rnd_nonzero(rng)));
        Idele a = idele_make(Q, FieldElem{rnd_nonzero(rng), 0}, std::move(exc), {});
        CHECK(is_principal(a) == class_equal(a, idele_identity(Q)));
    }
}

TEST_CASE("translation invariance") {
    std::map<PlaceKey, LocalElement> exc;
    exc.emplace(PlaceKey{2, 0}, corr(Q, 2, 7));
    Idele a = idele_make(Q, FieldElem{3, 0}, exc, {});
    Idele b = idele_mul(a, idele_iota(Q, FieldElem{7, 0}));
    CHECK(class_equal(a, b));
    CHECK(class_equal(a, a));
    CHECK_FALSE(class_equal(idele_identity(Q), idele_make(Q, FieldElem{1, 0},
        [] { std::map<PlaceKey, LocalElement> m; m.emplace(PlaceKey{2, 0},
             LocalElement::from_rat(PlaceRef::finite(FieldDesc::make_rational(), 2, 1, 1), 2, 32)); return m; }(), {})));
}

TEST_CASE("unit support is the computed finite set") {
    std::map<PlaceKey, LocalElement> exc;
    exc.emplace(PlaceKey{7, 0}, corr(Q, 7, mpq_class(3, 2)));
    Idele a = idele_make(Q, FieldElem{mpq_class(10, 3), 0}, exc, {});
    auto supp = idele_unit_support(a);
    // exception support {7} plus primes of 10/3 = {2, 3, 5}
    REQUIRE(supp.size() == 4);
    CHECK(supp[0].p == 2);
    CHECK(supp[1].p == 3);
    CHECK(supp[2].p == 5);
    CHECK(supp[3].p == 7);
    // Outside, components are units: check a couple.
    for (long p : {11L, 13L, 97L})
        CHECK(idele_valuation(a, split_prime(Q, p)[0]) == 0);
}

TEST_CASE("imaginary quadratic canonicalization") {
    FieldDesc F = FieldDesc::quadratic(-5);

    // Diagonal ideles are principal and sections are exact.
    FieldElem x = fe_parse(F, "2+w");
    CanonicalIdele c = canonicalize_idele(idele_iota(F, x));
    CHECK(c.q == x);
    CHECK(is_principal(idele_iota(F, x)));

    // A correction of valuation 1 at the ramified place above 5: the finite
    // part is the ramified prime, which has norm 5 and trivial class (it is
    // (sqrt(-5))), so canonicalization succeeds.
    PlaceRef P5 = split_prime(F, 5)[0];
    std::map<PlaceKey, LocalElement> exc;
    exc.emplace(key_of(P5), LocalElement::uniformizer(P5, 24));
    Idele a = idele_make(F, FieldElem{1, 0}, exc, {});
    CanonicalIdele c5 = canonicalize_idele(a);
    CHECK(abs(fe_norm(F, c5.q)) == 5);
    CHECK_FALSE(is_principal(a)); // off-support components are 1/q != 1

    // Correction at the class-2 prime above 2: not principal.
    PlaceRef P2 = split_prime(F, 2)[0];
    std::map<PlaceKey, LocalElement> exc2;
    exc2.emplace(key_of(P2), LocalElement::uniformizer(P2, 24));
    Idele b = idele_make(F, FieldElem{1, 0}, exc2, {});
    CHECK_THROWS_WITH_AS(canonicalize_idele(b), doctest::Contains("NonPrincipalFinitePart"), Error);

    // Units of O only shift q, never the class.
    for (const FieldElem& u : torsion_units(F)) CHECK(is_principal(idele_iota(F, u)));
}

TEST_CASE("real quadratic fields are rejected") {
    FieldDesc F = FieldDesc::quadratic(5);
    CHECK_THROWS_AS(canonicalize_idele(idele_iota(F, FieldElem{2, 0})), Error);
}

TEST_CASE("adele addition keeps finite integral support") {
    Adele a = adele_make(Q, FieldElem{mpq_class(1, 6), 0}, {}, {});
    Adele b = adele_neg(a);
    Adele s = adele_add(a, b);
    CHECK(s.t == FieldElem{0, 0});
    CHECK(adele_integral_support(s).empty());
    auto supp = adele_integral_support(a);
    REQUIRE(supp.size() == 2); // 2 and 3
    CHECK(supp[0].p == 2);
    CHECK(supp[1].p == 3);
}
