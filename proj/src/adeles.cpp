#include "adeles.hpp"

#include <algorithm>

namespace adelic {

namespace {

std::vector<ArchComp> default_arch(const FieldDesc& F) {
    std::vector<ArchComp> out;
    for (int i = 0; i < F.real_places(); ++i) out.push_back(ArchComp{false, 1, 0});
    for (int i = 0; i < F.complex_places(); ++i) out.push_back(ArchComp{true, 1, 0});
    return out;
}

void check_field(const Idele& a, const Idele& b) {
    if (a.field != b.field) fail(Errc::FieldMismatch, "ideles over different fields");
}

// Drop corrections indistinguishable from 1 at full stored precision; only
// confidently-equal values (>= 8 digits) are removed.
void cleanup(Idele& a) {
    for (auto it = a.exceptions.begin(); it != a.exceptions.end();) {
        long agree = 0;
        if (le_is_one(it->second, agree) && agree >= 8) it = a.exceptions.erase(it);
        else ++it;
    }
}

} // namespace

ArchComp arch_mul(const ArchComp& a, const ArchComp& b) {
    if (a.is_complex != b.is_complex) fail(Errc::ShapeMismatch, "mixed archimedean kinds");
    if (!a.is_complex) return ArchComp{false, a.re * b.re, 0};
    return ArchComp{true, a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

ArchComp arch_inv(const ArchComp& a) {
    if (a.is_zero()) fail(Errc::ZeroElement, "archimedean component must be nonzero");
    if (!a.is_complex) return ArchComp{false, 1 / a.re, 0};
    mpq_class n = a.re * a.re + a.im * a.im;
    return ArchComp{true, a.re / n, -a.im / n};
}

Idele idele_identity(const FieldDesc& F) {
    Idele a;
    a.field = F;
    a.g = FieldElem{1, 0};
    a.arch = default_arch(F);
    return a;
}

Idele idele_iota(const FieldDesc& F, const FieldElem& q) {
    if (q.is_zero()) fail(Errc::ZeroElement, "iota of zero");
    Idele a = idele_identity(F);
    a.g = q;
    return a;
}

Idele idele_make(const FieldDesc& F, const FieldElem& g,
                 std::map<PlaceKey, LocalElement> exceptions,
                 std::vector<ArchComp> arch) {
    if (g.is_zero()) fail(Errc::ZeroElement, "global scalar must be nonzero");
    Idele a;
    a.field = F;
    a.g = g;
    a.exceptions = std::move(exceptions);
    for (const auto& [k, e] : a.exceptions) {
        if (e.place().field != F) fail(Errc::FieldMismatch, "exception at a place of another field");
        if (e.is_zero_to_precision()) fail(Errc::ZeroElement, "idele correction must be nonzero");
    }
    if (arch.empty()) arch = default_arch(F);
    if (static_cast<int>(arch.size()) != F.arch_place_count())
        fail(Errc::ShapeMismatch, "wrong number of archimedean components");
    for (ArchComp& c : arch) {
        c.re.canonicalize();
        c.im.canonicalize();
        if (c.is_zero()) fail(Errc::ZeroElement, "archimedean component must be nonzero");
    }
    a.arch = std::move(arch);
    cleanup(a);
    return a;
}

Idele idele_mul(const Idele& a, const Idele& b) {
    check_field(a, b);
    Idele out;
    out.field = a.field;
    out.g = fe_mul(a.field, a.g, b.g);
    if (out.g.is_zero()) fail(Errc::ZeroElement, "product scalar is zero");
    out.exceptions = a.exceptions;
    for (const auto& [k, e] : b.exceptions) {
        auto it = out.exceptions.find(k);
        if (it == out.exceptions.end()) out.exceptions.emplace(k, e);
        else it->second = le_mul(it->second, e);
    }
    out.arch.reserve(a.arch.size());
    for (size_t i = 0; i < a.arch.size(); ++i) out.arch.push_back(arch_mul(a.arch[i], b.arch[i]));
    cleanup(out);
    return out;
}

Idele idele_inv(const Idele& a) {
    Idele out;
    out.field = a.field;
    out.g = fe_inv(a.field, a.g);
    for (const auto& [k, e] : a.exceptions) out.exceptions.emplace(k, le_inv(e));
    for (const ArchComp& c : a.arch) out.arch.push_back(arch_inv(c));
    return out;
}

long idele_valuation(const Idele& a, const PlaceRef& P) {
    long v = global_valuation(a.field, a.g, P);
    auto it = a.exceptions.find(key_of(P));
    if (it != a.exceptions.end()) v += it->second.valuation();
    return v;
}

std::vector<PlaceKey> idele_unit_support(const Idele& a) {
    std::map<PlaceKey, bool> keys;
    for (const auto& [k, e] : a.exceptions) keys[k] = true;
    for (const auto& [k, e] : principal_ideal(a.field, a.g).places) keys[k] = true;
    std::vector<PlaceKey> out;
    for (const auto& [k, unused] : keys) out.push_back(k);
    return out;
}

namespace {

// Deterministic associate: lexicographically least coordinate pair among
// unit multiples.
FieldElem canonical_associate(const FieldDesc& F, const FieldElem& x) {
    FieldElem best = x;
    bool first = true;
    for (const FieldElem& u : torsion_units(F)) {
        FieldElem cand = fe_mul(F, x, u);
        if (first || cand.u < best.u || (cand.u == best.u && cand.v < best.v)) {
            best = cand;
            first = false;
        }
    }
    return best;
}

bool is_torsion_unit(const FieldDesc& F, const FieldElem& x) {
    for (const FieldElem& u : torsion_units(F))
        if (x == u) return true;
    return false;
}

} // namespace

CanonicalIdele canonicalize_idele(const Idele& a) {
    const FieldDesc& F = a.field;
    if (!F.rational && F.d > 0)
        fail(Errc::UnsupportedField, "canonicalization needs Q or an imaginary quadratic field");

    FracIdeal I;
    for (const PlaceKey& k : idele_unit_support(a)) {
        long v = idele_valuation(a, place_by_key(F, k));
        if (v != 0) I.places[k] = v;
    }

    FieldElem q;
    if (F.rational) {
        mpq_class qv = 1;
        for (const auto& [k, e] : I.places)
            for (long i = 0; i < std::abs(e); ++i) qv *= (e > 0 ? mpq_class(k.p) : 1 / mpq_class(k.p));
        // Match the real sign of the full component g * arch.
        if (sgn(a.g.u) * sgn(a.arch.at(0).re) < 0) qv = -qv;
        q = FieldElem{qv, 0};
    } else {
        q = principal_generator(F, I);
        q = canonical_associate(F, q);
    }

    Idele unit;
    unit.field = F;
    unit.g = fe_div(F, a.g, q);
    unit.exceptions = a.exceptions;
    unit.arch = a.arch;

    if (!F.rational) {
        // Absorb a torsion-unit discrepancy so iota stays an exact section.
        if (is_torsion_unit(F, unit.g)) {
            q = fe_mul(F, q, unit.g);
            unit.g = FieldElem{1, 0};
        }
    }
    Idele cleanup_unit = idele_make(F, unit.g, unit.exceptions, unit.arch);
    return CanonicalIdele{q, cleanup_unit};
}

bool is_principal(const Idele& a) {
    CanonicalIdele c = canonicalize_idele(a);
    if (c.unit.g != FieldElem{1, 0}) return false;
    for (const ArchComp& ac : c.unit.arch)
        if (!ac.is_one()) return false;
    for (const auto& [k, e] : c.unit.exceptions) {
        long agree = 0;
        bool eq = le_is_one(e, agree);
        if (!eq) return false;
        if (agree < 8)
            fail(Errc::InsufficientPrecision,
                 "component equals 1 only to " + std::to_string(agree) + " digits");
    }
    return true;
}

bool class_equal(const Idele& a, const Idele& b) {
    check_field(a, b);
    return is_principal(idele_mul(a, idele_inv(b)));
}

Adele adele_make(const FieldDesc& F, const FieldElem& t,
                 std::map<PlaceKey, LocalElement> exceptions,
                 std::vector<ArchAdd> arch) {
    Adele a;
    a.field = F;
    a.t = t;
    a.exceptions = std::move(exceptions);
    for (auto it = a.exceptions.begin(); it != a.exceptions.end();) {
        if (it->second.is_zero_to_precision()) it = a.exceptions.erase(it);
        else ++it;
    }
    if (arch.empty()) {
        for (int i = 0; i < F.real_places(); ++i) arch.push_back(ArchAdd{false, 0, 0});
        for (int i = 0; i < F.complex_places(); ++i) arch.push_back(ArchAdd{true, 0, 0});
    }
    if (static_cast<int>(arch.size()) != F.arch_place_count())
        fail(Errc::ShapeMismatch, "wrong number of archimedean components");
    a.arch = std::move(arch);
    return a;
}

Adele adele_add(const Adele& a, const Adele& b) {
    if (a.field != b.field) fail(Errc::FieldMismatch, "adeles over different fields");
    std::map<PlaceKey, LocalElement> exc = a.exceptions;
    for (const auto& [k, e] : b.exceptions) {
        auto it = exc.find(k);
        if (it == exc.end()) exc.emplace(k, e);
        else it->second = le_add(it->second, e);
    }
    std::vector<ArchAdd> arch;
    for (size_t i = 0; i < a.arch.size(); ++i)
        arch.push_back(ArchAdd{a.arch[i].is_complex, a.arch[i].re + b.arch[i].re, a.arch[i].im + b.arch[i].im});
    return adele_make(a.field, fe_add(a.t, b.t), std::move(exc), std::move(arch));
}

Adele adele_neg(const Adele& a) {
    std::map<PlaceKey, LocalElement> exc;
    for (const auto& [k, e] : a.exceptions) exc.emplace(k, le_neg(e));
    std::vector<ArchAdd> arch;
    for (const ArchAdd& c : a.arch) arch.push_back(ArchAdd{c.is_complex, -c.re, -c.im});
    return adele_make(a.field, fe_neg(a.t), std::move(exc), std::move(arch));
}

std::vector<PlaceKey> adele_integral_support(const Adele& a) {
    std::map<PlaceKey, bool> keys;
    for (const auto& [k, e] : a.exceptions) keys[k] = true;
    if (!a.t.is_zero())
        for (const auto& [k, e] : principal_ideal(a.field, a.t).places)
            if (e < 0) keys[k] = true;
    std::vector<PlaceKey> out;
    for (const auto& [k, unused] : keys) out.push_back(k);
    return out;
}

} // namespace adelic
