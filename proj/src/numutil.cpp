#include "numutil.hpp"

namespace adelic {

bool is_prime(const mpz_class& n) {
    if (n < 2) return false;
    return mpz_probab_prime_p(n.get_mpz_t(), 32) != 0;
}

long valuation_int(const mpz_class& n, const mpz_class& p, mpz_class& cofactor) {
    if (n == 0) fail(Errc::ZeroElement, "valuation of zero");
    cofactor = n;
    long v = 0;
    mpz_class q, r;
    for (;;) {
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), cofactor.get_mpz_t(), p.get_mpz_t());
        if (r != 0) break;
        cofactor = q;
        ++v;
    }
    return v;
}

long valuation_int(const mpz_class& n, const mpz_class& p) {
    mpz_class c;
    return valuation_int(n, p, c);
}

long valuation_rat(const mpq_class& x, const mpz_class& p) {
    if (x == 0) fail(Errc::ZeroElement, "valuation of zero");
    return valuation_int(x.get_num(), p) - valuation_int(x.get_den(), p);
}

mpz_class pow_int(const mpz_class& base, unsigned long e) {
    mpz_class r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

mpz_class powmod(const mpz_class& base, const mpz_class& e, const mpz_class& mod) {
    mpz_class r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), e.get_mpz_t(), mod.get_mpz_t());
    return r;
}

mpz_class invmod(const mpz_class& a, const mpz_class& m) {
    mpz_class r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
        fail(Errc::NotInvertible, "no inverse mod " + m.get_str());
    return r;
}

mpz_class mod_pos(const mpz_class& a, const mpz_class& m) {
    mpz_class r;
    mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
    return r;
}

int kronecker(const mpz_class& a, const mpz_class& n) {
    return mpz_kronecker(a.get_mpz_t(), n.get_mpz_t());
}

std::map<mpz_class, long> factor(const mpz_class& n) {
    if (n == 0) fail(Errc::ZeroElement, "factor(0)");
    std::map<mpz_class, long> out;
    mpz_class m = abs(n);
    for (mpz_class p = 2; p * p <= m; p += (p == 2 ? 1 : 2)) {
        if (m % p == 0) out[p] = valuation_int(m, p, m);
        if (p > 2000000) break;
    }
    if (m > 1) {
        if (!is_prime(m))
            fail(Errc::BudgetExceeded, "composite cofactor beyond trial bound: " + m.get_str());
        out[m] += 1;
    }
    return out;
}

mpz_class smallest_quadratic_nonresidue(const mpz_class& p) {
    for (mpz_class a = 2; a < p; ++a)
        if (kronecker(a, p) == -1) return a;
    fail(Errc::UnsupportedPlace, "no non-residue mod " + p.get_str());
}

mpz_class smallest_primitive_root(const mpz_class& p) {
    mpz_class order = p - 1;
    auto fac = factor(order);
    for (mpz_class g = 2; g < p; ++g) {
        bool primitive = true;
        for (const auto& [q, e] : fac) {
            (void)e;
            if (powmod(g, order / q, p) == 1) { primitive = false; break; }
        }
        if (primitive) return g;
    }
    fail(Errc::UnsupportedPlace, "no primitive root mod " + p.get_str());
}

mpz_class multiplicative_order(const mpz_class& a, const mpz_class& m, const mpz_class& group_order) {
    mpz_class ord = group_order;
    for (const auto& [q, e] : factor(group_order)) {
        (void)e;
        while (ord % q == 0 && powmod(a, ord / q, m) == 1) ord /= q;
    }
    return ord;
}

mpq_class parse_rational(const std::string& s) {
    mpq_class q;
    if (s.empty() || q.set_str(s, 10) != 0)
        fail(Errc::ParseError, "bad rational literal '" + s + "'");
    q.canonicalize();
    return q;
}

std::string rational_str(const mpq_class& q) {
    return q.get_str();
}

uint64_t fnv1a64(const std::string& data) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace adelic
