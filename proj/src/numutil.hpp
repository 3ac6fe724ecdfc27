#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "error.hpp"

namespace adelic {

bool is_prime(const mpz_class& n);

// p-adic valuation of a nonzero integer; also returns the cofactor n / p^v.
long valuation_int(const mpz_class& n, const mpz_class& p, mpz_class& cofactor);
long valuation_int(const mpz_class& n, const mpz_class& p);

// v_p of a nonzero rational.
long valuation_rat(const mpq_class& x, const mpz_class& p);

mpz_class pow_int(const mpz_class& base, unsigned long e);
mpz_class powmod(const mpz_class& base, const mpz_class& e, const mpz_class& mod);

// Inverse of a mod m; requires gcd(a, m) = 1.
mpz_class invmod(const mpz_class& a, const mpz_class& m);

// Canonical representative in [0, m).
mpz_class mod_pos(const mpz_class& a, const mpz_class& m);

// Legendre/Kronecker symbol (a / n).
int kronecker(const mpz_class& a, const mpz_class& n);

// Trial-division factorization; throws if a factor beyond the trial bound
// remains composite.  Inputs in this artifact stay test-scale.
std::map<mpz_class, long> factor(const mpz_class& n);

mpz_class smallest_quadratic_nonresidue(const mpz_class& p);
mpz_class smallest_primitive_root(const mpz_class& p);

// Multiplicative order of a mod m given the factorization of the group order.
mpz_class multiplicative_order(const mpz_class& a, const mpz_class& m, const mpz_class& group_order);

mpq_class parse_rational(const std::string& s);
std::string rational_str(const mpq_class& q);

uint64_t fnv1a64(const std::string& data);

} // namespace adelic
