#pragma once

#include <vector>

#include "numberfield.hpp"

namespace adelic {

// Dense matrices as rows of entries. Shapes are always rows x cols.
using FMat = std::vector<std::vector<FieldElem>>;
using LMat = std::vector<std::vector<LocalElement>>;
using ZMat = std::vector<std::vector<mpz_class>>;

inline int mrows(const FMat& m) { return static_cast<int>(m.size()); }
inline int mcols(const FMat& m) { return m.empty() ? 0 : static_cast<int>(m.front().size()); }
inline int mrows(const LMat& m) { return static_cast<int>(m.size()); }
inline int mcols(const LMat& m) { return m.empty() ? 0 : static_cast<int>(m.front().size()); }

FMat fm_identity(int n);
FMat fm_mul(const FieldDesc& F, const FMat& a, const FMat& b);
FieldElem fm_det(const FieldDesc& F, const FMat& a);
int fm_rank(const FieldDesc& F, FMat a);
// Basis of the right kernel (vectors of length cols).
std::vector<std::vector<FieldElem>> fm_kernel(const FieldDesc& F, FMat a);
FMat fm_transpose(const FMat& a);
bool fm_is_zero(const FMat& a);

LMat lm_identity(const PlaceRef& P, int n, long prec);
LMat lm_mul(const LMat& a, const LMat& b);
LMat lm_transpose(const LMat& a);
LocalElement lm_det(const LMat& a);
int lm_rank(LMat a);
LMat lm_inverse(const LMat& a);
bool lm_is_zero_to_precision(const LMat& a);

// Smith form over the valuation ring: U*A*V = diag(pi^c) with U, V in
// GL(O_P); entries of A may be non-integral (c can be negative).  V is
// tracked so kernels and lattice preimages come out saturated.
struct LocalSmith {
    std::vector<long> exponents; // ascending, one per nonzero divisor
    LMat right;                  // V (cols x cols)
    int rank = 0;
};
// cols_hint recovers the column count of matrices with zero rows.
LocalSmith lm_smith(const PlaceRef& P, LMat a, long prec, int cols_hint = -1);

// Saturated kernel basis: the last cols-rank columns of V.
LMat lm_kernel_basis(const PlaceRef& P, const LMat& a, long prec, int cols_hint = -1);

// Integer column HNF with unimodular transform: a * u has zero columns at
// the end exactly where the kernel lives.
struct ZHnf {
    ZMat h; // column-reduced copy of a (rows x cols)
    ZMat u; // cols x cols unimodular
    int rank = 0;
};
ZHnf z_column_hnf(ZMat a);
// Saturated basis of the integer kernel (vectors of length cols).
std::vector<std::vector<mpz_class>> z_kernel(const ZMat& a);
mpz_class z_lattice_index_det(const ZMat& gens); // |det| of the HNF of the column span

} // namespace adelic
