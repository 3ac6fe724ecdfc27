#include "matrix.hpp"

#include <algorithm>

namespace adelic {

FMat fm_identity(int n) {
    FMat m(n, std::vector<FieldElem>(n, FieldElem{0, 0}));
    for (int i = 0; i < n; ++i) m[i][i] = FieldElem{1, 0};
    return m;
}

FMat fm_mul(const FieldDesc& F, const FMat& a, const FMat& b) {
    if (a.empty()) return {};
    if (mcols(a) != mrows(b)) fail(Errc::ShapeMismatch, "matrix product shape mismatch");
    FMat out(mrows(a), std::vector<FieldElem>(mcols(b), FieldElem{0, 0}));
    for (int i = 0; i < mrows(a); ++i)
        for (int k = 0; k < mcols(a); ++k) {
            if (a[i][k].is_zero()) continue;
            for (int j = 0; j < mcols(b); ++j)
                out[i][j] = fe_add(out[i][j], fe_mul(F, a[i][k], b[k][j]));
        }
    return out;
}

FMat fm_transpose(const FMat& a) {
    FMat out(mcols(a), std::vector<FieldElem>(mrows(a), FieldElem{0, 0}));
    for (int i = 0; i < mrows(a); ++i)
        for (int j = 0; j < mcols(a); ++j) out[j][i] = a[i][j];
    return out;
}

bool fm_is_zero(const FMat& a) {
    for (const auto& row : a)
        for (const FieldElem& x : row)
            if (!x.is_zero()) return false;
    return true;
}

namespace {

// Row echelon over the field; returns pivot columns.
std::vector<int> fm_echelon(const FieldDesc& F, FMat& a) {
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < mcols(a) && r < mrows(a); ++c) {
        int pr = -1;
        for (int i = r; i < mrows(a); ++i)
            if (!a[i][c].is_zero()) { pr = i; break; }
        if (pr < 0) continue;
        std::swap(a[r], a[pr]);
        FieldElem inv = fe_inv(F, a[r][c]);
        for (int j = c; j < mcols(a); ++j) a[r][j] = fe_mul(F, a[r][j], inv);
        for (int i = 0; i < mrows(a); ++i) {
            if (i == r || a[i][c].is_zero()) continue;
            FieldElem factor = a[i][c];
            for (int j = c; j < mcols(a); ++j)
                a[i][j] = fe_sub(a[i][j], fe_mul(F, factor, a[r][j]));
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

} // namespace

FieldElem fm_det(const FieldDesc& F, const FMat& a) {
    int n = mrows(a);
    if (n != mcols(a)) fail(Errc::ShapeMismatch, "determinant of a non-square matrix");
    FMat m = a;
    FieldElem det{1, 0};
    for (int c = 0; c < n; ++c) {
        int pr = -1;
        for (int i = c; i < n; ++i)
            if (!m[i][c].is_zero()) { pr = i; break; }
        if (pr < 0) return FieldElem{0, 0};
        if (pr != c) { std::swap(m[pr], m[c]); det = fe_neg(det); }
        det = fe_mul(F, det, m[c][c]);
        FieldElem inv = fe_inv(F, m[c][c]);
        for (int i = c + 1; i < n; ++i) {
            if (m[i][c].is_zero()) continue;
            FieldElem factor = fe_mul(F, m[i][c], inv);
            for (int j = c; j < n; ++j) m[i][j] = fe_sub(m[i][j], fe_mul(F, factor, m[c][j]));
        }
    }
    return det;
}

int fm_rank(const FieldDesc& F, FMat a) {
    return static_cast<int>(fm_echelon(F, a).size());
}

std::vector<std::vector<FieldElem>> fm_kernel(const FieldDesc& F, FMat a) {
    int n = mcols(a);
    std::vector<int> pivots = fm_echelon(F, a);
    std::vector<bool> is_pivot(n, false);
    for (int c : pivots) is_pivot[c] = true;
    std::vector<std::vector<FieldElem>> basis;
    for (int c = 0; c < n; ++c) {
        if (is_pivot[c]) continue;
        std::vector<FieldElem> v(n, FieldElem{0, 0});
        v[c] = FieldElem{1, 0};
        for (size_t r = 0; r < pivots.size(); ++r)
            v[pivots[r]] = fe_neg(a[r][c]);
        basis.push_back(std::move(v));
    }
    return basis;
}

LMat lm_identity(const PlaceRef& P, int n, long prec) {
    LMat m(n, std::vector<LocalElement>(n, LocalElement::zero(P)));
    for (int i = 0; i < n; ++i) m[i][i] = LocalElement::one(P, prec);
    return m;
}

LMat lm_mul(const LMat& a, const LMat& b) {
    if (a.empty()) return {};
    if (mcols(a) != mrows(b)) fail(Errc::ShapeMismatch, "matrix product shape mismatch");
    if (b.empty() || b.front().empty()) return LMat(mrows(a));
    const PlaceRef& P = b.front().front().place();
    LMat out(mrows(a), std::vector<LocalElement>(mcols(b), LocalElement::zero(P)));
    for (int i = 0; i < mrows(a); ++i)
        for (int k = 0; k < mcols(a); ++k) {
            if (a[i][k].is_zero_to_precision()) continue;
            for (int j = 0; j < mcols(b); ++j)
                out[i][j] = le_add(out[i][j], le_mul(a[i][k], b[k][j]));
        }
    return out;
}

LMat lm_transpose(const LMat& a) {
    if (a.empty()) return a;
    LMat out(mcols(a), std::vector<LocalElement>(mrows(a), a.front().front()));
    for (int i = 0; i < mrows(a); ++i)
        for (int j = 0; j < mcols(a); ++j) out[j][i] = a[i][j];
    return out;
}

namespace {

// Pivot with minimal valuation in rows >= r, cols >= c; -1 if all zero.
std::pair<int, int> lm_min_pivot(const LMat& m, int r0, int c0) {
    int br = -1, bc = -1;
    long bv = 0;
    for (int i = r0; i < mrows(m); ++i)
        for (int j = c0; j < mcols(m); ++j) {
            if (m[i][j].is_zero_to_precision()) continue;
            long v = m[i][j].valuation();
            if (br < 0 || v < bv) { br = i; bc = j; bv = v; }
        }
    return {br, bc};
}

} // namespace

LocalElement lm_det(const LMat& a) {
    int n = mrows(a);
    if (n != mcols(a)) fail(Errc::ShapeMismatch, "determinant of a non-square matrix");
    if (n == 0) fail(Errc::ShapeMismatch, "determinant of an empty matrix");
    const PlaceRef& P = a.front().front().place();
    LMat m = a;
    bool neg = false;
    LocalElement det = LocalElement::one(P, kPrecMax);
    for (int c = 0; c < n; ++c) {
        int pr = -1;
        long bv = 0;
        for (int i = c; i < n; ++i) {
            if (m[i][c].is_zero_to_precision()) continue;
            long v = m[i][c].valuation();
            if (pr < 0 || v < bv) { pr = i; bv = v; }
        }
        if (pr < 0) fail(Errc::SingularToPrecision, "matrix is singular to working precision");
        if (pr != c) { std::swap(m[pr], m[c]); neg = !neg; }
        det = le_mul(det, m[c][c]);
        LocalElement inv = le_inv(m[c][c]);
        for (int i = c + 1; i < n; ++i) {
            if (m[i][c].is_zero_to_precision()) continue;
            LocalElement factor = le_mul(m[i][c], inv);
            for (int j = c; j < n; ++j) m[i][j] = le_sub(m[i][j], le_mul(factor, m[c][j]));
        }
    }
    return neg ? le_neg(det) : det;
}

int lm_rank(LMat m) {
    int r = 0;
    for (int c = 0; c < mcols(m) && r < mrows(m); ++c) {
        int pr = -1;
        long bv = 0;
        for (int i = r; i < mrows(m); ++i) {
            if (m[i][c].is_zero_to_precision()) continue;
            long v = m[i][c].valuation();
            if (pr < 0 || v < bv) { pr = i; bv = v; }
        }
        if (pr < 0) continue;
        std::swap(m[pr], m[r]);
        LocalElement inv = le_inv(m[r][c]);
        for (int i = r + 1; i < mrows(m); ++i) {
            if (m[i][c].is_zero_to_precision()) continue;
            LocalElement factor = le_mul(m[i][c], inv);
            for (int j = c; j < mcols(m); ++j) m[i][j] = le_sub(m[i][j], le_mul(factor, m[r][j]));
        }
        ++r;
    }
    return r;
}

LMat lm_inverse(const LMat& a) {
    int n = mrows(a);
    if (n != mcols(a) || n == 0) fail(Errc::ShapeMismatch, "inverse of a non-square matrix");
    const PlaceRef& P = a.front().front().place();
    long prec = kPrecMax;
    for (const auto& row : a)
        for (const LocalElement& x : row)
            if (!x.is_zero_to_precision()) prec = std::min(prec, x.precision());
    LMat m = a;
    LMat inv = lm_identity(P, n, prec);
    for (int c = 0; c < n; ++c) {
        int pr = -1;
        long bv = 0;
        for (int i = c; i < n; ++i) {
            if (m[i][c].is_zero_to_precision()) continue;
            long v = m[i][c].valuation();
            if (pr < 0 || v < bv) { pr = i; bv = v; }
        }
        if (pr < 0) fail(Errc::SingularToPrecision, "matrix is singular to working precision");
        if (pr != c) { std::swap(m[pr], m[c]); std::swap(inv[pr], inv[c]); }
        LocalElement pinv = le_inv(m[c][c]);
        for (int j = 0; j < n; ++j) {
            m[c][j] = le_mul(m[c][j], pinv);
            inv[c][j] = le_mul(inv[c][j], pinv);
        }
        for (int i = 0; i < n; ++i) {
            if (i == c || m[i][c].is_zero_to_precision()) continue;
            LocalElement factor = m[i][c];
            for (int j = 0; j < n; ++j) {
                m[i][j] = le_sub(m[i][j], le_mul(factor, m[c][j]));
                inv[i][j] = le_sub(inv[i][j], le_mul(factor, inv[c][j]));
            }
        }
    }
    return inv;
}

bool lm_is_zero_to_precision(const LMat& a) {
    for (const auto& row : a)
        for (const LocalElement& x : row)
            if (!x.is_zero_to_precision()) return false;
    return true;
}

LocalSmith lm_smith(const PlaceRef& P, LMat a, long prec, int cols_hint) {
    LocalSmith out;
    int rows = mrows(a), cols = rows == 0 ? std::max(cols_hint, 0) : mcols(a);
    out.right = lm_identity(P, cols, prec);
    int k = 0;
    while (k < rows && k < cols) {
        auto [pr, pc] = lm_min_pivot(a, k, k);
        if (pr < 0) break;
        if (pr != k) std::swap(a[pr], a[k]);
        if (pc != k) {
            for (int i = 0; i < rows; ++i) std::swap(a[i][pc], a[i][k]);
            for (int i = 0; i < cols; ++i) std::swap(out.right[i][pc], out.right[i][k]);
        }
        long c = a[k][k].valuation();
        // Scale the pivot column by the unit part inverse so the pivot is pi^c.
        LocalElement u = le_mul(a[k][k], le_pow(LocalElement::uniformizer(P, prec), -c));
        LocalElement uinv = le_inv(u);
        for (int i = 0; i < rows; ++i) a[i][k] = le_mul(a[i][k], uinv);
        for (int i = 0; i < cols; ++i) out.right[i][k] = le_mul(out.right[i][k], uinv);
        LocalElement pivot_inv = le_inv(a[k][k]);
        // Clear the pivot row (column ops, mirrored into V).
        for (int j = 0; j < cols; ++j) {
            if (j == k || a[k][j].is_zero_to_precision()) continue;
            LocalElement q = le_mul(a[k][j], pivot_inv);
            for (int i = 0; i < rows; ++i) a[i][j] = le_sub(a[i][j], le_mul(q, a[i][k]));
            for (int i = 0; i < cols; ++i)
                out.right[i][j] = le_sub(out.right[i][j], le_mul(q, out.right[i][k]));
        }
        // Clear the pivot column (row ops, untracked).
        for (int i = 0; i < rows; ++i) {
            if (i == k || a[i][k].is_zero_to_precision()) continue;
            LocalElement q = le_mul(a[i][k], pivot_inv);
            for (int j = 0; j < cols; ++j) a[i][j] = le_sub(a[i][j], le_mul(q, a[k][j]));
        }
        out.exponents.push_back(c);
        ++k;
    }
    out.rank = k;
    return out;
}

LMat lm_kernel_basis(const PlaceRef& P, const LMat& a, long prec) {
    LocalSmith s = lm_smith(P, a, prec);
    int cols = mcols(a);
    LMat basis(cols, std::vector<LocalElement>(cols - s.rank, LocalElement::zero(P)));
    for (int j = s.rank; j < cols; ++j)
        for (int i = 0; i < cols; ++i) basis[i][j - s.rank] = s.right[i][j];
    return basis;
}

ZHnf z_column_hnf(ZMat a) {
    int rows = static_cast<int>(a.size());
    int cols = rows == 0 ? 0 : static_cast<int>(a.front().size());
    ZHnf out;
    out.u.assign(cols, std::vector<mpz_class>(cols, 0));
    for (int i = 0; i < cols; ++i) out.u[i][i] = 1;

    auto colswap = [&](int x, int y) {
        for (int i = 0; i < rows; ++i) std::swap(a[i][x], a[i][y]);
        for (int i = 0; i < cols; ++i) std::swap(out.u[i][x], out.u[i][y]);
    };
    auto colcomb = [&](int x, int y, const mpz_class& s, const mpz_class& t, const mpz_class& sp,
                       const mpz_class& tp) {
        // (col_x, col_y) <- (s*col_x + t*col_y, sp*col_x + tp*col_y)
        for (int i = 0; i < rows; ++i) {
            mpz_class nx = s * a[i][x] + t * a[i][y];
            mpz_class ny = sp * a[i][x] + tp * a[i][y];
            a[i][x] = nx;
            a[i][y] = ny;
        }
        for (int i = 0; i < cols; ++i) {
            mpz_class nx = s * out.u[i][x] + t * out.u[i][y];
            mpz_class ny = sp * out.u[i][x] + tp * out.u[i][y];
            out.u[i][x] = nx;
            out.u[i][y] = ny;
        }
    };

    int r = 0;
    for (int row = 0; row < rows && r < cols; ++row) {
        // gcd-out all entries of this row into column r.
        int nz = -1;
        for (int j = r; j < cols; ++j)
            if (a[row][j] != 0) { nz = j; break; }
        if (nz < 0) continue;
        if (nz != r) colswap(nz, r);
        for (int j = r + 1; j < cols; ++j) {
            if (a[row][j] == 0) continue;
            mpz_class g, s, t;
            mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a[row][r].get_mpz_t(),
                       a[row][j].get_mpz_t());
            mpz_class x = a[row][r] / g, y = a[row][j] / g;
            colcomb(r, j, s, t, -y, x);
        }
        if (a[row][r] < 0) {
            for (int i = 0; i < rows; ++i) a[i][r] = -a[i][r];
            for (int i = 0; i < cols; ++i) out.u[i][r] = -out.u[i][r];
        }
        ++r;
    }
    out.rank = r;
    out.h = std::move(a);
    return out;
}

std::vector<std::vector<mpz_class>> z_kernel(const ZMat& a) {
    ZHnf h = z_column_hnf(a);
    int cols = a.empty() ? 0 : static_cast<int>(a.front().size());
    std::vector<std::vector<mpz_class>> out;
    for (int j = h.rank; j < cols; ++j) {
        std::vector<mpz_class> v(cols);
        for (int i = 0; i < cols; ++i) v[i] = h.u[i][j];
        out.push_back(std::move(v));
    }
    return out;
}

mpz_class z_lattice_index_det(const ZMat& gens) {
    ZHnf h = z_column_hnf(gens);
    int rows = static_cast<int>(gens.size());
    if (h.rank < rows) return 0;
    mpz_class det = 1;
    // After column HNF, the first `rank` columns are triangular by rows with
    // pivots in row order; multiply the pivot entries.
    int c = 0;
    for (int row = 0; row < rows && c < h.rank; ++row) {
        if (h.h[row][c] == 0) continue;
        det *= h.h[row][c];
        ++c;
    }
    return abs(det);
}

} // namespace adelic
