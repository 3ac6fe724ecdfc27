#include "blocks.hpp"

#include <algorithm>
#include <sstream>

namespace adelic {

namespace {

constexpr long kLatticeWork = 64;

// Exact element from leading digits: sum of d_t * pi^(v+t) for t < count.
LocalElement from_digits(const PlaceRef& P, long v, const std::vector<Residue>& ds) {
    LocalElement acc = LocalElement::zero(P);
    LocalElement pi = LocalElement::uniformizer(P, kLatticeWork);
    for (size_t t = 0; t < ds.size(); ++t) {
        if (ds[t].is_zero()) continue;
        LocalElement digit = LocalElement::from_pair(P, mpq_class(ds[t].a), mpq_class(ds[t].b), kLatticeWork);
        acc = le_add(acc, le_mul(digit, le_pow(pi, v + static_cast<long>(t))));
    }
    return acc;
}

// Canonical representative of x modulo pi^cut (digits below the cut), plus
// the quotient (x - rep) * pi^(-cut).
std::pair<LocalElement, LocalElement> reduce_mod_pi_power(const LocalElement& x, long cut) {
    const PlaceRef& P = x.place();
    if (x.is_zero_to_precision()) {
        if (x.absolute_precision() < cut)
            fail(Errc::PrecisionExhausted, "entry not known to the reduction cut");
        return {LocalElement::zero(P), LocalElement::zero(P, x.absolute_precision() - cut)};
    }
    long v = x.valuation();
    if (v >= cut) {
        LocalElement pi = LocalElement::uniformizer(P, std::min(x.precision() + 4, kPrecMax));
        return {LocalElement::zero(P), le_mul(x, le_pow(pi, -cut))};
    }
    if (x.absolute_precision() < cut)
        fail(Errc::PrecisionExhausted, "entry not known to the reduction cut");
    std::vector<Residue> ds = unit_digits(x, cut - v);
    LocalElement rep = from_digits(P, v, ds);
    LocalElement pi = LocalElement::uniformizer(P, std::min(x.precision() + 4, kPrecMax));
    LocalElement q = le_mul(le_sub(x, rep), le_pow(pi, -cut));
    return {rep, q};
}

std::string le_exact_str(const LocalElement& x, long digit_cap) {
    if (x.is_zero_to_precision()) return "0";
    long v = x.valuation();
    std::ostringstream os;
    os << v << ":";
    for (const Residue& d : unit_digits(x, std::min(digit_cap, x.precision()))) os << d.str() << ",";
    return os.str();
}

} // namespace

Lattice lattice_standard(const PlaceRef& P, int rank) {
    Lattice L;
    L.place = P;
    L.rank = rank;
    L.cols = lm_identity(P, rank, kLatticeWork);
    return L;
}

Lattice lattice_canonicalize(const Lattice& L) {
    return lattice_from_basis(L.place, L.cols);
}

Lattice lattice_from_basis(const PlaceRef& P, const LMat& basis) {
    int n = mrows(basis);
    if (n != mcols(basis)) fail(Errc::ShapeMismatch, "lattice basis must be square");
    Lattice out;
    out.place = P;
    out.rank = n;
    if (n == 0) return out;
    LMat m = basis;
    std::vector<long> diag(n, 0);
    LocalElement pi = LocalElement::uniformizer(P, kLatticeWork);

    // Triangularize bottom-up with unimodular column operations.
    for (int i = n - 1; i >= 0; --i) {
        int pc = -1;
        long bv = 0;
        for (int j = i; j >= 0; --j) {
            if (m[i][j].is_zero_to_precision()) continue;
            long v = m[i][j].valuation();
            if (pc < 0 || v < bv) { pc = j; bv = v; }
        }
        if (pc < 0) fail(Errc::SingularToPrecision, "lattice basis singular to precision");
        if (pc != i)
            for (int r = 0; r < n; ++r) std::swap(m[r][pc], m[r][i]);
        diag[i] = bv;
        LocalElement unit = le_mul(m[i][i], le_pow(pi, -bv));
        LocalElement uinv = le_inv(unit);
        for (int r = 0; r < n; ++r) m[r][i] = le_mul(m[r][i], uinv);
        m[i][i] = le_pow(pi, bv);
        for (int j = 0; j < i; ++j) {
            if (m[i][j].is_zero_to_precision()) { m[i][j] = LocalElement::zero(P); continue; }
            LocalElement q = le_mul(m[i][j], le_pow(pi, -bv));
            for (int r = 0; r <= i; ++r) m[r][j] = le_sub(m[r][j], le_mul(q, m[r][i]));
            m[i][j] = LocalElement::zero(P);
        }
    }
    // Digit-reduce entries above the diagonal.
    for (int j = 0; j < n; ++j) {
        for (int k = j - 1; k >= 0; --k) {
            auto [rep, q] = reduce_mod_pi_power(m[k][j], diag[k]);
            if (!q.is_zero_to_precision()) {
                for (int r = 0; r <= k; ++r) m[r][j] = le_sub(m[r][j], le_mul(q, m[r][k]));
            }
            m[k][j] = rep;
        }
    }
    out.cols = std::move(m);
    return out;
}

std::string lattice_fingerprint(const Lattice& L) {
    std::ostringstream os;
    os << "r" << L.rank << ";";
    for (int j = 0; j < L.rank; ++j)
        for (int i = 0; i < L.rank; ++i) {
            long cap = i == j ? 1 : kLatticeWork;
            os << le_exact_str(L.cols[i][j], cap) << "|";
        }
    return os.str();
}

bool lattice_equal(const Lattice& a, const Lattice& b) {
    if (a.place != b.place || a.rank != b.rank) return false;
    return lattice_fingerprint(a) == lattice_fingerprint(b);
}

bool Lattice::operator==(const Lattice& o) const { return lattice_equal(*this, o); }

bool lattice_is_standard(const Lattice& L) {
    return lattice_equal(L, lattice_standard(L.place, L.rank));
}

Lattice lattice_dual(const Lattice& L) {
    if (L.rank == 0) return L;
    long d = different_exponent(L.place);
    LMat inv_t = lm_transpose(lm_inverse(L.cols));
    if (d != 0) {
        LocalElement s = le_pow(LocalElement::uniformizer(L.place, kLatticeWork), -d);
        for (auto& row : inv_t)
            for (auto& x : row)
                if (!x.is_zero_to_precision()) x = le_mul(x, s);
    }
    return lattice_from_basis(L.place, inv_t);
}

std::vector<long> lattice_elementary_divisors(const Lattice& L) {
    if (L.rank == 0) return {};
    return lm_smith(L.place, L.cols, kLatticeWork).exponents;
}

Lattice lattice_direct_sum(const Lattice& a, const Lattice& b) {
    if (a.place != b.place) fail(Errc::PlaceMismatch, "lattice sum across places");
    int n = a.rank + b.rank;
    LMat m(n, std::vector<LocalElement>(n, LocalElement::zero(a.place)));
    for (int i = 0; i < a.rank; ++i)
        for (int j = 0; j < a.rank; ++j) m[i][j] = a.cols[i][j];
    for (int i = 0; i < b.rank; ++i)
        for (int j = 0; j < b.rank; ++j) m[a.rank + i][a.rank + j] = b.cols[i][j];
    return lattice_from_basis(a.place, m);
}

Lattice lattice_scale(const Lattice& L, long k) {
    if (k == 0 || L.rank == 0) return L;
    LMat m = L.cols;
    LocalElement s = le_pow(LocalElement::uniformizer(L.place, kLatticeWork), k);
    for (auto& row : m)
        for (auto& x : row)
            if (!x.is_zero_to_precision()) x = le_mul(x, s);
    return lattice_from_basis(L.place, m);
}

// ---------------------------------------------------------------------------
// Blocks
// ---------------------------------------------------------------------------

AdelicBlock block_make(const FieldDesc& F, std::vector<int> arch, int tail_dim,
                       std::map<PlaceKey, BlockComp> exceptions) {
    if (tail_dim < 0) fail(Errc::ShapeMismatch, "negative tail dimension");
    if (arch.empty()) arch.assign(F.arch_place_count(), 0);
    if (static_cast<int>(arch.size()) != F.arch_place_count())
        fail(Errc::ShapeMismatch, "wrong number of archimedean multiplicities");
    for (int m : arch)
        if (m < 0) fail(Errc::ShapeMismatch, "negative archimedean multiplicity");
    AdelicBlock B;
    B.field = F;
    B.arch = std::move(arch);
    B.tail_dim = tail_dim;
    for (auto& [k, comp] : exceptions) {
        if (comp.dim < 0) fail(Errc::ShapeMismatch, "negative component dimension");
        PlaceRef P = place_by_key(F, k);
        if (comp.dim != comp.lat.rank) fail(Errc::ShapeMismatch, "lattice rank != component dimension");
        if (comp.dim > 0 && comp.lat.place != P)
            fail(Errc::PlaceFieldMismatch, "lattice attached to the wrong place");
        Lattice canon = comp.dim > 0 ? lattice_canonicalize(comp.lat) : lattice_standard(P, 0);
        if (comp.dim == tail_dim && lattice_is_standard(canon)) continue;
        B.exceptions[k] = BlockComp{comp.dim, canon};
    }
    return B;
}

AdelicBlock block_zero(const FieldDesc& F) { return block_make(F, {}, 0, {}); }

AdelicBlock block_adeles(const FieldDesc& F) {
    return block_make(F, std::vector<int>(F.arch_place_count(), 1), 1, {});
}

bool block_equal(const AdelicBlock& a, const AdelicBlock& b) {
    if (a.field != b.field || a.arch != b.arch || a.tail_dim != b.tail_dim) return false;
    if (a.exceptions.size() != b.exceptions.size()) return false;
    auto it = a.exceptions.begin();
    auto jt = b.exceptions.begin();
    for (; it != a.exceptions.end(); ++it, ++jt) {
        if (!(it->first == jt->first)) return false;
        if (it->second.dim != jt->second.dim) return false;
        if (!lattice_equal(it->second.lat, jt->second.lat)) return false;
    }
    return true;
}

int arch_position(const FieldDesc& F, const PlaceRef& P) {
    if (P.kind == PlaceKind::Real) return P.index;
    return F.real_places() + P.index;
}

PtorsionComp block_ptorsion(const AdelicBlock& B, const PlaceRef& P) {
    if (P.field != B.field) fail(Errc::PlaceFieldMismatch, "place belongs to a different field");
    if (!P.is_finite()) return B.arch.at(arch_position(B.field, P));
    auto it = B.exceptions.find(key_of(P));
    if (it != B.exceptions.end()) return it->second;
    return BlockComp{B.tail_dim, lattice_standard(P, B.tail_dim)};
}

int block_dim_at(const AdelicBlock& B, const PlaceKey& k) {
    auto it = B.exceptions.find(k);
    return it != B.exceptions.end() ? it->second.dim : B.tail_dim;
}

const Lattice* block_lattice_at(const AdelicBlock& B, const PlaceKey& k, Lattice& scratch) {
    auto it = B.exceptions.find(k);
    if (it != B.exceptions.end()) return &it->second.lat;
    scratch = lattice_standard(place_by_key(B.field, k), B.tail_dim);
    return &scratch;
}

AdelicBlock block_direct_sum(const AdelicBlock& a, const AdelicBlock& b) {
    if (a.field != b.field) fail(Errc::FieldMismatch, "blocks over different fields");
    std::vector<int> arch(a.arch.size());
    for (size_t i = 0; i < arch.size(); ++i) arch[i] = a.arch[i] + b.arch[i];
    std::map<PlaceKey, BlockComp> exc;
    std::map<PlaceKey, bool> keys;
    for (const auto& [k, c] : a.exceptions) keys[k] = true;
    for (const auto& [k, c] : b.exceptions) keys[k] = true;
    for (const auto& [k, unused] : keys) {
        Lattice sa, sb;
        const Lattice* la = block_lattice_at(a, k, sa);
        const Lattice* lb = block_lattice_at(b, k, sb);
        exc[k] = BlockComp{block_dim_at(a, k) + block_dim_at(b, k), lattice_direct_sum(*la, *lb)};
    }
    return block_make(a.field, std::move(arch), a.tail_dim + b.tail_dim, std::move(exc));
}

AdelicBlock block_dual(const AdelicBlock& B) {
    std::map<PlaceKey, bool> keys;
    for (const auto& [k, c] : B.exceptions) keys[k] = true;
    if (!B.field.rational && B.tail_dim > 0) {
        // The codifferent twists the standard tail at ramified places.
        for (const auto& [p, e] : factor(B.field.discriminant()))
            keys[key_of(split_prime(B.field, p)[0])] = true;
    }
    std::map<PlaceKey, BlockComp> exc;
    for (const auto& [k, unused] : keys) {
        Lattice scratch;
        const Lattice* L = block_lattice_at(B, k, scratch);
        exc[k] = BlockComp{block_dim_at(B, k), lattice_dual(*L)};
    }
    return block_make(B.field, B.arch, B.tail_dim, std::move(exc));
}

AdelicBlock block_reassemble(const FieldDesc& F, const std::vector<int>& arch, int tail_dim,
                             const std::map<PlaceKey, BlockComp>& comps) {
    std::map<PlaceKey, BlockComp> exc(comps.begin(), comps.end());
    return block_make(F, arch, tail_dim, std::move(exc));
}

// ---------------------------------------------------------------------------
// Morphisms
// ---------------------------------------------------------------------------

namespace {

const FieldDesc kGauss = FieldDesc::quadratic(-1);

FieldDesc arch_coeff_field(const PlaceRef& P) {
    return P.kind == PlaceKind::Complex ? kGauss : FieldDesc::make_rational();
}

FMat amat_to_fmat(const AMat& m) {
    FMat out(m.size());
    for (size_t i = 0; i < m.size(); ++i) {
        out[i].reserve(m[i].size());
        for (const ArchScalar& s : m[i]) out[i].push_back(FieldElem{s.re, s.im});
    }
    return out;
}

AMat fmat_to_amat(const FMat& m) {
    AMat out(m.size());
    for (size_t i = 0; i < m.size(); ++i) {
        out[i].reserve(m[i].size());
        for (const FieldElem& s : m[i]) out[i].push_back(ArchScalar{s.u, s.v});
    }
    return out;
}

void check_shape(const FMat& m, int rows, int cols, const std::string& what) {
    if (mrows(m) != rows) fail(Errc::ShapeMismatch, what + ": expected " + std::to_string(rows) + " rows");
    for (const auto& row : m)
        if (static_cast<int>(row.size()) != cols)
            fail(Errc::ShapeMismatch, what + ": expected " + std::to_string(cols) + " cols");
}

} // namespace

BlockMorphism morphism_make(AdelicBlock source, AdelicBlock target, FMat tail,
                            std::map<PlaceKey, LMat> overrides, std::vector<AMat> arch) {
    if (source.field != target.field) fail(Errc::FieldMismatch, "morphism across fields");
    const FieldDesc& F = source.field;
    check_shape(tail, target.tail_dim, source.tail_dim, "tail matrix");

    std::map<PlaceKey, bool> exc_keys;
    for (const auto& [k, c] : source.exceptions) exc_keys[k] = true;
    for (const auto& [k, c] : target.exceptions) exc_keys[k] = true;
    for (const auto& [k, unused] : exc_keys) {
        bool in_s = source.exceptions.count(k) > 0, in_t = target.exceptions.count(k) > 0;
        if (in_s != in_t && overrides.find(k) == overrides.end())
            fail(Errc::ShapeMismatch,
                 "override required at " + k.p.get_str() + " (exception supports differ)");
    }
    for (const auto& [k, m] : overrides) {
        int rows = block_dim_at(target, k), cols = block_dim_at(source, k);
        if (static_cast<int>(m.size()) != rows)
            fail(Errc::ShapeMismatch, "override rows at " + k.p.get_str());
        for (const auto& row : m)
            if (static_cast<int>(row.size()) != cols)
                fail(Errc::ShapeMismatch, "override cols at " + k.p.get_str());
        PlaceRef P = place_by_key(F, k);
        for (const auto& row : m)
            for (const LocalElement& x : row)
                if (!x.is_zero_to_precision() && x.place() != P)
                    fail(Errc::PlaceFieldMismatch, "override entry at wrong place");
    }
    if (arch.empty()) {
        for (int i = 0; i < F.arch_place_count(); ++i) {
            AMat zero(target.arch[i], std::vector<ArchScalar>(source.arch[i]));
            arch.push_back(std::move(zero));
        }
    }
    if (static_cast<int>(arch.size()) != F.arch_place_count())
        fail(Errc::ShapeMismatch, "wrong number of archimedean matrices");
    for (int i = 0; i < F.arch_place_count(); ++i) {
        if (static_cast<int>(arch[i].size()) != target.arch[i])
            fail(Errc::ShapeMismatch, "arch matrix rows at place " + std::to_string(i));
        for (const auto& row : arch[i])
            if (static_cast<int>(row.size()) != source.arch[i])
                fail(Errc::ShapeMismatch, "arch matrix cols at place " + std::to_string(i));
    }

    BlockMorphism f;
    f.source = std::move(source);
    f.target = std::move(target);
    f.tail = std::move(tail);
    f.overrides = std::move(overrides);
    f.arch = std::move(arch);
    return f;
}

BlockMorphism morphism_identity(const AdelicBlock& B) {
    FMat tail = fm_identity(B.tail_dim);
    std::map<PlaceKey, LMat> overrides;
    for (const auto& [k, c] : B.exceptions)
        overrides[k] = lm_identity(place_by_key(B.field, k), c.dim, kLatticeWork);
    std::vector<AMat> arch;
    for (size_t i = 0; i < B.arch.size(); ++i) {
        FMat id = fm_identity(B.arch[i]);
        arch.push_back(fmat_to_amat(id));
    }
    return morphism_make(B, B, std::move(tail), std::move(overrides), std::move(arch));
}

LMat morphism_matrix_at(const BlockMorphism& f, const PlaceRef& P, long prec) {
    auto it = f.overrides.find(key_of(P));
    if (it != f.overrides.end()) return it->second;
    int rows = block_dim_at(f.target, key_of(P)), cols = block_dim_at(f.source, key_of(P));
    if (rows != mrows(f.tail) || cols != mcols(f.tail))
        fail(Errc::ShapeMismatch, "tail does not fit the component at " + P.str());
    LMat out(rows, std::vector<LocalElement>(cols, LocalElement::zero(P)));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            if (!f.tail[i][j].is_zero())
                out[i][j] = embed_finite(f.source.field, f.tail[i][j], P, prec);
    return out;
}

BlockMorphism morphism_compose(const BlockMorphism& g, const BlockMorphism& f) {
    if (!block_equal(g.source, f.target)) fail(Errc::ShapeMismatch, "composition targets do not match");
    const FieldDesc& F = f.source.field;
    FMat tail = fm_mul(F, g.tail, f.tail);
    std::map<PlaceKey, bool> keys;
    for (const auto& [k, m] : f.overrides) keys[k] = true;
    for (const auto& [k, m] : g.overrides) keys[k] = true;
    std::map<PlaceKey, LMat> overrides;
    for (const auto& [k, unused] : keys) {
        PlaceRef P = place_by_key(F, k);
        overrides[k] = lm_mul(morphism_matrix_at(g, P, kLatticeWork), morphism_matrix_at(f, P, kLatticeWork));
    }
    std::vector<AMat> arch;
    for (size_t i = 0; i < f.arch.size(); ++i) {
        FieldDesc cf = i < static_cast<size_t>(F.real_places()) ? FieldDesc::make_rational() : kGauss;
        arch.push_back(fmat_to_amat(fm_mul(cf, amat_to_fmat(g.arch[i]), amat_to_fmat(f.arch[i]))));
    }
    return morphism_make(f.source, g.target, std::move(tail), std::move(overrides), std::move(arch));
}

BlockMorphism morphism_dual(const BlockMorphism& f) {
    AdelicBlock ds = block_dual(f.target), dt = block_dual(f.source);
    FMat tail = fm_transpose(f.tail);
    std::map<PlaceKey, bool> keys;
    for (const auto& [k, m] : f.overrides) keys[k] = true;
    for (const auto& [k, c] : ds.exceptions) keys[k] = true;
    for (const auto& [k, c] : dt.exceptions) keys[k] = true;
    std::map<PlaceKey, LMat> overrides;
    for (const auto& [k, unused] : keys) {
        PlaceRef P = place_by_key(f.source.field, k);
        overrides[k] = lm_transpose(morphism_matrix_at(f, P, kLatticeWork));
    }
    std::vector<AMat> arch;
    for (size_t i = 0; i < f.arch.size(); ++i) arch.push_back(fmat_to_amat(fm_transpose(amat_to_fmat(f.arch[i]))));
    return morphism_make(std::move(ds), std::move(dt), std::move(tail), std::move(overrides),
                         std::move(arch));
}

std::vector<PlaceKey> morphism_exceptional_set(const BlockMorphism& f) {
    const FieldDesc& F = f.source.field;
    std::map<PlaceKey, bool> candidates;
    for (const auto& [k, m] : f.overrides) candidates[k] = true;
    for (const auto& [k, c] : f.source.exceptions) candidates[k] = true;
    for (const auto& [k, c] : f.target.exceptions) candidates[k] = true;
    for (const auto& row : f.tail)
        for (const FieldElem& x : row) {
            if (x.is_zero()) continue;
            mpz_class den = lcm(x.u.get_den(), x.v.get_den());
            for (const auto& [p, e] : factor(den))
                for (const PlaceRef& P : split_prime(F, p)) candidates[key_of(P)] = true;
        }

    std::vector<PlaceKey> out;
    for (const auto& [k, unused] : candidates) {
        if (f.overrides.count(k)) { out.push_back(k); continue; }
        int ds = block_dim_at(f.source, k), dt = block_dim_at(f.target, k);
        if (ds == 0) continue;
        PlaceRef P = place_by_key(F, k);
        LMat M = morphism_matrix_at(f, P, kLatticeWork);
        Lattice ss, st;
        const Lattice* Ls = block_lattice_at(f.source, k, ss);
        const Lattice* Lt = block_lattice_at(f.target, k, st);
        bool integral = true;
        if (dt == 0) {
            integral = true;
        } else {
            LMat T = lm_mul(lm_inverse(Lt->cols), lm_mul(M, Ls->cols));
            for (const auto& row : T)
                for (const LocalElement& x : row)
                    if (!x.is_zero_to_precision() && x.valuation() < 0) integral = false;
        }
        if (!integral) out.push_back(k);
    }
    return out;
}

namespace {

void check_level(std::vector<std::string>& failures, const std::string& level, int dim_a, int dim_b,
                 int dim_c, int rank_f, int rank_g, bool composite_zero) {
    if (rank_f != dim_a) failures.push_back(level + ": first map not injective");
    if (rank_g != dim_c) failures.push_back(level + ": second map not surjective");
    if (rank_f + rank_g != dim_b) failures.push_back(level + ": ranks do not fill the middle");
    if (!composite_zero) failures.push_back(level + ": composite is nonzero");
}

} // namespace

ExactnessVerdict sequence_exactness(const BlockMorphism& f, const BlockMorphism& g) {
    if (!block_equal(f.target, g.source))
        fail(Errc::ShapeMismatch, "target of the first map differs from the source of the second");
    const FieldDesc& F = f.source.field;
    ExactnessVerdict out;

    check_level(out.failures, "tail", f.source.tail_dim, f.target.tail_dim, g.target.tail_dim,
                fm_rank(F, f.tail), fm_rank(F, g.tail), fm_is_zero(fm_mul(F, g.tail, f.tail)));

    std::map<PlaceKey, bool> keys;
    for (const auto& [k, m] : f.overrides) keys[k] = true;
    for (const auto& [k, m] : g.overrides) keys[k] = true;
    for (const auto& [k, c] : f.source.exceptions) keys[k] = true;
    for (const auto& [k, c] : f.target.exceptions) keys[k] = true;
    for (const auto& [k, c] : g.target.exceptions) keys[k] = true;
    for (const auto& [k, unused] : keys) {
        PlaceRef P = place_by_key(F, k);
        LMat Mf = morphism_matrix_at(f, P, kLatticeWork);
        LMat Mg = morphism_matrix_at(g, P, kLatticeWork);
        bool comp_zero = true;
        if (mrows(Mg) > 0 && mcols(Mf) > 0 && mrows(Mf) > 0)
            comp_zero = lm_is_zero_to_precision(lm_mul(Mg, Mf));
        check_level(out.failures, "place " + k.p.get_str(), block_dim_at(f.source, k),
                    block_dim_at(f.target, k), block_dim_at(g.target, k), lm_rank(Mf), lm_rank(Mg),
                    comp_zero);
    }

    for (size_t i = 0; i < f.arch.size(); ++i) {
        FieldDesc cf = i < static_cast<size_t>(F.real_places()) ? FieldDesc::make_rational() : kGauss;
        FMat Mf = amat_to_fmat(f.arch[i]);
        FMat Mg = amat_to_fmat(g.arch[i]);
        check_level(out.failures, "arch " + std::to_string(i), f.source.arch[i], f.target.arch[i],
                    g.target.arch[i], fm_rank(cf, Mf), fm_rank(cf, Mg),
                    fm_is_zero(fm_mul(cf, Mg, Mf)));
    }
    out.exact = out.failures.empty();
    return out;
}

// ---------------------------------------------------------------------------
// Kernels
// ---------------------------------------------------------------------------

namespace {

// Realification of mult-by-(u+vw) over the basis {1, w}.
void realify_entry(const FieldDesc& F, const FieldElem& x, mpz_class out[2][2], const mpz_class& scale) {
    mpq_class t(F.omega_trace()), m(F.omega_norm());
    mpq_class a00 = x.u * scale, a01 = m * x.v * scale;
    mpq_class a10 = x.v * scale, a11 = (x.u + t * x.v) * scale;
    for (const mpq_class* q : {&a00, &a01, &a10, &a11})
        if (q->get_den() != 1) fail(Errc::ShapeMismatch, "realification did not clear denominators");
    out[0][0] = a00.get_num();
    out[0][1] = a01.get_num();
    out[1][0] = a10.get_num();
    out[1][1] = a11.get_num();
}

mpz_class tail_denominator_lcm(const FMat& m) {
    mpz_class den = 1;
    for (const auto& row : m)
        for (const FieldElem& x : row) den = lcm(den, lcm(x.u.get_den(), x.v.get_den()));
    return den;
}

// Canonical saturated kernel basis of the tail matrix over F, plus the
// rational primes where the O-span of the basis may differ from the full
// saturation (empty over Q).
struct TailKernel {
    FMat basis; // source_tail x k
    std::vector<mpz_class> bad_primes;
};

TailKernel tail_kernel(const FieldDesc& F, const FMat& tail, int source_dim) {
    TailKernel out;
    mpz_class den = tail_denominator_lcm(tail);
    int rows = mrows(tail);
    if (F.rational) {
        ZMat Z(rows, std::vector<mpz_class>(source_dim, 0));
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < source_dim; ++j) {
                mpq_class v = tail[i][j].u * mpq_class(den);
                Z[i][j] = v.get_num();
            }
        auto ker = z_kernel(Z);
        // Canonical form: column HNF of the kernel basis.
        ZMat KB(source_dim, std::vector<mpz_class>(ker.size(), 0));
        for (size_t j = 0; j < ker.size(); ++j)
            for (int i = 0; i < source_dim; ++i) KB[i][j] = ker[j][i];
        ZHnf h = z_column_hnf(KB);
        out.basis.assign(source_dim, std::vector<FieldElem>(ker.size(), FieldElem{0, 0}));
        for (size_t j = 0; j < ker.size(); ++j)
            for (int i = 0; i < source_dim; ++i) out.basis[i][j] = FieldElem{mpq_class(h.h[i][j]), 0};
        return out;
    }

    // Quadratic: work with the Z-realification.
    ZMat Z(2 * rows, std::vector<mpz_class>(2 * source_dim, 0));
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < source_dim; ++j) {
            mpz_class blk[2][2];
            realify_entry(F, tail[i][j], blk, den);
            for (int a = 0; a < 2; ++a)
                for (int b = 0; b < 2; ++b) Z[2 * i + a][2 * j + b] = blk[a][b];
        }
    auto kerZ = z_kernel(Z); // saturated, rank 2k
    // F-coordinates of the Z-kernel vectors.
    std::vector<std::vector<FieldElem>> fvecs;
    for (const auto& v : kerZ) {
        std::vector<FieldElem> w(source_dim);
        for (int j = 0; j < source_dim; ++j) w[j] = FieldElem{mpq_class(v[2 * j]), mpq_class(v[2 * j + 1])};
        fvecs.push_back(std::move(w));
    }
    // Select an F-basis greedily.
    int k = static_cast<int>(fvecs.size()) / 2;
    FMat chosen;
    for (const auto& v : fvecs) {
        FMat trial = chosen;
        trial.push_back(v);
        if (fm_rank(F, trial) == static_cast<int>(trial.size())) chosen = std::move(trial);
        if (static_cast<int>(chosen.size()) == k) break;
    }
    out.basis.assign(source_dim, std::vector<FieldElem>(k, FieldElem{0, 0}));
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < source_dim; ++i) out.basis[i][j] = chosen[j][i];

    if (k > 0) {
        // Index of span_O(basis) inside the saturation, via Z-covolumes in
        // kernel coordinates.
        ZMat N(2 * source_dim, std::vector<mpz_class>(kerZ.size(), 0));
        for (size_t j = 0; j < kerZ.size(); ++j)
            for (int i = 0; i < 2 * source_dim; ++i) N[i][j] = kerZ[j][i];
        // Columns of basis and w*basis, realified.
        ZMat Bz(2 * source_dim, std::vector<mpz_class>(2 * k, 0));
        for (int j = 0; j < k; ++j) {
            for (int i = 0; i < source_dim; ++i) {
                const FieldElem& x = out.basis[i][j];
                FieldElem wx = fe_mul(F, x, FieldElem{0, 1});
                if (x.u.get_den() != 1 || x.v.get_den() != 1 || wx.u.get_den() != 1 || wx.v.get_den() != 1)
                    fail(Errc::ShapeMismatch, "kernel basis not integral");
                Bz[2 * i][2 * j] = x.u.get_num();
                Bz[2 * i + 1][2 * j] = x.v.get_num();
                Bz[2 * i][2 * j + 1] = wx.u.get_num();
                Bz[2 * i + 1][2 * j + 1] = wx.v.get_num();
            }
        }
        // Solve N * X = Bz over Q; X is integral (Bz lies in the saturation).
        FMat Nf(2 * source_dim, std::vector<FieldElem>(kerZ.size(), FieldElem{0, 0}));
        for (int i = 0; i < 2 * source_dim; ++i)
            for (size_t j = 0; j < kerZ.size(); ++j) Nf[i][j] = FieldElem{mpq_class(N[i][j]), 0};
        FieldDesc Q = FieldDesc::make_rational();
        // Augmented elimination.
        FMat aug = Nf;
        for (int i = 0; i < 2 * source_dim; ++i)
            for (int j = 0; j < 2 * k; ++j) aug[i].push_back(FieldElem{mpq_class(Bz[i][j]), 0});
        int nc = static_cast<int>(kerZ.size());
        // Reduce; read off X rows for pivot columns.
        FMat red = aug;
        std::vector<int> pivots;
        int r = 0;
        for (int c = 0; c < nc && r < mrows(red); ++c) {
            int pr = -1;
            for (int i = r; i < mrows(red); ++i)
                if (!red[i][c].is_zero()) { pr = i; break; }
            if (pr < 0) continue;
            std::swap(red[r], red[pr]);
            FieldElem inv = fe_inv(Q, red[r][c]);
            for (int j = c; j < mcols(red); ++j) red[r][j] = fe_mul(Q, red[r][j], inv);
            for (int i = 0; i < mrows(red); ++i) {
                if (i == r || red[i][c].is_zero()) continue;
                FieldElem factor = red[i][c];
                for (int j = c; j < mcols(red); ++j)
                    red[i][j] = fe_sub(red[i][j], fe_mul(Q, factor, red[r][j]));
            }
            pivots.push_back(c);
            ++r;
        }
        FMat X(nc, std::vector<FieldElem>(2 * k, FieldElem{0, 0}));
        for (size_t pi = 0; pi < pivots.size(); ++pi)
            for (int j = 0; j < 2 * k; ++j) X[pivots[pi]][j] = red[pi][nc + j];
        mpq_class idx = fm_det(Q, X).u;
        if (idx == 0) fail(Errc::ShapeMismatch, "kernel basis does not span the saturation");
        mpz_class idx_num = abs(idx.get_num()) * abs(idx.get_den());
        for (const auto& [p, e] : factor(idx_num))
            if (e > 0) out.bad_primes.push_back(p);
    }
    return out;
}

LMat embed_fmat(const FieldDesc& F, const FMat& m, const PlaceRef& P, long prec) {
    LMat out(mrows(m), std::vector<LocalElement>(mcols(m), LocalElement::zero(P)));
    for (int i = 0; i < mrows(m); ++i)
        for (int j = 0; j < mcols(m); ++j)
            if (!m[i][j].is_zero()) out[i][j] = embed_finite(F, m[i][j], P, prec);
    return out;
}

} // namespace

KernelData morphism_kernel(const BlockMorphism& f) {
    const FieldDesc& F = f.source.field;
    const AdelicBlock& A = f.source;

    TailKernel tk = tail_kernel(F, f.tail, A.tail_dim);
    int k = mcols(tk.basis);

    // Candidate places needing local inspection.
    std::map<PlaceKey, bool> candidates;
    for (const auto& [key, m] : f.overrides) candidates[key] = true;
    for (const auto& [key, c] : A.exceptions) candidates[key] = true;
    for (const auto& [key, c] : f.target.exceptions) candidates[key] = true;
    for (const mpz_class& p : tk.bad_primes)
        for (const PlaceRef& P : split_prime(F, p)) candidates[key_of(P)] = true;

    std::map<PlaceKey, BlockComp> kernel_exceptions;
    std::map<PlaceKey, LMat> inclusion_overrides;

    for (const auto& [key, unused] : candidates) {
        PlaceRef P = place_by_key(F, key);
        LMat M = morphism_matrix_at(f, P, kLatticeWork);
        int ds = block_dim_at(A, key);
        Lattice scratch;
        const Lattice* Ls = block_lattice_at(A, key, scratch);
        LMat ker_local = lm_kernel_basis(P, M, kLatticeWork);
        int k_local = mcols(ker_local);
        LMat iB = embed_fmat(F, tk.basis, P, kLatticeWork);
        bool tail_spans = k_local == k;
        if (tail_spans && k > 0 && !lm_is_zero_to_precision(lm_mul(M, iB))) tail_spans = false;

        if (tail_spans) {
            if (k == 0) continue;
            // Lattice of {x : iota(B) x in L_src} in tail-kernel coordinates.
            LMat T = lm_mul(lm_inverse(Ls->cols), iB);
            LocalSmith s = lm_smith(P, T, kLatticeWork);
            if (s.rank != k) fail(Errc::PrecisionExhausted, "kernel basis degenerates at " + P.str());
            LMat basis(k, std::vector<LocalElement>(k, LocalElement::zero(P)));
            LocalElement pi = LocalElement::uniformizer(P, kLatticeWork);
            for (int j = 0; j < k; ++j) {
                LocalElement scale = le_pow(pi, -s.exponents[j]);
                for (int i = 0; i < k; ++i) basis[i][j] = le_mul(s.right[i][j], scale);
            }
            Lattice LK = lattice_from_basis(P, basis);
            kernel_exceptions[key] = BlockComp{k, LK};
            inclusion_overrides[key] = iB;
        } else {
            // Local coordinates: saturated kernel of M relative to L_src.
            LMat MB = mcols(M) > 0 ? lm_mul(M, Ls->cols) : M;
            LMat kb = lm_kernel_basis(P, MB, kLatticeWork);
            LMat incl = mcols(kb) > 0 ? lm_mul(Ls->cols, kb) : LMat(ds);
            kernel_exceptions[key] = BlockComp{mcols(kb), lattice_standard(P, mcols(kb))};
            inclusion_overrides[key] = incl;
        }
    }

    // Archimedean kernels.
    std::vector<int> arch_dims(A.arch.size(), 0);
    std::vector<AMat> arch_incl;
    for (size_t i = 0; i < A.arch.size(); ++i) {
        FieldDesc cf = i < static_cast<size_t>(F.real_places()) ? FieldDesc::make_rational() : kGauss;
        auto kb = fm_kernel(cf, amat_to_fmat(f.arch[i]));
        arch_dims[i] = static_cast<int>(kb.size());
        FMat m(A.arch[i], std::vector<FieldElem>(kb.size(), FieldElem{0, 0}));
        for (size_t j = 0; j < kb.size(); ++j)
            for (int r = 0; r < A.arch[i]; ++r) m[r][j] = kb[j][r];
        arch_incl.push_back(fmat_to_amat(m));
    }

    AdelicBlock K = block_make(F, arch_dims, k, kernel_exceptions);
    // The inclusion needs overrides wherever K or A carries an exception.
    for (const auto& [key, c] : K.exceptions)
        if (!inclusion_overrides.count(key))
            inclusion_overrides[key] = embed_fmat(F, tk.basis, place_by_key(F, key), kLatticeWork);
    for (const auto& [key, c] : A.exceptions)
        if (!inclusion_overrides.count(key))
            inclusion_overrides[key] = embed_fmat(F, tk.basis, place_by_key(F, key), kLatticeWork);
    // Drop overrides at places where neither side is exceptional and the
    // override equals the embedded tail (kept minimal but valid).
    BlockMorphism incl = morphism_make(K, A, tk.basis, std::move(inclusion_overrides), std::move(arch_incl));
    return KernelData{std::move(K), std::move(incl)};
}

// ---------------------------------------------------------------------------
// LCA objects
// ---------------------------------------------------------------------------

LCAObject LCAObject::discrete(const FieldDesc& F, int n) {
    LCAObject x;
    x.kind = Kind::Discrete;
    x.field = F;
    x.n = n;
    return x;
}

LCAObject LCAObject::compact_vs(const FieldDesc& F, int n) {
    LCAObject x;
    x.kind = Kind::CompactVS;
    x.field = F;
    x.n = n;
    return x;
}

LCAObject LCAObject::of_block(AdelicBlock B) {
    LCAObject x;
    x.kind = Kind::Block;
    x.field = B.field;
    x.block = std::move(B);
    return x;
}

LCAObject LCAObject::sum(const FieldDesc& F, std::vector<LCAObject> children) {
    LCAObject x;
    x.kind = Kind::Sum;
    x.field = F;
    x.children = std::move(children);
    return x;
}

LCANormalForm lca_normalize(const LCAObject& X) {
    LCANormalForm out;
    out.block = block_zero(X.field);
    std::vector<const LCAObject*> stack = {&X};
    while (!stack.empty()) {
        const LCAObject* cur = stack.back();
        stack.pop_back();
        if (cur->field != X.field) fail(Errc::FieldMismatch, "mixed fields in one object");
        switch (cur->kind) {
            case LCAObject::Kind::Discrete:
                if (cur->n < 0) fail(Errc::ShapeMismatch, "negative dimension");
                out.discrete_dim += cur->n;
                break;
            case LCAObject::Kind::CompactVS:
                if (cur->n < 0) fail(Errc::ShapeMismatch, "negative dimension");
                out.compact_dim += cur->n;
                break;
            case LCAObject::Kind::Block:
                out.block = block_direct_sum(out.block, *cur->block);
                break;
            case LCAObject::Kind::Sum:
                for (auto it = cur->children.rbegin(); it != cur->children.rend(); ++it)
                    stack.push_back(&*it);
                break;
        }
    }
    return out;
}

LCAObject lca_dual(const LCAObject& X) {
    switch (X.kind) {
        case LCAObject::Kind::Discrete: return LCAObject::compact_vs(X.field, X.n);
        case LCAObject::Kind::CompactVS: return LCAObject::discrete(X.field, X.n);
        case LCAObject::Kind::Block: return LCAObject::of_block(block_dual(*X.block));
        case LCAObject::Kind::Sum: {
            std::vector<LCAObject> kids;
            kids.reserve(X.children.size());
            for (const LCAObject& c : X.children) kids.push_back(lca_dual(c));
            return LCAObject::sum(X.field, std::move(kids));
        }
    }
    fail(Errc::ShapeMismatch, "corrupt object");
}

bool lca_equal_normalized(const LCAObject& a, const LCAObject& b) {
    LCANormalForm na = lca_normalize(a), nb = lca_normalize(b);
    return na.compact_dim == nb.compact_dim && na.discrete_dim == nb.discrete_dim &&
           block_equal(na.block, nb.block);
}

} // namespace adelic
