#pragma once

#include <optional>
#include <variant>

#include "matrix.hpp"

namespace adelic {

// Full-rank O_P-lattice in F^_P^n, stored by its canonical pi-adic column
// HNF: upper triangular, pivots exactly pi^{a_i}, entries right of a pivot
// reduced mod pi^{a_i}.  Two lattices are equal iff the canonical data match.
struct Lattice {
    PlaceRef place;
    int rank = 0;
    LMat cols; // cols[i][j] = entry in row i of column j

    bool operator==(const Lattice& o) const;
};

Lattice lattice_standard(const PlaceRef& P, int rank);
Lattice lattice_from_basis(const PlaceRef& P, const LMat& basis);
Lattice lattice_canonicalize(const Lattice& L);
bool lattice_equal(const Lattice& a, const Lattice& b);
bool lattice_is_standard(const Lattice& L);
// Annihilator under the trace pairing: pi^{-d_P} * inverse-transpose basis.
Lattice lattice_dual(const Lattice& L);
std::vector<long> lattice_elementary_divisors(const Lattice& L);
Lattice lattice_direct_sum(const Lattice& a, const Lattice& b);
// pi^k * L
Lattice lattice_scale(const Lattice& L, long k);
std::string lattice_fingerprint(const Lattice& L);

struct BlockComp {
    int dim = 0;
    Lattice lat;
};

// Finitely presented adelic block: R_sigma multiplicities, a tail dimension
// carried with the standard lattice at every unnamed finite place, and
// finitely many exceptional places with explicit lattices.
struct AdelicBlock {
    FieldDesc field;
    std::vector<int> arch; // multiplicity per archimedean place
    int tail_dim = 0;
    std::map<PlaceKey, BlockComp> exceptions;
};

AdelicBlock block_make(const FieldDesc& F, std::vector<int> arch, int tail_dim,
                       std::map<PlaceKey, BlockComp> exceptions);
AdelicBlock block_zero(const FieldDesc& F);
AdelicBlock block_adeles(const FieldDesc& F);
bool block_equal(const AdelicBlock& a, const AdelicBlock& b);

using PtorsionComp = std::variant<BlockComp, int>;
// The P-component of the restricted product (dim + lattice at finite places,
// the R_sigma multiplicity at archimedean ones).
PtorsionComp block_ptorsion(const AdelicBlock& B, const PlaceRef& P);

AdelicBlock block_direct_sum(const AdelicBlock& a, const AdelicBlock& b);
AdelicBlock block_dual(const AdelicBlock& B);

// Rebuild a block from its P-components; inverse of block_ptorsion over any
// support superset.
AdelicBlock block_reassemble(const FieldDesc& F, const std::vector<int>& arch, int tail_dim,
                             const std::map<PlaceKey, BlockComp>& comps);

// Archimedean matrix entry: rational at real places, rational pair at
// complex ones (arithmetic runs over Q(i)).
struct ArchScalar {
    mpq_class re = 0, im = 0;
};
using AMat = std::vector<std::vector<ArchScalar>>;

// Morphism of blocks: one matrix over F acting through iota at every finite
// place, finitely many local overrides, and per-place archimedean matrices.
// Shape rule: overrides must cover every place where source/target exception
// data differ.
struct BlockMorphism {
    AdelicBlock source, target;
    FMat tail;                          // target.tail_dim x source.tail_dim
    std::map<PlaceKey, LMat> overrides; // dim_P(target) x dim_P(source)
    std::vector<AMat> arch;             // per archimedean place
};

BlockMorphism morphism_make(AdelicBlock source, AdelicBlock target, FMat tail,
                            std::map<PlaceKey, LMat> overrides, std::vector<AMat> arch);
BlockMorphism morphism_identity(const AdelicBlock& B);
BlockMorphism morphism_compose(const BlockMorphism& g, const BlockMorphism& f);
BlockMorphism morphism_dual(const BlockMorphism& f);

// The matrix acting on the P-component (override, or iota of the tail).
LMat morphism_matrix_at(const BlockMorphism& f, const PlaceRef& P, long prec);
int block_dim_at(const AdelicBlock& B, const PlaceKey& k);
const Lattice* block_lattice_at(const AdelicBlock& B, const PlaceKey& k, Lattice& scratch);

// Minimal finite set S: override support plus the places where the tail
// matrix fails to carry the source lattice into the target lattice.
std::vector<PlaceKey> morphism_exceptional_set(const BlockMorphism& f);

struct ExactnessVerdict {
    bool exact = true;
    std::vector<std::string> failures; // "tail", "place 2", "arch 0", with reasons
};

// Levelwise short-exactness of 0 -> A -f-> B -g-> C -> 0.
ExactnessVerdict sequence_exactness(const BlockMorphism& f, const BlockMorphism& g);

struct KernelData {
    AdelicBlock kernel;
    BlockMorphism inclusion;
};

KernelData morphism_kernel(const BlockMorphism& f);

// General objects of the category: syntax trees of discrete vector spaces,
// compact duals, and adelic blocks.
struct LCAObject {
    enum class Kind { Discrete, CompactVS, Block, Sum };
    Kind kind = Kind::Sum;
    FieldDesc field;
    int n = 0;
    std::optional<AdelicBlock> block;
    std::vector<LCAObject> children;

    static LCAObject discrete(const FieldDesc& F, int n);
    static LCAObject compact_vs(const FieldDesc& F, int n);
    static LCAObject of_block(AdelicBlock B);
    static LCAObject sum(const FieldDesc& F, std::vector<LCAObject> children);
};

struct LCANormalForm {
    int compact_dim = 0;
    AdelicBlock block;
    int discrete_dim = 0;
};

LCANormalForm lca_normalize(const LCAObject& X);
LCAObject lca_dual(const LCAObject& X);
bool lca_equal_normalized(const LCAObject& a, const LCAObject& b);

} // namespace adelic
