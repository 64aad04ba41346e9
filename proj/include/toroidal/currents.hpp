#pragma once

#include "toroidal/module.hpp"

#include <memory>
#include <variant>

namespace toroidal {

struct IllDefinedFusion : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One current factor inside a fused product: atom, argument monomial
// (the current is atom(arg * z)), and an optional tensor-leg restriction.
struct Leaf {
    Atom atom;
    Scalar arg = Scalar(1);
    std::vector<int> leg;

    std::string str() const;
};

// Ordered fusion tree; evaluation respects the tree shape (Lemma-ass-lem
// style associativity is a checked property, not an assumption).
class FusionTree {
public:
    FusionTree(Leaf l) : node_(std::move(l)) {}
    FusionTree(FusionTree a, FusionTree b)
        : node_(std::make_pair(std::make_shared<FusionTree>(std::move(a)),
                               std::make_shared<FusionTree>(std::move(b)))) {}

    static FusionTree chain(const std::vector<Leaf>& leaves); // left comb

    bool is_leaf() const { return std::holds_alternative<Leaf>(node_); }
    const Leaf& leaf() const { return std::get<Leaf>(node_); }
    const FusionTree& left() const { return *std::get<1>(node_).first; }
    const FusionTree& right() const { return *std::get<1>(node_).second; }

    void collect_leaves(std::vector<Leaf>& out) const;
    std::string str() const;

private:
    using Pair = std::pair<std::shared_ptr<const FusionTree>, std::shared_ptr<const FusionTree>>;
    std::variant<Leaf, Pair> node_;
};

// Mode evaluator for fused products on one module. Truncation windows are
// derived from the grading (annihilation bounds) plus the exchange rules;
// a small padding band around every window is evaluated and must vanish,
// which verifies the window soundness on the module at hand.
class Evaluator {
public:
    explicit Evaluator(std::shared_ptr<const ModuleHandle> mod, int pad = 1,
                       bool use_vertex_fast_path = true)
        : mod_(std::move(mod)), pad_(pad), fast_(use_vertex_fast_path) {}

    const ModuleHandle& module() const { return *mod_; }

    Vec leaf_mode(const Leaf& l, long mode, const Vec& v) const;
    Vec tree_mode(const FusionTree& t, long mode, const Vec& v) const;
    Vec tree_mode_key(const FusionTree& t, long mode, const BasisKey& key) const;

    // Range of total modes at which a tree can act without annihilating a
    // vector of the given degree; used by delta/directed prefactor sums.
    // Returns {lo, hi} where either bound may be absent.
    struct ModeBounds {
        std::optional<long> lo, hi;
    };
    ModeBounds tree_bounds(const FusionTree& t, long vec_degree) const;

private:
    ExchangeRule pair_rule(const Leaf& a, const Leaf& b) const;
    std::optional<Vec> vertex_fast_path(const std::vector<Leaf>& leaves, long mode,
                                        const BasisKey& key) const;

    std::shared_ptr<const ModuleHandle> mod_;
    int pad_;
    bool fast_ = true;
    mutable std::mutex mu_;
    mutable std::map<std::tuple<std::string, long, BasisKey>, Vec> memo_;
};

// --- named fused currents -------------------------------------------------

struct WeightedTree {
    Scalar coef;
    std::vector<Leaf> leaves; // left-comb chain
};

// e^{(r)}_{q1}(arg z), f^{(r)}, psi^{±,(r)}, k_r^± of one family.
WeightedTree named_e_r(const ParamSpec& spec, Family fam, int r, const Scalar& arg = Scalar(1));
WeightedTree named_f_r(const ParamSpec& spec, Family fam, int r, const Scalar& arg = Scalar(1));
WeightedTree named_psi_r(const ParamSpec& spec, Family fam, int sign, int r,
                         const Scalar& arg = Scalar(1));
// k_r^+ = f^{(r)} k0^+, k_r^- = k0^- e^{(r)}; honours the K1Shift fault.
WeightedTree named_k_r(const ParamSpec& spec, Family fam, int sign, int r,
                       const Scalar& arg = Scalar(1));

// --- expression AST --------------------------------------------------------

// Current expressions over the generating currents: shifts, fused products,
// scalar/series multiples, sums, Cartan inverses and coproduct lifts. The
// coproduct lift is a tag: on a tensor module the atoms already act through
// Delta, so Lift marks intent and asserts the module shape.
class CurrentExpr {
public:
    static CurrentExpr atom(Atom a);
    static CurrentExpr shift(CurrentExpr e, Scalar a);
    static CurrentExpr fused(CurrentExpr a, CurrentExpr b);
    static CurrentExpr scaled(Scalar c, CurrentExpr e);
    static CurrentExpr series_scaled(DirectedSeries s, CurrentExpr e);
    static CurrentExpr sum(std::vector<CurrentExpr> es);
    // Cartan inverse: restricted by construction to psi^± / k0^± atoms and
    // their shifts/products.
    static CurrentExpr cartan_inverse(CurrentExpr e);
    static CurrentExpr coproduct_lift(CurrentExpr e, int factors);

    Vec mode_apply(long mode, const Vec& v, const Evaluator& ev) const;
    std::string sexpr() const;

private:
    struct AtomNode { Atom a; };
    struct ShiftNode { Scalar a; };
    struct FusedNode {};
    struct ScaledNode { Scalar c; };
    struct SeriesNode { std::shared_ptr<const DirectedSeries> s; };
    struct SumNode {};
    struct InverseNode {};
    struct LiftNode { int factors; };

    using Node = std::variant<AtomNode, ShiftNode, FusedNode, ScaledNode, SeriesNode, SumNode,
                              InverseNode, LiftNode>;

    // flattened form: sum of weighted trees (series multiples applied at
    // evaluation time)
    struct Piece {
        Scalar coef;
        std::shared_ptr<const DirectedSeries> series; // may be null
        FusionTree tree;
    };
    std::vector<Piece> flatten() const;

    Node node_;
    std::vector<std::shared_ptr<const CurrentExpr>> kids_;
};

// The spec-level fuse operation: validates g1(z, alpha z) != 0 against the
// exchange table and records the order-swap constant when defined.
struct FusionInfo {
    bool swappable;
    Scalar swap_constant; // c with a(z)b(alpha z) = c * b(alpha z)a(z)
};
FusionInfo fuse_info(const ParamSpec& spec, const Atom& a, const Atom& b, const Scalar& alpha,
                     const Scalar& levelPlain, const Scalar& levelChecked);

} // namespace toroidal
