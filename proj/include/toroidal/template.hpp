#pragma once

#include "toroidal/currents.hpp"
#include "toroidal/module.hpp"
#include "toroidal/series.hpp"

#include <optional>
#include <variant>

namespace toroidal {

// Scalar with the opaque adjoined units lambda = q2^{beta/2} and its checked
// twin. The units never enter arithmetic against module vectors: a term whose
// unit exponents are nonzero must evaluate to the zero operator.
struct TScalar {
    Scalar q = Scalar(1);
    int lam = 0, lamc = 0;

    bool opaque() const { return lam != 0 || lamc != 0; }
    TScalar operator*(const Scalar& c) const { return {q * c, lam, lamc}; }
    TScalar operator-() const { return {-q, lam, lamc}; }
};

// Finite bivariate prefactor in (z, w).
struct PolyPref {
    Poly p{2};
};

// Directed expansion of a rational function of one ratio variable
// x = mono * z^{ez} w^{ew}; the direction tag carries the paper's ± label.
struct DirectedPref {
    RationalFunction1 fn;
    Scalar mono = Scalar(1);
    int ez = 0, ew = 0;
    Direction dir = Direction::AtZero;
};

// delta(alpha * w / z): monomials alpha^n w^n z^{-n}, n over Z.
struct DeltaPref {
    Scalar alpha;
};

// One ordered factor: a fused chain of current leaves, all in one variable.
struct FactorBlock {
    int var = 0; // 0 = z, 1 = w
    std::vector<Leaf> leaves;
};

struct Term {
    TScalar coef;
    std::vector<PolyPref> polys;
    std::optional<DirectedPref> directed;
    std::optional<DeltaPref> delta;
    std::vector<FactorBlock> factors; // operator order, leftmost first
};

// One identity sum(terms) == 0 in one or two formal variables.
struct Relation {
    std::vector<Term> terms;
};

struct ModeTerm {
    TScalar coef;
    std::vector<std::pair<Atom, long>> ops; // operator order, leftmost first
};
struct ModeRel {
    std::string label;
    std::vector<ModeTerm> terms;
};

// A named relation with its applicability notes. Either a current relation
// (one or more subrelations in the term language) or a family of mode-level
// relations (Serre component form, the Cartan commutator).
struct RelationTemplate {
    std::string name;
    std::string family;
    int nvars = 2;
    std::vector<Relation> subrelations;
    std::vector<ModeRel> mode_relations;
    std::string note;
    bool requires_x_zero = false;

    bool is_mode_template() const { return !mode_relations.empty(); }
};

struct LambdaLeak : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exact coefficient of z^{-a} w^{-b} of a term applied to a basis vector.
// For one-variable relations pass b = 0; w never occurs there.
// `reverse_order` evaluates products left-to-right (right-module semantics).
Vec eval_term(const Term& term, const Evaluator& ev, const BasisKey& key, long a, long b,
              bool reverse_order);

Vec eval_mode_term(const ModeTerm& term, const Evaluator& ev, const BasisKey& key,
                   bool reverse_order);

} // namespace toroidal
