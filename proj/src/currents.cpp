#include "toroidal/currents.hpp"

#include <fmt/format.h>

namespace toroidal {

std::string Leaf::str() const {
    std::string s = atom.str();
    if (!(arg == Scalar(1))) s += "@" + arg.str();
    for (int x : leg) s += fmt::format(".{}", x);
    return s;
}

FusionTree FusionTree::chain(const std::vector<Leaf>& leaves) {
    if (leaves.empty()) throw std::logic_error("FusionTree::chain: empty");
    // right comb: evaluation is right-to-left, so every right-subtree window
    // is anchored to the original vector's degree rather than to intermediate
    // creation depths
    FusionTree t(leaves.back());
    for (std::size_t i = leaves.size() - 1; i-- > 0;) t = FusionTree(FusionTree(leaves[i]), std::move(t));
    return t;
}

void FusionTree::collect_leaves(std::vector<Leaf>& out) const {
    if (is_leaf()) {
        out.push_back(leaf());
        return;
    }
    left().collect_leaves(out);
    right().collect_leaves(out);
}

std::string FusionTree::str() const {
    if (is_leaf()) return leaf().str();
    return "(" + left().str() + " " + right().str() + ")";
}

Vec Evaluator::leaf_mode(const Leaf& l, long mode, const Vec& v) const {
    Vec out = mod_->apply(l.leg, l.atom, mode, v);
    if (!(l.arg == Scalar(1))) out *= l.arg.pow(-mode);
    return out;
}

ExchangeRule Evaluator::pair_rule(const Leaf& a, const Leaf& b) const {
    // Disjoint tensor legs commute regardless of atom kinds.
    auto disjoint = [](const std::vector<int>& x, const std::vector<int>& y) {
        if (x.empty() || y.empty()) return false; // whole-module overlaps everything
        std::size_t n = std::min(x.size(), y.size());
        for (std::size_t i = 0; i < n; ++i)
            if (x[i] != y[i]) return true;
        return false;
    };
    if (disjoint(a.leg, b.leg)) {
        Poly one = Poly::constant(2, Scalar(1));
        return ExchangeRule{one, one};
    }
    if (a.leg != b.leg)
        throw TruncationUnsound("no exchange rule between nested-leg factors: " + a.str() + " / " +
                                b.str());
    Scalar lp = mod_->level_at(a.leg, Family::Plain);
    Scalar lc = mod_->level_at(a.leg, Family::Checked);
    auto rule = exchange_rule(mod_->spec(), a.atom, b.atom, lp, lc);
    if (!rule)
        throw TruncationUnsound("no exchange rule for pair: " + a.str() + " / " + b.str());
    // substitute the argument monomials: A(arg_a z), B(arg_b w)
    return ExchangeRule{rule->gAB.scale_vars({a.arg, b.arg}), rule->gBA.scale_vars({a.arg, b.arg})};
}

Evaluator::ModeBounds Evaluator::tree_bounds(const FusionTree& t, long vec_degree) const {
    std::vector<Leaf> leaves;
    t.collect_leaves(leaves);
    ModeBounds b;
    for (auto& l : leaves)
        if (mod_->atom_is_zero(l.atom)) {
            // identically zero: empty mode range
            b.lo = 0;
            b.hi = -1;
            return b;
        }
    bool all_ge0 = true, all_le0 = true;
    for (auto& l : leaves) {
        Sidedness s = mod_->sidedness(l.atom);
        all_ge0 = all_ge0 && s == Sidedness::ModesGE0;
        all_le0 = all_le0 && s == Sidedness::ModesLE0;
    }
    if (all_ge0) b.lo = 0;
    if (mod_->admissible()) b.hi = mod_->top_degree() - vec_degree;
    if (all_le0) b.hi = b.hi ? std::min(*b.hi, 0L) : 0L;
    return b;
}

Vec Evaluator::tree_mode(const FusionTree& t, long mode, const Vec& v) const {
    Vec out;
    bool adm = mod_->admissible();
    long T = adm ? mod_->top_degree() : 0;
    for (auto& [key, c] : v.terms()) {
        if (adm && mod_->degree(key) + mode > T) continue; // lands above the top
        Vec part = tree_mode_key(t, mode, key);
        out += part *= c;
    }
    return out;
}

namespace {

// component of a pair key along a leg path, plus reassembly
const BasisKey* leg_component(const BasisKey& key, const std::vector<int>& leg, std::size_t i = 0) {
    if (i == leg.size()) return &key;
    if (key.kind() != BasisKey::Kind::Pair) return nullptr;
    return leg_component(leg[i] == 0 ? key.left() : key.right(), leg, i + 1);
}
BasisKey leg_rebuild(const BasisKey& key, const std::vector<int>& leg, const BasisKey& sub,
                     std::size_t i = 0) {
    if (i == leg.size()) return sub;
    if (leg[i] == 0) return BasisKey::pair(leg_rebuild(key.left(), leg, sub, i + 1), key.right());
    return BasisKey::pair(key.left(), leg_rebuild(key.right(), leg, sub, i + 1));
}

} // namespace

// Fock-native normal-ordered evaluation of a same-family exponential chain;
// nullopt when the tree is not eligible for the fast path.
std::optional<Vec> Evaluator::vertex_fast_path(const std::vector<Leaf>& leaves, long mode,
                                               const BasisKey& key) const {
    if (leaves.empty()) return std::nullopt;
    const std::vector<int>& leg = leaves.front().leg;
    for (auto& l : leaves)
        if (l.leg != leg) return std::nullopt;
    auto sub = mod_->leg_module(leg);
    auto fock = dynamic_cast<const FockHandle*>(sub);
    if (!fock) return std::nullopt;
    Family fam = fock->realized();
    for (auto& l : leaves) {
        if (l.atom.fam != fam) return std::nullopt;
        switch (l.atom.kind) {
        case AtomKind::E:
        case AtomKind::F:
        case AtomKind::PsiP:
        case AtomKind::PsiM:
        case AtomKind::K0P:
        case AtomKind::K0M: break;
        default: return std::nullopt;
        }
    }
    const BasisKey* comp = leg_component(key, leg);
    if (!comp) return std::nullopt;
    FockAction act(fock->spec(), fock->color(), fock->parameter(), fam);
    std::vector<FockAction::VertexFactor> fs;
    for (auto& l : leaves) fs.push_back(act.vertex_factor(l.atom.kind, l.atom.inverted, l.arg));
    Vec subv;
    try {
        subv = act.product_mode(fs, mode, *comp);
    } catch (const std::domain_error& e) {
        throw IllDefinedFusion(e.what());
    }
    if (leg.empty()) return subv;
    Vec out;
    for (auto& [k, c] : subv.terms()) out.add(leg_rebuild(key, leg, k), c);
    return out;
}

Vec Evaluator::tree_mode_key(const FusionTree& t, long mode, const BasisKey& key) const {
    if (t.is_leaf()) return leaf_mode(t.leaf(), mode, Vec::unit(key));

    std::string sig = t.str();
    {
        std::scoped_lock lk(mu_);
        auto it = memo_.find({sig, mode, key});
        if (it != memo_.end()) return it->second;
    }

    Vec result;
    std::vector<Leaf> all;
    t.collect_leaves(all);
    bool any_zero = false;
    for (auto& l : all)
        if (mod_->atom_is_zero(l.atom)) any_zero = true;

    if (!any_zero && fast_) {
        if (auto fast = vertex_fast_path(all, mode, key)) {
            std::scoped_lock lk(mu_);
            memo_.emplace(std::make_tuple(sig, mode, key), *fast);
            return *fast;
        }
    }
    if (!any_zero) {
        if (!mod_->admissible())
            throw TruncationUnsound("fused product on a module without admissibility bounds: " +
                                    sig);
        long d = mod_->degree(key);
        long T = mod_->top_degree();
        const FusionTree& A = t.left();
        const FusionTree& B = t.right();

        ModeBounds bb = tree_bounds(B, d);
        if (bb.lo && bb.hi) {
            // native path: the right factor has an intrinsically finite range
            for (long b = *bb.lo; b <= *bb.hi; ++b) {
                Vec y = tree_mode_key(B, b, key);
                if (y.is_zero()) continue;
                result += tree_mode(A, mode - b, y);
            }
        } else {
            // exchange path
            std::vector<Leaf> la, lb;
            A.collect_leaves(la);
            B.collect_leaves(lb);
            Poly G1 = Poly::constant(2, Scalar(1)), G2 = Poly::constant(2, Scalar(1));
            for (auto& x : la)
                for (auto& y : lb) {
                    ExchangeRule r = pair_rule(x, y);
                    G1 *= r.gAB;
                    G2 *= r.gBA;
                }
            int D1 = 0, D2 = 0;
            if (!G1.homogeneous(&D1) || !G2.homogeneous(&D2) || D1 != D2)
                throw std::logic_error("exchange polynomials must be homogeneous of equal degree");
            Scalar gamma = G1.eval({Scalar(1), Scalar(1)});
            if (gamma.is_zero())
                throw IllDefinedFusion("g1(z, alpha z) = 0 for fused product " + sig);

            long qmin = G1.min_exp(1), qmax = G1.max_exp(1);
            long pmin = G2.min_exp(0), pmax = G2.max_exp(0);
            // window: B-modes b+q within B's bounds; A-modes a+p (a = mode-D-b)
            // within A's bounds; one-sided factors tighten both ends
            ModeBounds ba = tree_bounds(A, d);
            ModeBounds bbd = tree_bounds(B, d);
            if (!ba.hi || !bbd.hi)
                throw TruncationUnsound("fused product without annihilation bounds: " + sig);
            long bhi = *bbd.hi - qmin;
            long blo = (mode - D1) - *ba.hi + pmin;
            if (bbd.lo) blo = std::max(blo, *bbd.lo - qmax);
            if (ba.lo) bhi = std::min(bhi, (mode - D1) - *ba.lo + pmax);
            for (long b = blo - pad_; b <= bhi + pad_; ++b) {
                long a = mode - D1 - b;
                Vec pab;
                for (auto& [exps, c] : G1.terms()) {
                    Vec y = tree_mode_key(B, b + exps[1], key);
                    if (y.is_zero()) continue;
                    Vec x = tree_mode(A, a + exps[0], y);
                    pab += x *= c;
                }
                if (b < blo || b > bhi) {
                    if (!pab.is_zero())
                        throw TruncationUnsound(fmt::format(
                            "window unsound for {} at mode {}: P({},{}) != 0", sig, mode, a, b));
                } else {
                    result += pab;
                }
            }
            result *= gamma.inv();
        }
    }

    std::scoped_lock lk(mu_);
    memo_.emplace(std::make_tuple(sig, mode, key), result);
    return result;
}

// --- named currents --------------------------------------------------------

namespace {

std::vector<Leaf> e_chain(Family fam, int r, const Scalar& arg, const Scalar& step) {
    std::vector<Leaf> ls;
    Scalar a = arg;
    for (int j = 0; j < r; ++j) {
        ls.push_back(Leaf{Atom::make(fam, AtomKind::E), a, {}});
        a *= step;
    }
    return ls;
}

std::vector<Leaf> f_chain(Family fam, int r, const Scalar& arg, const Scalar& step) {
    std::vector<Leaf> ls;
    for (int j = r - 1; j >= 0; --j)
        ls.push_back(Leaf{Atom::make(fam, AtomKind::F), arg * step.pow(j), {}});
    return ls;
}

} // namespace

WeightedTree named_e_r(const ParamSpec& spec, Family fam, int r, const Scalar& arg) {
    if (r < 0) throw std::invalid_argument("named_e_r: r >= 0");
    if (r == 0) return {Scalar(1), {}};
    return {spec.c(1, fam).pow(r), e_chain(fam, r, arg, spec.q(1, fam))};
}

WeightedTree named_f_r(const ParamSpec& spec, Family fam, int r, const Scalar& arg) {
    if (r < 0) throw std::invalid_argument("named_f_r: r >= 0");
    if (r == 0) return {Scalar(1), {}};
    return {(-spec.c(1, fam)).pow(r), f_chain(fam, r, arg, spec.q(1, fam))};
}

WeightedTree named_psi_r(const ParamSpec& spec, Family fam, int sign, int r, const Scalar& arg) {
    if (r < 0) throw std::invalid_argument("named_psi_r: r >= 0");
    std::vector<Leaf> ls;
    Scalar a = arg;
    for (int j = 0; j < r; ++j) {
        ls.push_back(Leaf{Atom::make(fam, sign > 0 ? AtomKind::PsiP : AtomKind::PsiM), a, {}});
        a *= spec.q(1, fam);
    }
    return {Scalar(1), ls};
}

WeightedTree named_k_r(const ParamSpec& spec, Family fam, int sign, int r, const Scalar& arg) {
    if (r < 0) throw std::invalid_argument("named_k_r: r >= 0");
    Scalar step = spec.k_chain_step(fam);
    WeightedTree out;
    if (sign > 0) {
        out.coef = (-spec.c(1, fam)).pow(r);
        out.leaves = f_chain(fam, r, arg, step);
        out.leaves.push_back(Leaf{Atom::make(fam, AtomKind::K0P), arg, {}});
    } else {
        out.coef = spec.c(1, fam).pow(r);
        out.leaves = {Leaf{Atom::make(fam, AtomKind::K0M), arg, {}}};
        auto es = e_chain(fam, r, arg, step);
        out.leaves.insert(out.leaves.end(), es.begin(), es.end());
    }
    return out;
}

// --- CurrentExpr ------------------------------------------------------------

CurrentExpr CurrentExpr::atom(Atom a) {
    CurrentExpr e;
    e.node_ = AtomNode{a};
    return e;
}
CurrentExpr CurrentExpr::shift(CurrentExpr c, Scalar a) {
    CurrentExpr e;
    e.node_ = ShiftNode{std::move(a)};
    e.kids_.push_back(std::make_shared<CurrentExpr>(std::move(c)));
    return e;
}
CurrentExpr CurrentExpr::fused(CurrentExpr a, CurrentExpr b) {
    CurrentExpr e;
    e.node_ = FusedNode{};
    e.kids_.push_back(std::make_shared<CurrentExpr>(std::move(a)));
    e.kids_.push_back(std::make_shared<CurrentExpr>(std::move(b)));
    return e;
}
CurrentExpr CurrentExpr::scaled(Scalar c, CurrentExpr x) {
    CurrentExpr e;
    e.node_ = ScaledNode{std::move(c)};
    e.kids_.push_back(std::make_shared<CurrentExpr>(std::move(x)));
    return e;
}
CurrentExpr CurrentExpr::series_scaled(DirectedSeries s, CurrentExpr x) {
    CurrentExpr e;
    e.node_ = SeriesNode{std::make_shared<const DirectedSeries>(std::move(s))};
    e.kids_.push_back(std::make_shared<CurrentExpr>(std::move(x)));
    return e;
}
CurrentExpr CurrentExpr::sum(std::vector<CurrentExpr> es) {
    CurrentExpr e;
    e.node_ = SumNode{};
    for (auto& x : es) e.kids_.push_back(std::make_shared<CurrentExpr>(std::move(x)));
    return e;
}
CurrentExpr CurrentExpr::cartan_inverse(CurrentExpr x) {
    // construction-time restriction: every atom in x must be an exponential
    // Cartan current
    CurrentExpr e;
    e.node_ = InverseNode{};
    e.kids_.push_back(std::make_shared<CurrentExpr>(std::move(x)));
    auto pieces = e.flatten(); // throws on non-Cartan content
    (void)pieces;
    return e;
}
CurrentExpr CurrentExpr::coproduct_lift(CurrentExpr x, int factors) {
    if (factors < 2) throw std::invalid_argument("coproduct_lift: factors >= 2");
    CurrentExpr e;
    e.node_ = LiftNode{factors};
    e.kids_.push_back(std::make_shared<CurrentExpr>(std::move(x)));
    return e;
}

namespace {

FusionTree tree_scale(const FusionTree& t, const Scalar& a) {
    if (t.is_leaf()) {
        Leaf l = t.leaf();
        l.arg *= a;
        return FusionTree(l);
    }
    return FusionTree(tree_scale(t.left(), a), tree_scale(t.right(), a));
}

bool tree_all_cartan(const FusionTree& t) {
    std::vector<Leaf> ls;
    t.collect_leaves(ls);
    for (auto& l : ls) {
        auto k = l.atom.kind;
        if (k != AtomKind::PsiP && k != AtomKind::PsiM && k != AtomKind::K0P && k != AtomKind::K0M)
            return false;
    }
    return true;
}

FusionTree tree_invert(const FusionTree& t) {
    if (t.is_leaf()) {
        Leaf l = t.leaf();
        l.atom.inverted = !l.atom.inverted;
        return FusionTree(l);
    }
    return FusionTree(tree_invert(t.left()), tree_invert(t.right()));
}

} // namespace

std::vector<CurrentExpr::Piece> CurrentExpr::flatten() const {
    std::vector<Piece> out;
    if (std::holds_alternative<AtomNode>(node_)) {
        out.push_back(Piece{Scalar(1), nullptr, FusionTree(Leaf{std::get<AtomNode>(node_).a})});
    } else if (std::holds_alternative<ShiftNode>(node_)) {
        Scalar a = std::get<ShiftNode>(node_).a;
        for (auto& p : kids_[0]->flatten()) {
            Piece q{p.coef, p.series, tree_scale(p.tree, a)};
            if (q.series) q.series = std::make_shared<const DirectedSeries>(q.series->arg_scale(a));
            out.push_back(std::move(q));
        }
    } else if (std::holds_alternative<FusedNode>(node_)) {
        auto ps = kids_[0]->flatten();
        auto qs = kids_[1]->flatten();
        for (auto& p : ps)
            for (auto& q : qs) {
                if (p.series && q.series)
                    throw std::logic_error("CurrentExpr: fused product of two series multiples");
                out.push_back(Piece{p.coef * q.coef, p.series ? p.series : q.series,
                                    FusionTree(p.tree, q.tree)});
            }
    } else if (std::holds_alternative<ScaledNode>(node_)) {
        for (auto& p : kids_[0]->flatten()) {
            out.push_back(Piece{p.coef * std::get<ScaledNode>(node_).c, p.series, p.tree});
        }
    } else if (std::holds_alternative<SeriesNode>(node_)) {
        for (auto& p : kids_[0]->flatten()) {
            if (p.series) throw std::logic_error("CurrentExpr: nested series multiples");
            out.push_back(Piece{p.coef, std::get<SeriesNode>(node_).s, p.tree});
        }
    } else if (std::holds_alternative<SumNode>(node_)) {
        for (auto& k : kids_)
            for (auto& p : k->flatten()) out.push_back(p);
    } else if (std::holds_alternative<InverseNode>(node_)) {
        auto ps = kids_[0]->flatten();
        if (ps.size() != 1 || ps[0].series)
            throw std::logic_error("CartanInverse: operand must be a single Cartan product");
        if (!tree_all_cartan(ps[0].tree))
            throw std::logic_error("CartanInverse: only psi^± / k0^± products are invertible");
        out.push_back(Piece{ps[0].coef.inv(), nullptr, tree_invert(ps[0].tree)});
    } else if (std::holds_alternative<LiftNode>(node_)) {
        out = kids_[0]->flatten(); // atoms act through Delta on tensor modules
    }
    return out;
}

Vec CurrentExpr::mode_apply(long mode, const Vec& v, const Evaluator& ev) const {
    Vec out;
    for (auto& p : flatten()) {
        if (!p.series) {
            Vec t = ev.tree_mode(p.tree, mode, v);
            out += t *= p.coef;
            continue;
        }
        // (S * X)(z) at mode M: sum_j S_j X_{M+j}; the tree bounds must pin
        // every potentially nonzero j inside the series window.
        long dmin = 0;
        for (auto& [key, c] : v.terms()) dmin = std::min(dmin, ev.module().degree(key));
        auto bounds = ev.tree_bounds(p.tree, dmin);
        if (bounds.lo && bounds.hi && *bounds.hi < *bounds.lo) continue; // zero current
        if (!bounds.lo || !bounds.hi)
            throw TruncationUnsound("series multiple without two-sided mode bounds");
        if (*bounds.hi - mode > p.series->hi() || *bounds.lo - mode < p.series->lo())
            throw TruncationUnsound("series window too small for requested mode");
        long jlo = std::max(p.series->lo(), *bounds.lo - mode);
        long jhi = std::min(p.series->hi(), *bounds.hi - mode);
        for (long j = jlo; j <= jhi; ++j) {
            auto c = p.series->coeff(j);
            if (!c || c->is_zero()) continue;
            Vec t = ev.tree_mode(p.tree, mode + j, v);
            out += t *= (*c * p.coef);
        }
    }
    return out;
}

std::string CurrentExpr::sexpr() const {
    if (std::holds_alternative<AtomNode>(node_)) return std::get<AtomNode>(node_).a.str();
    if (std::holds_alternative<ShiftNode>(node_))
        return fmt::format("(shift {} {})", std::get<ShiftNode>(node_).a.str(), kids_[0]->sexpr());
    if (std::holds_alternative<FusedNode>(node_))
        return fmt::format("(fuse {} {})", kids_[0]->sexpr(), kids_[1]->sexpr());
    if (std::holds_alternative<ScaledNode>(node_))
        return fmt::format("(scale {} {})", std::get<ScaledNode>(node_).c.str(), kids_[0]->sexpr());
    if (std::holds_alternative<SeriesNode>(node_))
        return fmt::format("(series-scale <{} coeffs> {})",
                           std::get<SeriesNode>(node_).s->nonzero().size(), kids_[0]->sexpr());
    if (std::holds_alternative<SumNode>(node_)) {
        std::string s = "(sum";
        for (auto& k : kids_) s += " " + k->sexpr();
        return s + ")";
    }
    if (std::holds_alternative<InverseNode>(node_))
        return fmt::format("(cartan-inverse {})", kids_[0]->sexpr());
    return fmt::format("(lift {} {})", std::get<LiftNode>(node_).factors, kids_[0]->sexpr());
}

FusionInfo fuse_info(const ParamSpec& spec, const Atom& a, const Atom& b, const Scalar& alpha,
                     const Scalar& levelPlain, const Scalar& levelChecked) {
    auto rule = exchange_rule(spec, a, b, levelPlain, levelChecked);
    if (!rule) throw IllDefinedFusion("no exchange rule for " + a.str() + " / " + b.str());
    Scalar g1 = rule->gAB.eval({Scalar(1), alpha});
    if (g1.is_zero())
        throw IllDefinedFusion(fmt::format("g1(z, {} z) = 0: fusion ill-defined", alpha.str()));
    Scalar g2 = rule->gBA.eval({Scalar(1), alpha});
    FusionInfo info;
    info.swappable = !g2.is_zero();
    info.swap_constant = info.swappable ? g2 / g1 : Scalar(0);
    return info;
}

} // namespace toroidal
