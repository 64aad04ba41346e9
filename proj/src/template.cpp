#include "toroidal/template.hpp"

#include <fmt/format.h>

namespace toroidal {

namespace {

struct Mono {
    long pz, pw;
    Scalar c;
};

// Expand the product of the finite polynomial prefactors.
std::vector<Mono> poly_monomials(const Term& t) {
    Poly acc = Poly::constant(2, Scalar(1));
    for (auto& pp : t.polys) acc *= pp.p;
    std::vector<Mono> out;
    for (auto& [e, c] : acc.terms()) out.push_back({e[0], e[1], c});
    return out;
}

struct VarPlan {
    const FactorBlock* block = nullptr;      // at most one block per variable
    std::optional<FusionTree> tree;
};

} // namespace

Vec eval_term(const Term& term, const Evaluator& ev, const BasisKey& key, long a, long b,
              bool reverse_order) {
    if (term.directed && term.delta)
        throw std::logic_error("eval_term: a term carries at most one infinite prefactor");

    // Arrange factors. Operator order: leftmost factor acts last.
    std::vector<FactorBlock> factors = term.factors;
    if (reverse_order) std::reverse(factors.begin(), factors.end());

    VarPlan plan[2];
    for (auto& f : factors) {
        if (f.var < 0 || f.var > 1) throw std::logic_error("eval_term: bad variable tag");
        if (plan[f.var].block)
            throw TruncationUnsound("eval_term: two factor blocks share one variable");
        plan[f.var].block = &f;
        plan[f.var].tree = FusionTree::chain(f.leaves);
    }

    const auto monos = poly_monomials(term);

    long dkey = 0;
    bool graded = true;
    try {
        dkey = ev.module().degree(key);
    } catch (...) {
        graded = false;
    }

    // Apply the ordered factor blocks at the given per-variable total modes.
    auto apply_blocks = [&](long zTot, long wTot) -> Vec {
        // absent blocks force their variable's total to zero
        if (!plan[0].block && zTot != 0) return {};
        if (!plan[1].block && wTot != 0) return {};
        Vec cur = Vec::unit(key);
        for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
            long m = it->var == 0 ? zTot : wTot;
            cur = ev.tree_mode(*plan[it->var].tree, m, cur);
            if (cur.is_zero()) return cur;
        }
        return cur;
    };

    // Mode bounds for the infinite-prefactor sums. The first-applied
    // (rightmost) block may use the annihilation bound from the grading;
    // any later block only its intrinsic one-sidedness.
    auto block_bounds = [&](int var) -> Evaluator::ModeBounds {
        if (!plan[var].block) return {0L, 0L}; // pinned to the empty product
        bool first_applied = !factors.empty() && factors.back().var == var;
        if (first_applied && graded) return ev.tree_bounds(*plan[var].tree, dkey);
        // intrinsic bounds only: ask with a degree making the annihilation
        // bound unusable, then drop it
        Evaluator::ModeBounds mb = ev.tree_bounds(*plan[var].tree, 0);
        if (mb.lo && mb.hi && *mb.hi < *mb.lo) return mb; // identically zero
        std::vector<Leaf> ls;
        plan[var].tree->collect_leaves(ls);
        bool all_le0 = true, all_ge0 = true;
        for (auto& l : ls) {
            Sidedness s = ev.module().sidedness(l.atom);
            all_ge0 = all_ge0 && s == Sidedness::ModesGE0;
            all_le0 = all_le0 && s == Sidedness::ModesLE0;
        }
        Evaluator::ModeBounds out;
        if (all_ge0) out.lo = 0;
        if (all_le0) out.hi = 0;
        return out;
    };

    Vec acc;
    auto accumulate = [&](long zTot, long wTot, const Scalar& c) {
        Vec part = apply_blocks(zTot, wTot);
        if (part.is_zero()) return;
        if (term.coef.opaque())
            throw LambdaLeak("opaque unit multiplies a nonzero vector in term evaluation");
        acc += part *= c * term.coef.q;
    };

    if (!term.directed && !term.delta) {
        for (auto& m : monos) accumulate(a + m.pz, b + m.pw, m.c);
        return acc;
    }

    // exponent direction of the infinite prefactor: monomial n contributes
    // z^{ez*n} w^{ew*n} (delta: ez=-1, ew=+1)
    int ez, ew;
    std::optional<long> series_lo, series_hi;
    DirectedSeries series(Direction::AtZero, 0, 0);
    Scalar mono_scale(1);
    if (term.delta) {
        ez = -1;
        ew = +1;
        mono_scale = term.delta->alpha;
    } else {
        ez = term.directed->ez;
        ew = term.directed->ew;
        mono_scale = term.directed->mono;
        series = term.directed->fn.expand(term.directed->dir, 96);
        series_lo = series.lo();
        series_hi = series.hi();
    }

    // Solve the n-window: for each variable, zTot = a + ez*n (resp. w) must
    // lie inside that variable's block bounds.
    std::optional<long> nlo, nhi;
    auto tighten = [&](std::optional<long> lo, std::optional<long> hi, long base, int dir) {
        // bound: lo <= base + dir*n <= hi  with dir in {-1, +1}
        if (dir == 0) return;
        if (lo) {
            long v = dir > 0 ? *lo - base : base - *lo; // n >= v (дir>0) / n <= v
            if (dir > 0) nlo = nlo ? std::max(*nlo, v) : v;
            else nhi = nhi ? std::min(*nhi, v) : v;
        }
        if (hi) {
            long v = dir > 0 ? *hi - base : base - *hi;
            if (dir > 0) nhi = nhi ? std::min(*nhi, v) : v;
            else nlo = nlo ? std::max(*nlo, v) : v;
        }
    };
    auto zb = block_bounds(0);
    auto wb = block_bounds(1);
    if (zb.lo && zb.hi && *zb.hi < *zb.lo) return acc; // zero block
    if (wb.lo && wb.hi && *wb.hi < *wb.lo) return acc;
    tighten(zb.lo, zb.hi, a, ez);
    tighten(wb.lo, wb.hi, b, ew);
    // polynomial prefactor shifts widen the window by their exponent spread
    long pz_min = 0, pz_max = 0, pw_min = 0, pw_max = 0;
    for (auto& m : monos) {
        pz_min = std::min(pz_min, m.pz);
        pz_max = std::max(pz_max, m.pz);
        pw_min = std::min(pw_min, m.pw);
        pw_max = std::max(pw_max, m.pw);
    }
    long spread = std::max(pz_max - pz_min, pw_max - pw_min);
    if (nlo) *nlo -= spread;
    if (nhi) *nhi += spread;

    if (term.delta) {
        if (!nlo || !nhi) throw TruncationUnsound("eval_term: unbounded delta summation");
    } else if (term.directed->dir == Direction::AtZero) {
        // coefficients below the leading exponent vanish exactly; the tail
        // side must be pinned by the factor blocks
        if (!nhi) throw TruncationUnsound("eval_term: unbounded directed summation (tail)");
        if (*nhi > *series_hi)
            throw TruncationUnsound("eval_term: directed prefactor window exhausted");
        nlo = nlo ? std::max(*nlo, *series_lo) : *series_lo;
    } else {
        if (!nlo) throw TruncationUnsound("eval_term: unbounded directed summation (tail)");
        if (*nlo < *series_lo)
            throw TruncationUnsound("eval_term: directed prefactor window exhausted");
        nhi = nhi ? std::min(*nhi, *series_hi) : *series_hi;
    }

    for (long n = *nlo; n <= *nhi; ++n) {
        Scalar cn = mono_scale.pow(n);
        if (term.directed) {
            auto c = series.coeff(n);
            if (!c) throw TruncationUnsound("eval_term: directed coefficient outside window");
            if (c->is_zero()) continue;
            cn = *c * term.directed->mono.pow(n);
        }
        for (auto& m : monos) accumulate(a + m.pz + ez * n, b + m.pw + ew * n, m.c * cn);
    }
    return acc;
}

Vec eval_mode_term(const ModeTerm& term, const Evaluator& ev, const BasisKey& key,
                   bool reverse_order) {
    std::vector<std::pair<Atom, long>> ops = term.ops;
    if (reverse_order) std::reverse(ops.begin(), ops.end());
    Vec cur = Vec::unit(key);
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        cur = ev.module().apply({}, it->first, it->second, cur);
        if (cur.is_zero()) break;
    }
    if (!cur.is_zero() && term.coef.opaque())
        throw LambdaLeak("opaque unit multiplies a nonzero vector in mode term");
    return cur *= term.coef.q;
}

} // namespace toroidal
