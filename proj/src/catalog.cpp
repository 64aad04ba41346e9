#include "toroidal/catalog.hpp"

#include <fmt/format.h>

namespace toroidal {

namespace {

constexpr int Z = 0, W = 1;

Leaf leafP(AtomKind k, const Scalar& arg = Scalar(1), long idx = 0) {
    return Leaf{Atom::make(Family::Plain, k, idx), arg, {}};
}
Leaf leafF(Family f, AtomKind k, const Scalar& arg = Scalar(1), long idx = 0) {
    return Leaf{Atom::make(f, k, idx), arg, {}};
}

FactorBlock block(int var, std::vector<Leaf> ls) { return FactorBlock{var, std::move(ls)}; }

Term term(const Scalar& c, std::vector<FactorBlock> fs) {
    Term t;
    t.coef = TScalar{c, 0, 0};
    t.factors = std::move(fs);
    return t;
}

Term& with_poly(Term& t, Poly p) {
    t.polys.push_back(PolyPref{std::move(p)});
    return t;
}
Term& with_delta(Term& t, const Scalar& alpha) {
    t.delta = DeltaPref{alpha};
    return t;
}
// x = mono * z/w (zw=true) or mono * w/z (zw=false)
Term& with_directed(Term& t, const RationalFunction1& fn, const Scalar& mono, bool zw,
                    Direction dir) {
    t.directed = DirectedPref{fn, mono, zw ? 1 : -1, zw ? -1 : 1, dir};
    return t;
}

RelationTemplate make(const std::string& family, const std::string& name, int nvars,
                      std::vector<Relation> subs, std::string note = "") {
    RelationTemplate t;
    t.family = family;
    t.name = name;
    t.nvars = nvars;
    t.subrelations = std::move(subs);
    t.note = std::move(note);
    return t;
}

// --- E1 defining relations -------------------------------------------------

std::vector<RelationTemplate> e1_defining(const ModuleHandle& mod, const CatalogOptions& opt,
                                          Family fam) {
    const ParamSpec& P = mod.spec();
    Scalar C = mod.level(fam);
    Scalar Cc = mod.level(other(fam));
    Scalar lp = fam == Family::Plain ? C : Cc; // plain-family level for the rule table
    Scalar lc = fam == Family::Plain ? Cc : C;
    auto rule = [&](AtomKind a, AtomKind b) {
        auto r = exchange_rule(P, Atom::make(fam, a), Atom::make(fam, b), lp, lc);
        if (!r) throw std::logic_error("missing exchange rule in catalog");
        return *r;
    };
    auto exch_template = [&](const std::string& name, AtomKind a, AtomKind b,
                             std::string note = "") {
        // gAB * A(z)B(w) - gBA * B(w)A(z) == 0
        ExchangeRule r = rule(a, b);
        Term t1 = term(Scalar(1), {block(Z, {leafF(fam, a)}), block(W, {leafF(fam, b)})});
        with_poly(t1, r.gAB);
        Term t2 = term(Scalar(-1), {block(W, {leafF(fam, b)}), block(Z, {leafF(fam, a)})});
        with_poly(t2, r.gBA);
        return make("e1_defining", name, 2, {Relation{{t1, t2}}}, std::move(note));
    };

    std::vector<RelationTemplate> out;
    // [psi^±(z), psi^±(w)] = 0
    for (int sgn : {+1, -1}) {
        AtomKind k = sgn > 0 ? AtomKind::PsiP : AtomKind::PsiM;
        Term t1 = term(Scalar(1), {block(Z, {leafF(fam, k)}), block(W, {leafF(fam, k)})});
        Term t2 = term(Scalar(-1), {block(W, {leafF(fam, k)}), block(Z, {leafF(fam, k)})});
        out.push_back(make("e1_defining", sgn > 0 ? "psi_psi_plus" : "psi_psi_minus", 2,
                           {Relation{{t1, t2}}}));
    }
    out.push_back(exch_template("psi_psi_mixed", AtomKind::PsiP, AtomKind::PsiM,
                                "cleared polynomial form of the g-ratio relation"));
    {
        RelationTemplate pe = exch_template("psi_e", AtomKind::PsiP, AtomKind::E);
        RelationTemplate pe2 = exch_template("psi_e", AtomKind::PsiM, AtomKind::E);
        pe.subrelations.push_back(pe2.subrelations[0]);
        pe.note = "both signs of psi against e";
        out.push_back(pe);
        RelationTemplate pf = exch_template("psi_f", AtomKind::PsiP, AtomKind::F);
        RelationTemplate pf2 = exch_template("psi_f", AtomKind::PsiM, AtomKind::F);
        pf.subrelations.push_back(pf2.subrelations[0]);
        pf.note = "both signs of psi against f";
        out.push_back(pf);
    }
    {
        // [e(z), f(w)] = (1/kappa1)(delta(Cw/z) psi^+(w) - delta(Cz/w) psi^-(z))
        Scalar k1inv = P.kappa(1, fam).inv();
        Term t1 = term(Scalar(1), {block(Z, {leafF(fam, AtomKind::E)}),
                                   block(W, {leafF(fam, AtomKind::F)})});
        Term t2 = term(Scalar(-1), {block(W, {leafF(fam, AtomKind::F)}),
                                    block(Z, {leafF(fam, AtomKind::E)})});
        Term t3 = term(-k1inv, {block(W, {leafF(fam, AtomKind::PsiP)})});
        with_delta(t3, C);
        Term t4 = term(k1inv, {block(Z, {leafF(fam, AtomKind::PsiM)})});
        with_delta(t4, C.inv());
        out.push_back(make("e1_defining", "ef_delta", 2, {Relation{{t1, t2, t3, t4}}}));
    }
    out.push_back(exch_template("ee", AtomKind::E, AtomKind::E));
    out.push_back(exch_template("ff", AtomKind::F, AtomKind::F));
    // Serre relations in component form: [x_n, [x_{n-1}, x_{n+1}]] = 0
    for (AtomKind k : {AtomKind::E, AtomKind::F}) {
        RelationTemplate t;
        t.family = "e1_defining";
        t.name = k == AtomKind::E ? "serre_e" : "serre_f";
        t.nvars = 0;
        Atom x = Atom::make(fam, k);
        for (int n = opt.serre_lo; n <= opt.serre_hi; ++n) {
            ModeRel mr;
            mr.label = fmt::format("n={}", n);
            auto mk = [&](long a, long b, long c, const Scalar& coef) {
                ModeTerm mt;
                mt.coef = TScalar{coef, 0, 0};
                mt.ops = {{x, a}, {x, b}, {x, c}};
                return mt;
            };
            mr.terms = {mk(n, n - 1, n + 1, Scalar(1)), mk(n, n + 1, n - 1, Scalar(-1)),
                        mk(n - 1, n + 1, n, Scalar(-1)), mk(n + 1, n - 1, n, Scalar(1))};
            t.mode_relations.push_back(std::move(mr));
        }
        out.push_back(std::move(t));
    }
    return out;
}

// --- lemma suites ------------------------------------------------------------

std::vector<RelationTemplate> lemma_level1(const ModuleHandle& mod) {
    auto fh = dynamic_cast<const FockHandle*>(&mod);
    if (!fh) throw UnknownFamily("lemma_level1 runs on single Fock modules");
    Family fam = fh->realized();
    const ParamSpec& P = mod.spec();
    Scalar qc = P.q(fh->color(), fam);
    Term t1 = term(Scalar(1), {block(Z, {leafF(fam, AtomKind::E), leafF(fam, AtomKind::E, qc)})});
    Term t2 = term(Scalar(1), {block(Z, {leafF(fam, AtomKind::F, qc), leafF(fam, AtomKind::F)})});
    return {make("lemma_level1", "level1_ee", 1, {Relation{{t1}}}),
            make("lemma_level1", "level1_ff", 1, {Relation{{t2}}})};
}

std::vector<RelationTemplate> lemma_zero_currents(const ModuleHandle& mod, Family fam) {
    const ParamSpec& P = mod.spec();
    Scalar C = mod.level(fam);
    std::vector<RelationTemplate> out;
    auto add = [&](const std::string& name, std::vector<Relation> subs) {
        out.push_back(make("lemma_zero_currents", name, 1, std::move(subs)));
    };
    std::vector<Relation> r1, r2, r3, r4;
    for (int i = 1; i <= 3; ++i) {
        Scalar qi = P.q(i, fam);
        r1.push_back(Relation{{term(Scalar(1), {block(Z, {leafF(fam, AtomKind::PsiP, C.inv()),
                                                          leafF(fam, AtomKind::E, qi)})})}});
        r2.push_back(Relation{{term(Scalar(1), {block(Z, {leafF(fam, AtomKind::E),
                                                          leafF(fam, AtomKind::PsiM, qi)})})}});
        r3.push_back(Relation{{term(Scalar(1), {block(Z, {leafF(fam, AtomKind::F, qi),
                                                          leafF(fam, AtomKind::PsiM, C.inv())})})}});
        r4.push_back(Relation{{term(Scalar(1), {block(Z, {leafF(fam, AtomKind::PsiP, qi),
                                                          leafF(fam, AtomKind::F)})})}});
    }
    add("zc_psiP_e", std::move(r1));
    add("zc_e_psiM", std::move(r2));
    add("zc_f_psiM", std::move(r3));
    add("zc_psiP_f", std::move(r4));
    add("zc_e_sq", {Relation{{term(Scalar(1), {block(Z, {leafF(fam, AtomKind::E),
                                                         leafF(fam, AtomKind::E)})})}}});
    add("zc_f_sq", {Relation{{term(Scalar(1), {block(Z, {leafF(fam, AtomKind::F),
                                                         leafF(fam, AtomKind::F)})})}}});
    return out;
}

std::vector<RelationTemplate> lemma_k0_difference(const ModuleHandle& mod, Family fam) {
    const ParamSpec& P = mod.spec();
    Scalar q1 = P.q(1, fam);
    Scalar psi0 = mod.psi0(fam);
    std::vector<RelationTemplate> out;
    {
        Term t1 = term(Scalar(1), {block(Z, {leafF(fam, AtomKind::K0P, q1)})});
        Term t2 = term(-psi0.inv(), {block(Z, {leafF(fam, AtomKind::PsiP),
                                               leafF(fam, AtomKind::K0P)})});
        out.push_back(make("lemma_k0_difference", "k0p_difference_eq", 1, {Relation{{t1, t2}}}));
    }
    {
        Term t1 = term(Scalar(1), {block(Z, {leafF(fam, AtomKind::K0M, q1)})});
        Term t2 = term(-psi0, {block(Z, {leafF(fam, AtomKind::PsiM), leafF(fam, AtomKind::K0M)})});
        out.push_back(make("lemma_k0_difference", "k0m_difference_eq", 1, {Relation{{t1, t2}}}));
    }
    return out;
}

std::vector<RelationTemplate> lemma_k_on_fock(const ModuleHandle& mod) {
    const ParamSpec& P = mod.spec();
    Family fam = Family::Plain;
    Scalar s1 = P.s(1, fam);
    std::vector<RelationTemplate> out;
    for (int r : {2, 3}) {
        for (int sgn : {+1, -1}) {
            auto k = named_k_r(P, fam, sgn, r);
            Term t = term(k.coef, {block(Z, k.leaves)});
            out.push_back(make("lemma_k_on_fock",
                               fmt::format("k{}{}_vanishes", r, sgn > 0 ? "p" : "m"), 1,
                               {Relation{{t}}}, "k_r with r >= 2 act by zero on F1"));
        }
    }
    for (int sgn : {+1, -1}) {
        // k0^±(s1 z) + k1^∓(z) = 0
        auto k0 = named_k_r(P, fam, sgn, 0, s1);
        auto k1 = named_k_r(P, fam, -sgn, 1);
        Term t1 = term(k0.coef, {block(Z, k0.leaves)});
        Term t2 = term(k1.coef, {block(Z, k1.leaves)});
        out.push_back(make("lemma_k_on_fock",
                           fmt::format("k0{}_plus_k1{}", sgn > 0 ? "p" : "m", sgn > 0 ? "m" : "p"),
                           1, {Relation{{t1, t2}}}));
    }
    return out;
}

std::vector<RelationTemplate> lemma_k_identity(const ModuleHandle& mod, const CatalogOptions& opt,
                                               Family fam) {
    const ParamSpec& P = mod.spec();
    Scalar C = mod.level(fam);
    Scalar q1 = P.q(1, fam);
    Scalar psi0 = mod.psi0(fam);
    Scalar cr = P.c(1, fam) / P.kappa(1, fam);
    RationalFunction1 om = P.omega(fam);
    std::vector<RelationTemplate> out;
    for (long r = 0; r <= opt.r_max; ++r) {
        Scalar qmr = q1.pow(-r);
        // identity 1: e(u) k-_r(q1^{-r}z) - w^-(z/u) k-_r(q1^{-r}z) e(u)
        //   = cr ( d(q1^{r+1}u/z) psi0 psi^-(u) k-_{r+1}(q1^{-r-1}z) - d(u/z) k-_{r+1}(q1^{-r}z) )
        {
            auto kr = named_k_r(P, fam, -1, r, qmr);
            auto kr1a = named_k_r(P, fam, -1, r + 1, q1.pow(-r - 1));
            auto kr1b = named_k_r(P, fam, -1, r + 1, qmr);
            Term t1 = term(kr.coef, {block(W, {leafF(fam, AtomKind::E)}), block(Z, kr.leaves)});
            Term t2 = term(-kr.coef, {block(Z, kr.leaves), block(W, {leafF(fam, AtomKind::E)})});
            with_directed(t2, om, Scalar(1), true, Direction::AtInfinity);
            Term t3 = term(-cr * psi0 * kr1a.coef,
                           {block(W, {leafF(fam, AtomKind::PsiM)}), block(Z, kr1a.leaves)});
            with_delta(t3, q1.pow(r + 1));
            Term t4 = term(cr * kr1b.coef, {block(Z, kr1b.leaves)});
            with_delta(t4, Scalar(1));
            out.push_back(make("lemma_k_identity", fmt::format("k_ident_1_r{}", r), 2,
                               {Relation{{t1, t2, t3, t4}}}));
        }
        // identity 2: e(u) k+_r(q1^{-r}z) - w^-(C q1^{-r} z/u) k+_r e(u)
        //   = cr ( d(Cq1 u/z) psi^-(u) k+_{r-1}(q1^{-r}z) - d(C q1^{-r} z/u) psi0 k+_{r-1}(q1^{-r+1}z) )
        {
            auto kr = named_k_r(P, fam, +1, r, qmr);
            Term t1 = term(kr.coef, {block(W, {leafF(fam, AtomKind::E)}), block(Z, kr.leaves)});
            Term t2 = term(-kr.coef, {block(Z, kr.leaves), block(W, {leafF(fam, AtomKind::E)})});
            with_directed(t2, om, C * qmr, true, Direction::AtInfinity);
            Relation rel{{t1, t2}};
            if (r >= 1) {
                auto kr1a = named_k_r(P, fam, +1, r - 1, qmr);
                auto kr1b = named_k_r(P, fam, +1, r - 1, q1.pow(-r + 1));
                Term t3 = term(-cr * kr1a.coef,
                               {block(W, {leafF(fam, AtomKind::PsiM)}), block(Z, kr1a.leaves)});
                with_delta(t3, C * q1);
                Term t4 = term(cr * psi0 * kr1b.coef, {block(Z, kr1b.leaves)});
                with_delta(t4, (C * qmr).inv());
                rel.terms.push_back(t3);
                rel.terms.push_back(t4);
            }
            out.push_back(make("lemma_k_identity", fmt::format("k_ident_2_r{}", r), 2,
                               {std::move(rel)}));
        }
        // identity 3: k-_r(q1^{-r}z) f(u) - w^+(C q1^{-r}z/u) f(u) k-_r
        //   = cr ( d(Cq1 u/z) k-_{r-1}(q1^{-r}z) psi^+(u) - d(Cq1^{-r}z/u) psi0^{-1} k-_{r-1}(q1^{-r+1}z) )
        {
            auto kr = named_k_r(P, fam, -1, r, qmr);
            Term t1 = term(kr.coef, {block(Z, kr.leaves), block(W, {leafF(fam, AtomKind::F)})});
            Term t2 = term(-kr.coef, {block(W, {leafF(fam, AtomKind::F)}), block(Z, kr.leaves)});
            with_directed(t2, om, C * qmr, true, Direction::AtZero);
            Relation rel{{t1, t2}};
            if (r >= 1) {
                auto kr1a = named_k_r(P, fam, -1, r - 1, qmr);
                auto kr1b = named_k_r(P, fam, -1, r - 1, q1.pow(-r + 1));
                Term t3 = term(-cr * kr1a.coef,
                               {block(Z, kr1a.leaves), block(W, {leafF(fam, AtomKind::PsiP)})});
                with_delta(t3, C * q1);
                Term t4 = term(cr * psi0.inv() * kr1b.coef, {block(Z, kr1b.leaves)});
                with_delta(t4, (C * qmr).inv());
                rel.terms.push_back(t3);
                rel.terms.push_back(t4);
            }
            out.push_back(make("lemma_k_identity", fmt::format("k_ident_3_r{}", r), 2,
                               {std::move(rel)}));
        }
        // identity 4: k+_r(q1^{-r}z) f(u) - w^+(z/u) f(u) k+_r
        //   = cr ( d(q1^{r+1}u/z) k+_{r+1}(q1^{-r-1}z) psi0^{-1} psi^+(u) - d(u/z) k+_{r+1}(q1^{-r}z) )
        {
            auto kr = named_k_r(P, fam, +1, r, qmr);
            auto kr1a = named_k_r(P, fam, +1, r + 1, q1.pow(-r - 1));
            auto kr1b = named_k_r(P, fam, +1, r + 1, qmr);
            Term t1 = term(kr.coef, {block(Z, kr.leaves), block(W, {leafF(fam, AtomKind::F)})});
            Term t2 = term(-kr.coef, {block(W, {leafF(fam, AtomKind::F)}), block(Z, kr.leaves)});
            with_directed(t2, om, Scalar(1), true, Direction::AtZero);
            Term t3 = term(-cr * psi0.inv() * kr1a.coef,
                           {block(Z, kr1a.leaves), block(W, {leafF(fam, AtomKind::PsiP)})});
            with_delta(t3, q1.pow(r + 1));
            Term t4 = term(cr * kr1b.coef, {block(Z, kr1b.leaves)});
            with_delta(t4, Scalar(1));
            out.push_back(make("lemma_k_identity", fmt::format("k_ident_4_r{}", r), 2,
                               {Relation{{t1, t2, t3, t4}}}));
        }
    }
    return out;
}

std::vector<RelationTemplate> lemma_delta_k(const ModuleHandle& mod, const CatalogOptions& opt,
                                            Family fam) {
    auto th = dynamic_cast<const TensorHandle*>(&mod);
    if (!th) throw UnknownFamily("lemma_delta_k runs on tensor modules");
    const ParamSpec& P = mod.spec();
    Scalar q1 = P.q(1, fam);
    Scalar psi0 = mod.psi0(fam);
    Scalar C1 = mod.level_at({0}, fam), C2 = mod.level_at({1}, fam);
    std::vector<RelationTemplate> out;
    auto legged = [&](const WeightedTree& wt, int legidx) {
        std::vector<Leaf> ls;
        for (auto l : wt.leaves) {
            l.leg = {legidx};
            ls.push_back(l);
        }
        return ls;
    };
    for (long r = 0; r <= opt.r_max; ++r) {
        for (int sgn : {+1, -1}) {
            auto lhs = named_k_r(P, fam, sgn, r);
            Relation rel;
            rel.terms.push_back(term(lhs.coef, {block(Z, lhs.leaves)}));
            for (long r1 = 0; r1 <= r; ++r1) {
                long r2 = r - r1;
                if (sgn > 0) {
                    // k+_{r1}(C2 z) ⊗ psi0^{r1} k+_{r2}(q1^{r1} z)
                    auto a = named_k_r(P, fam, +1, r1, C2);
                    auto b = named_k_r(P, fam, +1, r2, q1.pow(r1));
                    std::vector<Leaf> ls = legged(a, 0);
                    auto bs = legged(b, 1);
                    ls.insert(ls.end(), bs.begin(), bs.end());
                    rel.terms.push_back(term(-a.coef * b.coef * psi0.pow(r1), {block(Z, ls)}));
                } else {
                    // psi0^{-r2} k-_{r1}(q1^{r2} z) ⊗ k-_{r2}(C1 z)
                    auto a = named_k_r(P, fam, -1, r1, q1.pow(r2));
                    auto b = named_k_r(P, fam, -1, r2, C1);
                    std::vector<Leaf> ls = legged(a, 0);
                    auto bs = legged(b, 1);
                    ls.insert(ls.end(), bs.begin(), bs.end());
                    rel.terms.push_back(term(-a.coef * b.coef * psi0.pow(-r2), {block(Z, ls)}));
                }
            }
            out.push_back(make("lemma_delta_k",
                               fmt::format("delta_k{}_r{}", sgn > 0 ? "p" : "m", r), 1,
                               {std::move(rel)}));
        }
    }
    return out;
}

std::vector<RelationTemplate> appendix_c(const ModuleHandle& mod) {
    const ParamSpec& P = mod.spec();
    Family fam = Family::Plain;
    Scalar q1 = P.q(1, fam);
    Scalar s1 = P.s(1, fam);
    RationalFunction1 om = P.omega(fam);
    std::vector<RelationTemplate> out;
    auto k1m = [&](const Scalar& arg) { return named_k_r(P, fam, -1, 1, arg); };
    {
        // e(z) k0^-(w) = w^+(w/z) k0^-(w) e(z)
        Term t1 = term(Scalar(1), {block(Z, {leafP(AtomKind::E)}),
                                   block(W, {leafP(AtomKind::K0M)})});
        Term t2 = term(Scalar(-1), {block(W, {leafP(AtomKind::K0M)}), block(Z, {leafP(AtomKind::E)})});
        with_directed(t2, om, Scalar(1), false, Direction::AtZero);
        out.push_back(make("appendix_c", "exch_e_k0m", 2, {Relation{{t1, t2}}}));
    }
    {
        // e(z) k1^-(q1^{-1} w) = w^-(w/z) k1^-(q1^{-1} w) e(z)
        auto k = k1m(q1.inv());
        Term t1 = term(k.coef, {block(Z, {leafP(AtomKind::E)}), block(W, k.leaves)});
        Term t2 = term(-k.coef, {block(W, k.leaves), block(Z, {leafP(AtomKind::E)})});
        with_directed(t2, om, Scalar(1), false, Direction::AtInfinity);
        out.push_back(make("appendix_c", "exch_e_k1m", 2, {Relation{{t1, t2}}}));
    }
    {
        // w^-(q1^{-1} w/z) psi^-(z) k1^-(q1^{-1}w) = w^-(w/z) k1^-(q1^{-1}w) psi^-(z)
        auto k = k1m(q1.inv());
        Term t1 = term(k.coef, {block(Z, {leafP(AtomKind::PsiM)}), block(W, k.leaves)});
        with_directed(t1, om, q1.inv(), false, Direction::AtInfinity);
        Term t2 = term(-k.coef, {block(W, k.leaves), block(Z, {leafP(AtomKind::PsiM)})});
        with_directed(t2, om, Scalar(1), false, Direction::AtInfinity);
        out.push_back(make("appendix_c", "exch_psim_k1m", 2, {Relation{{t1, t2}}}));
    }
    {
        // k1^-(s1^{-1}z) k0^-(s1 w) = w^+(q1 w/z) k0^-(s1 w) k1^-(s1^{-1}z)
        auto k = k1m(s1.inv());
        Term t1 = term(k.coef, {block(Z, k.leaves), block(W, {leafP(AtomKind::K0M, s1)})});
        Term t2 = term(-k.coef, {block(W, {leafP(AtomKind::K0M, s1)}), block(Z, k.leaves)});
        with_directed(t2, om, q1, false, Direction::AtZero);
        out.push_back(make("appendix_c", "exch_k1m_k0m", 2, {Relation{{t1, t2}}}));
    }
    return out;
}

std::vector<RelationTemplate> hh_commutator(const ModuleHandle& mod, const CatalogOptions& opt,
                                            Family fam) {
    const ParamSpec& P = mod.spec();
    Scalar C = mod.level(fam);
    RelationTemplate t;
    t.family = "hh_commutator";
    t.name = "hh_commutator";
    t.nvars = 0;
    for (int r = -opt.hh_range; r <= opt.hh_range; ++r) {
        if (r == 0) continue;
        for (int s = -opt.hh_range; s <= opt.hh_range; ++s) {
            if (s == 0) continue;
            ModeRel mr;
            mr.label = fmt::format("r={},s={}", r, s);
            Atom hr = Atom::make(fam, AtomKind::H, r);
            Atom hs = Atom::make(fam, AtomKind::H, s);
            ModeTerm a{TScalar{Scalar(1), 0, 0}, {{hr, 0}, {hs, 0}}};
            ModeTerm b{TScalar{Scalar(-1), 0, 0}, {{hs, 0}, {hr, 0}}};
            mr.terms = {a, b};
            if (r + s == 0) {
                Scalar rhs = (C.pow(r) - C.pow(-r)) / (Scalar(r) * P.kappa(r, fam));
                ModeTerm c{TScalar{-rhs, 0, 0}, {}};
                mr.terms.push_back(c);
            }
            t.mode_relations.push_back(std::move(mr));
        }
    }
    return {t};
}

// --- A_N relation groups -----------------------------------------------------

std::vector<long> valid_indices(const ANHandle& an, AtomKind k, long bound) {
    std::vector<long> out;
    for (long di = -bound; di <= bound; ++di)
        if (an.x_index_valid(k, di)) out.push_back(di);
    return out;
}

std::vector<RelationTemplate> an_group1(const ModuleHandle& mod, const CatalogOptions& opt) {
    auto an = dynamic_cast<const ANHandle*>(&mod);
    if (!an) throw UnknownFamily("an_group1 runs on A_N modules");
    const ParamSpec& P = mod.spec();
    Scalar C = mod.level(Family::Plain);
    Scalar s1 = P.s(1), q1 = P.q(1);
    Scalar sc1 = P.s(1, Family::Checked);
    Scalar cp = (s1.inv() - s1).inv();   // 1/(s1^{-1} - s1)
    Scalar cc = (sc1.inv() - sc1).inv(); // checked twin
    RationalFunction1 om = P.omega(Family::Plain);
    RationalFunction1 omc = P.omega(Family::Checked);
    std::vector<RelationTemplate> out;

    auto xp = [&](long di, const Scalar& arg = Scalar(1)) {
        return Leaf{Atom::make(Family::Plain, AtomKind::Xp, di), arg, {}};
    };
    auto xm = [&](long di, const Scalar& arg = Scalar(1)) {
        return Leaf{Atom::make(Family::Plain, AtomKind::Xm, di), arg, {}};
    };

    for (long di : valid_indices(*an, AtomKind::Xp, opt.idx)) {
        std::string sfx = fmt::format("_i{}", di);
        {
            // (eX+): e(u)X+ - w^-(z/u) X+ e(u) =  cp d(z/u) X+_{i-1}(q1 z)
            Term t1 = term(Scalar(1), {block(W, {leafP(AtomKind::E)}), block(Z, {xp(di)})});
            Term t2 = term(Scalar(-1), {block(Z, {xp(di)}), block(W, {leafP(AtomKind::E)})});
            with_directed(t2, om, Scalar(1), true, Direction::AtInfinity);
            Term t3 = term(-cp, {block(Z, {xp(di - 2, q1)})});
            with_delta(t3, Scalar(1));
            out.push_back(make("an_group1", "eXp" + sfx, 2, {Relation{{t1, t2, t3}}}));
        }
        {
            // (fX+): [f(u), X+] = cp d(q1^{-1}z/(Cu)) X+_{i+1}(q1^{-1}z) psi^+(u)
            Term t1 = term(Scalar(1), {block(W, {leafP(AtomKind::F)}), block(Z, {xp(di)})});
            Term t2 = term(Scalar(-1), {block(Z, {xp(di)}), block(W, {leafP(AtomKind::F)})});
            Term t3 = term(-cp, {block(Z, {xp(di + 2, q1.inv())}),
                                 block(W, {leafP(AtomKind::PsiP)})});
            with_delta(t3, C * q1);
            out.push_back(make("an_group1", "fXp" + sfx, 2, {Relation{{t1, t2, t3}}}));
        }
        for (int sgn : {+1, -1}) {
            // (psiX+): psi^±(u) X+ = w^±(z/(C^{(1±1)/2} u)) X+ psi^±(u)
            AtomKind pk = sgn > 0 ? AtomKind::PsiP : AtomKind::PsiM;
            Scalar m = sgn > 0 ? C.inv() : Scalar(1);
            Term t1 = term(Scalar(1), {block(W, {leafP(pk)}), block(Z, {xp(di)})});
            Term t2 = term(Scalar(-1), {block(Z, {xp(di)}), block(W, {leafP(pk)})});
            with_directed(t2, om, m, true, sgn > 0 ? Direction::AtZero : Direction::AtInfinity);
            out.push_back(make("an_group1", fmt::format("psi{}Xp{}", sgn > 0 ? "P" : "M", sfx), 2,
                               {Relation{{t1, t2}}}));
        }
        {
            // (ceX+): ě(u)X+ - w̌^-(q1^i z/u) X+ ě(u) = cc d(q1^i z/u) X+_{i-1}(z)
            Term t1 = term(Scalar(1), {block(W, {leafF(Family::Checked, AtomKind::E)}),
                                       block(Z, {xp(di)})});
            Term t2 = term(Scalar(-1), {block(Z, {xp(di)}),
                                        block(W, {leafF(Family::Checked, AtomKind::E)})});
            with_directed(t2, omc, s1.pow(di), true, Direction::AtInfinity);
            Term t3 = term(-cc, {block(Z, {xp(di - 2)})});
            with_delta(t3, s1.pow(-di));
            out.push_back(make("an_group1", "ceXp" + sfx, 2, {Relation{{t1, t2, t3}}},
                               "paper prints 1/(š1^{-1}-s1); encoded with š1 throughout"));
        }
        {
            // (cfX+): [f̌(u), X+] = cc d(q1^{i+1} z/(C u)) X+_{i+1}(z) psi-check^+(u)
            Term t1 = term(Scalar(1), {block(W, {leafF(Family::Checked, AtomKind::F)}),
                                       block(Z, {xp(di)})});
            Term t2 = term(Scalar(-1), {block(Z, {xp(di)}),
                                        block(W, {leafF(Family::Checked, AtomKind::F)})});
            Term t3 = term(-cc, {block(Z, {xp(di + 2)}),
                                 block(W, {leafF(Family::Checked, AtomKind::PsiP)})});
            with_delta(t3, C * s1.pow(-di - 2));
            out.push_back(make("an_group1", "cfXp" + sfx, 2, {Relation{{t1, t2, t3}}}));
        }
        for (int sgn : {+1, -1}) {
            AtomKind pk = sgn > 0 ? AtomKind::PsiP : AtomKind::PsiM;
            Scalar m = s1.pow(di) * (sgn > 0 ? C.inv() : Scalar(1));
            Term t1 = term(Scalar(1), {block(W, {leafF(Family::Checked, pk)}), block(Z, {xp(di)})});
            Term t2 = term(Scalar(-1), {block(Z, {xp(di)}), block(W, {leafF(Family::Checked, pk)})});
            with_directed(t2, omc, m, true, sgn > 0 ? Direction::AtZero : Direction::AtInfinity);
            out.push_back(make("an_group1", fmt::format("cpsi{}Xp{}", sgn > 0 ? "P" : "M", sfx), 2,
                               {Relation{{t1, t2}}}));
        }
        {
            // (KX+): K X+ K^{-1} = q2^{beta/2} X+, with the opaque unit lambda
            Scalar K = P.K_scalar;
            Term t1 = term(K, {block(Z, {xp(di)})});
            Term t2 = term(K, {block(Z, {xp(di)})});
            t2.coef = TScalar{-K, 1, 0};
            RelationTemplate t = make("an_group1", "KXp" + sfx, 1, {Relation{{t1, t2}}},
                                      "lambda = q2^{beta/2} opaque; checked only where X == 0");
            t.requires_x_zero = true;
            out.push_back(t);
            Term u1 = term(P.Kcheck_scalar, {block(Z, {xp(di)})});
            Term u2 = term(P.Kcheck_scalar, {block(Z, {xp(di)})});
            u2.coef = TScalar{-P.Kcheck_scalar, 0, 1};
            RelationTemplate tc = make("an_group1", "cKXp" + sfx, 1, {Relation{{u1, u2}}},
                                       "lambda-check opaque; checked only where X == 0");
            tc.requires_x_zero = true;
            out.push_back(tc);
        }
    }

    for (long di : valid_indices(*an, AtomKind::Xm, opt.idx)) {
        std::string sfx = fmt::format("_i{}", di);
        {
            // (eX-): [X-, e(u)] = cp d(z/(C q1 u)) psi^-(u) X-_{i-1}(q1^{-1} z)
            Term t1 = term(Scalar(1), {block(Z, {xm(di)}), block(W, {leafP(AtomKind::E)})});
            Term t2 = term(Scalar(-1), {block(W, {leafP(AtomKind::E)}), block(Z, {xm(di)})});
            Term t3 = term(-cp, {block(W, {leafP(AtomKind::PsiM)}),
                                 block(Z, {xm(di - 2, q1.inv())})});
            with_delta(t3, C * q1);
            out.push_back(make("an_group1", "eXm" + sfx, 2, {Relation{{t1, t2, t3}}}));
        }
        {
            // (fX-): X- f(u) - w^+(z/u) f(u) X- = cp d(z/u) X-_{i+1}(q1 z)
            Term t1 = term(Scalar(1), {block(Z, {xm(di)}), block(W, {leafP(AtomKind::F)})});
            Term t2 = term(Scalar(-1), {block(W, {leafP(AtomKind::F)}), block(Z, {xm(di)})});
            with_directed(t2, om, Scalar(1), true, Direction::AtZero);
            Term t3 = term(-cp, {block(Z, {xm(di + 2, q1)})});
            with_delta(t3, Scalar(1));
            out.push_back(make("an_group1", "fXm" + sfx, 2, {Relation{{t1, t2, t3}}}));
        }
        for (int sgn : {+1, -1}) {
            // (psiX-): X- psi^±(u) = w^±(z/(C^{(1∓1)/2} u)) psi^±(u) X-
            AtomKind pk = sgn > 0 ? AtomKind::PsiP : AtomKind::PsiM;
            Scalar m = sgn > 0 ? Scalar(1) : C.inv();
            Term t1 = term(Scalar(1), {block(Z, {xm(di)}), block(W, {leafP(pk)})});
            Term t2 = term(Scalar(-1), {block(W, {leafP(pk)}), block(Z, {xm(di)})});
            with_directed(t2, om, m, true, sgn > 0 ? Direction::AtZero : Direction::AtInfinity);
            out.push_back(make("an_group1", fmt::format("psi{}Xm{}", sgn > 0 ? "P" : "M", sfx), 2,
                               {Relation{{t1, t2}}}));
        }
        {
            // (ceX-): [X-, ě(u)] = cc d(q1^{1-i} z/(Cu)) psi-check^-(z) X-_{i-1}(z)
            Term t1 = term(Scalar(1), {block(Z, {xm(di)}),
                                       block(W, {leafF(Family::Checked, AtomKind::E)})});
            Term t2 = term(Scalar(-1), {block(W, {leafF(Family::Checked, AtomKind::E)}),
                                        block(Z, {xm(di)})});
            Term t3 = term(-cc, {block(Z, {leafF(Family::Checked, AtomKind::PsiM), xm(di - 2)})});
            with_delta(t3, C * s1.pow(di - 2));
            out.push_back(make("an_group1", "ceXm" + sfx, 2, {Relation{{t1, t2, t3}}},
                               "psi-check^-(z) argument encoded as printed"));
        }
        {
            // (cfX-): X- f̌(u) - w̌^+(q1^{-i}z/u) f̌(u) X- = cc d(q1^{-i} z/u) X-_{i+1}(z)
            Term t1 = term(Scalar(1), {block(Z, {xm(di)}),
                                       block(W, {leafF(Family::Checked, AtomKind::F)})});
            Term t2 = term(Scalar(-1), {block(W, {leafF(Family::Checked, AtomKind::F)}),
                                        block(Z, {xm(di)})});
            with_directed(t2, omc, s1.pow(-di), true, Direction::AtZero);
            Term t3 = term(-cc, {block(Z, {xm(di + 2)})});
            with_delta(t3, s1.pow(di));
            out.push_back(make("an_group1", "cfXm" + sfx, 2, {Relation{{t1, t2, t3}}}));
        }
        for (int sgn : {+1, -1}) {
            AtomKind pk = sgn > 0 ? AtomKind::PsiP : AtomKind::PsiM;
            Scalar m = s1.pow(-di) * (sgn > 0 ? Scalar(1) : C.inv());
            Term t1 = term(Scalar(1), {block(Z, {xm(di)}), block(W, {leafF(Family::Checked, pk)})});
            Term t2 = term(Scalar(-1), {block(W, {leafF(Family::Checked, pk)}), block(Z, {xm(di)})});
            with_directed(t2, omc, m, true, sgn > 0 ? Direction::AtZero : Direction::AtInfinity);
            out.push_back(make("an_group1", fmt::format("cpsi{}Xm{}", sgn > 0 ? "P" : "M", sfx), 2,
                               {Relation{{t1, t2}}}));
        }
        {
            Scalar K = P.K_scalar;
            Term t1 = term(K, {block(Z, {xm(di)})});
            Term t2 = term(K, {block(Z, {xm(di)})});
            t2.coef = TScalar{-K, -1, 0};
            RelationTemplate t = make("an_group1", "KXm" + sfx, 1, {Relation{{t1, t2}}});
            t.requires_x_zero = true;
            out.push_back(t);
            Term u1 = term(P.Kcheck_scalar, {block(Z, {xm(di)})});
            Term u2 = term(P.Kcheck_scalar, {block(Z, {xm(di)})});
            u2.coef = TScalar{-P.Kcheck_scalar, 0, -1};
            RelationTemplate tc = make("an_group1", "cKXm" + sfx, 1, {Relation{{u1, u2}}});
            tc.requires_x_zero = true;
            out.push_back(tc);
        }
    }
    return out;
}

RationalFunction1 p_s(const ParamSpec& P, long s) {
    RationalFunction1 acc({{0, Scalar(1)}}, {{0, Scalar(1)}});
    for (long r = 0; r <= s; ++r) {
        RationalFunction1 f({{0, P.q(2).inv() * P.q(1).pow(r)}, {1, Scalar(-1)}},
                            {{0, P.q(1).pow(r)}, {1, Scalar(-1)}});
        acc = acc * f;
    }
    return acc;
}

std::vector<RelationTemplate> an_group2(const ModuleHandle& mod, const CatalogOptions& opt) {
    auto an = dynamic_cast<const ANHandle*>(&mod);
    if (!an) throw UnknownFamily("an_group2 runs on A_N modules");
    const ParamSpec& P = mod.spec();
    Scalar q1 = P.q(1), q2 = P.q(2), q3 = P.q(3);
    std::vector<RelationTemplate> out;
    auto x = [&](AtomKind k, long di, const Scalar& arg = Scalar(1)) {
        return Leaf{Atom::make(Family::Plain, k, di), arg, {}};
    };

    for (AtomKind k : {AtomKind::Xp, AtomKind::Xm}) {
        bool plus = k == AtomKind::Xp;
        auto idxs = valid_indices(*an, k, opt.idx);
        for (long di : idxs) {
            // same-index relation
            Term t1 = term(Scalar(1), {block(Z, {x(k, di)}), block(W, {x(k, di)})});
            Term t2 = term(Scalar(1), {block(W, {x(k, di)}), block(Z, {x(k, di)})});
            if (plus) {
                // (z - q2 w) X+X+ + (w - q2 z) X+X+ = 0
                with_poly(t1, z_minus(q2));
                with_poly(t2, w_minus(q2));
            } else {
                // (q2 z - w) X-X- + (q2 w - z) X-X- = 0
                Poly p1(2);
                p1.add_term({1, 0}, q2);
                p1.add_term({0, 1}, Scalar(-1));
                with_poly(t1, p1);
                Poly p2(2);
                p2.add_term({0, 1}, q2);
                p2.add_term({1, 0}, Scalar(-1));
                with_poly(t2, p2);
            }
            out.push_back(make("an_group2", fmt::format("{}{}_{}_same", plus ? "XpXp" : "XmXm",
                                                        di, di), 2,
                               {Relation{{t1, t2}}}));
            // j > i
            for (long dj : idxs) {
                if (dj <= di || (dj - di) % 2 != 0) continue;
                long s = (dj - di) / 2;
                Poly pre1 = Poly::constant(2, Scalar(1));
                Poly pre2 = Poly::constant(2, Scalar(1));
                if (plus) {
                    for (long r = 1; r <= s - 1; ++r) pre1 *= z_minus(q1.pow(r));
                    for (long r = 0; r <= s - 2; ++r) {
                        Poly f(2); // (q3^{-1} q1^r w - z)
                        f.add_term({0, 1}, q3.inv() * q1.pow(r));
                        f.add_term({1, 0}, Scalar(-1));
                        pre2 *= f;
                    }
                } else {
                    for (long r = 1; r <= s - 1; ++r) pre1 *= w_minus(q1.pow(r));
                    for (long r = 0; r <= s - 2; ++r) {
                        Poly f(2); // (q3^{-1} q1^r z - w)
                        f.add_term({1, 0}, q3.inv() * q1.pow(r));
                        f.add_term({0, 1}, Scalar(-1));
                        pre2 *= f;
                    }
                }
                Term t3 = term(Scalar(1), {block(Z, {x(k, di)}), block(W, {x(k, dj)})});
                with_poly(t3, pre1);
                Scalar sign = (s % 2 == 0) ? q2 : -q2;
                Term t4 = term(sign, {block(W, {x(k, dj)}), block(Z, {x(k, di)})});
                with_poly(t4, pre2);
                // p^+_{j-i}(z/w) in the X+ relation, p^-_{j-i}(w/z) in the X- one
                with_directed(t4, p_s(P, s), Scalar(1), plus,
                              plus ? Direction::AtZero : Direction::AtInfinity);
                out.push_back(make("an_group2",
                                   fmt::format("{}_{}_{}", plus ? "XpXp" : "XmXm", di, dj), 2,
                                   {Relation{{t3, t4}}},
                                   "p± direction encoded as printed (indiscriminable while X==0)"));
            }
        }
    }
    return out;
}

std::vector<RelationTemplate> an_group3(const ModuleHandle& mod, const CatalogOptions& opt) {
    auto an = dynamic_cast<const ANHandle*>(&mod);
    if (!an) throw UnknownFamily("an_group3 runs on A_N modules");
    const ParamSpec& P = mod.spec();
    int N = an->N();
    Scalar C = mod.level(Family::Plain);
    Scalar q1 = P.q(1), q1c = P.q(1, Family::Checked);
    Scalar s1 = P.s(1);
    std::vector<RelationTemplate> out;
    auto xp = [&](long di) { return Leaf{Atom::make(Family::Plain, AtomKind::Xp, di), Scalar(1), {}}; };
    auto xm = [&](long di) { return Leaf{Atom::make(Family::Plain, AtomKind::Xm, di), Scalar(1), {}}; };

    for (long di : valid_indices(*an, AtomKind::Xp, opt.idx)) {
        for (long dj : valid_indices(*an, AtomKind::Xm, opt.idx)) {
            long total2 = di + dj + N; // doubled: 2*(i + j + N/2)
            if (total2 % 2 != 0) continue;
            long total = total2 / 2;
            if (total < opt.total_lo || total > opt.total_hi) continue;
            Relation rel;
            rel.terms.push_back(term(Scalar(1), {block(Z, {xp(di)}), block(W, {xm(dj)})}));
            rel.terms.push_back(term(Scalar(-1), {block(W, {xm(dj)}), block(Z, {xp(di)})}));
            // plus sums: r + ř = i + j + N/2
            for (long r = 0; r <= total; ++r) {
                long rc = total - r;
                auto ka = named_k_r(P, Family::Plain, +1, r, q1.pow(-r));
                auto kb = named_k_r(P, Family::Checked, +1, rc, q1c.pow(-rc) * s1.pow(-dj));
                std::vector<Leaf> ls = ka.leaves;
                ls.insert(ls.end(), kb.leaves.begin(), kb.leaves.end());
                Term t = term(-ka.coef * kb.coef, {block(W, ls)});
                with_delta(t, C * q1.pow(-r));
                rel.terms.push_back(t);
            }
            // minus sums: r + ř = -i - j + N/2, sign (-1)^N
            long mtotal = (-di - dj + N) / 2;
            for (long r = 0; r <= mtotal; ++r) {
                long rc = mtotal - r;
                auto ka = named_k_r(P, Family::Plain, -1, r, q1.pow(-r));
                auto kb = named_k_r(P, Family::Checked, -1, rc, q1c.pow(-rc) * s1.pow(di));
                std::vector<Leaf> ls = ka.leaves;
                ls.insert(ls.end(), kb.leaves.begin(), kb.leaves.end());
                Scalar sgn = (N % 2 == 0) ? Scalar(1) : Scalar(-1);
                Term t = term(sgn * ka.coef * kb.coef, {block(Z, ls)});
                with_delta(t, (C * q1.pow(-r)).inv());
                rel.terms.push_back(t);
            }
            out.push_back(make("an_group3", fmt::format("XpXm_{}_{}", di, dj), 2,
                               {std::move(rel)},
                               fmt::format("index total i+j+N/2 = {}", total)));
        }
    }
    return out;
}

const std::vector<std::string> kFamilies = {
    "e1_defining",    "vector_axioms",     "lemma_level1",   "lemma_zero_currents",
    "lemma_k0_difference", "lemma_k_on_fock", "lemma_k_identity", "lemma_delta_k",
    "appendix_c",     "hh_commutator",     "an_group1",      "an_group2",
    "an_group3",
};

} // namespace

const std::vector<std::string>& known_families() { return kFamilies; }

std::vector<RelationTemplate> catalog_family(const std::string& family, const ModuleHandle& mod,
                                             const CatalogOptions& opt) {
    if (family == "e1_defining" || family == "vector_axioms")
        return e1_defining(mod, opt, Family::Plain);
    if (family == "lemma_level1") return lemma_level1(mod);
    if (family == "lemma_zero_currents") return lemma_zero_currents(mod, Family::Plain);
    if (family == "lemma_k0_difference") return lemma_k0_difference(mod, Family::Plain);
    if (family == "lemma_k_on_fock") return lemma_k_on_fock(mod);
    if (family == "lemma_k_identity") return lemma_k_identity(mod, opt, Family::Plain);
    if (family == "lemma_delta_k") return lemma_delta_k(mod, opt, Family::Plain);
    if (family == "appendix_c") return appendix_c(mod);
    if (family == "hh_commutator") return hh_commutator(mod, opt, Family::Plain);
    if (family == "an_group1") return an_group1(mod, opt);
    if (family == "an_group2") return an_group2(mod, opt);
    if (family == "an_group3") return an_group3(mod, opt);
    throw UnknownFamily("unknown family: " + family);
}

std::string render_catalog(const ModuleHandle& mod, const CatalogOptions& opt) {
    std::string out;
    for (auto& fam : kFamilies) {
        std::vector<RelationTemplate> ts;
        try {
            ts = catalog_family(fam, mod, opt);
        } catch (const UnknownFamily&) {
            continue;
        }
        out += fmt::format("[{}] {} templates\n", fam, ts.size());
        for (auto& t : ts) {
            out += fmt::format("  {} ({} subrelations{}{})\n", t.name,
                               t.is_mode_template() ? t.mode_relations.size()
                                                    : t.subrelations.size(),
                               t.is_mode_template() ? ", mode-level" : "",
                               t.note.empty() ? "" : "; note: " + t.note);
        }
    }
    return out;
}

} // namespace toroidal
