#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "toroidal/catalog.hpp"
#include "toroidal/checker.hpp"
#include "toroidal/module.hpp"

using namespace toroidal;

namespace {

ParamSpec spec23() { return ParamSpec(Scalar(2, 3), Scalar(3, 5)); }

std::shared_ptr<FockHandle> fock(int color, Family fam = Family::Plain) {
    return std::make_shared<FockHandle>(spec23(), color, Scalar(7, 5), fam);
}

} // namespace

TEST_CASE("basis counts follow the partition numbers") {
    auto m = fock(2);
    CHECK(m->basis(0).size() == 1);
    CHECK(m->basis(3).size() == 7); // 1+1+2+3
    CHECK(m->basis(6).size() == 30);
    CHECK(BasisKey::vacuum().degree() == 0);
}

TEST_CASE("e0 on the vacuum is the vertex operator constant") {
    auto P = spec23();
    auto m = fock(2);
    Vec v = m->apply(Atom::make(Family::Plain, AtomKind::E), 0, Vec::unit(BasisKey::vacuum()));
    // s2^{-1}/((1-q1)(1-q3)); the spectral parameter sits in the exponentials
    Scalar want = P.s(2).inv() / ((Scalar(1) - P.q(1)) * (Scalar(1) - P.q(3)));
    REQUIRE(v.terms().size() == 1);
    CHECK(v.terms().begin()->second == want);
    // e_k vacuum = 0 for k >= 1
    for (long k = 1; k <= 4; ++k)
        CHECK(m->apply(Atom::make(Family::Plain, AtomKind::E), k, Vec::unit(BasisKey::vacuum()))
                  .is_zero());
}

TEST_CASE("h1 h-1 on the vacuum matches the Cartan commutator") {
    auto P = spec23();
    auto m = fock(2);
    Vec v = m->apply(Atom::make(Family::Plain, AtomKind::H, -1), 0, Vec::unit(BasisKey::vacuum()));
    v = m->apply(Atom::make(Family::Plain, AtomKind::H, 1), 0, v);
    Scalar want = (P.s(2) - P.s(2).inv()) / P.kappa(1);
    REQUIRE(v.terms().size() == 1);
    CHECK(v.terms().begin()->second == want);
}

TEST_CASE("mode application shifts degree by the mode") {
    auto m = fock(1);
    for (auto& key : m->basis(3)) {
        for (long k = -2; k <= 2; ++k) {
            Vec v = m->apply(Atom::make(Family::Plain, AtomKind::E), k, Vec::unit(key));
            for (auto& [kk, c] : v.terms()) CHECK(kk.degree() == key.degree() + k);
            Vec w = m->apply(Atom::make(Family::Plain, AtomKind::F), k, Vec::unit(key));
            for (auto& [kk, c] : w.terms()) CHECK(kk.degree() == key.degree() + k);
        }
    }
}

TEST_CASE("defining relation suite passes on all three Fock colors") {
    CheckSettings cfg;
    cfg.cutoff = 3;
    cfg.wlo = -3;
    cfg.whi = 3;
    for (int color = 1; color <= 3; ++color) {
        auto m = fock(color);
        Evaluator ev(m);
        for (auto& tpl : catalog_family("e1_defining", *m)) {
            auto rep = check_template(tpl, m, ev, cfg);
            INFO(tpl.name, " on color ", color, ": ", rep.error);
            CHECK(rep.verdict == "pass");
        }
    }
}

TEST_CASE("checked-family Fock module passes its defining relations") {
    auto P = spec23();
    auto m = std::make_shared<FockHandle>(P, 1, Scalar(7, 5), Family::Checked);
    Evaluator ev(m);
    CheckSettings cfg;
    cfg.cutoff = 3;
    cfg.wlo = -3;
    cfg.whi = 3;
    // instantiate the checked family's relations directly
    const ParamSpec& S = m->spec();
    auto rule = exchange_rule(S, Atom::make(Family::Checked, AtomKind::E),
                              Atom::make(Family::Checked, AtomKind::E), m->level(Family::Plain),
                              m->level(Family::Checked));
    REQUIRE(rule.has_value());
    // ee relation, checked family
    Term t1;
    t1.coef = TScalar{Scalar(1), 0, 0};
    t1.polys.push_back(PolyPref{rule->gAB});
    t1.factors = {FactorBlock{0, {Leaf{Atom::make(Family::Checked, AtomKind::E), Scalar(1), {}}}},
                  FactorBlock{1, {Leaf{Atom::make(Family::Checked, AtomKind::E), Scalar(1), {}}}}};
    Term t2 = t1;
    t2.coef = TScalar{Scalar(-1), 0, 0};
    t2.polys = {PolyPref{rule->gBA}};
    t2.factors = {FactorBlock{1, {Leaf{Atom::make(Family::Checked, AtomKind::E), Scalar(1), {}}}},
                  FactorBlock{0, {Leaf{Atom::make(Family::Checked, AtomKind::E), Scalar(1), {}}}}};
    RelationTemplate tpl;
    tpl.name = "ee_checked";
    tpl.family = "unit";
    tpl.nvars = 2;
    tpl.subrelations = {Relation{{t1, t2}}};
    auto rep = check_template(tpl, m, ev, cfg);
    CHECK(rep.verdict == "pass");
}

TEST_CASE("level-1 and zero-current lemmas hold on Fock modules") {
    CheckSettings cfg;
    cfg.cutoff = 3;
    cfg.wlo = -3;
    cfg.whi = 3;
    for (int color : {1, 2}) {
        auto m = fock(color);
        Evaluator ev(m);
        for (auto& fam : {std::string("lemma_level1"), std::string("lemma_zero_currents")}) {
            for (auto& tpl : catalog_family(fam, *m)) {
                auto rep = check_template(tpl, m, ev, cfg);
                INFO(tpl.name, " color ", color, " -> ", rep.verdict, " ", rep.error);
                CHECK(rep.verdict == "pass");
            }
        }
    }
}

TEST_CASE("k0 difference equation and k-on-Fock hold on F1") {
    CheckSettings cfg;
    cfg.cutoff = 3;
    cfg.wlo = -3;
    cfg.whi = 3;
    auto m = fock(1);
    Evaluator ev(m);
    for (auto& fam : {std::string("lemma_k0_difference"), std::string("lemma_k_on_fock")}) {
        for (auto& tpl : catalog_family(fam, *m)) {
            auto rep = check_template(tpl, m, ev, cfg);
            INFO(tpl.name, " -> ", rep.verdict, " ", rep.error);
            CHECK(rep.verdict == "pass");
        }
    }
}

TEST_CASE("k-on-Fock fails on the wrong color") {
    CheckSettings cfg;
    cfg.cutoff = 2;
    cfg.wlo = -2;
    cfg.whi = 2;
    auto m = fock(2); // k-currents are built with q1: color 2 must break the lemma
    Evaluator ev(m);
    bool any_fail = false;
    for (auto& tpl : catalog_family("lemma_k_on_fock", *m)) {
        auto rep = check_template(tpl, m, ev, cfg);
        if (rep.verdict == "fail") any_fail = true;
    }
    CHECK(any_fail);
}

TEST_CASE("vector representation: paper mode formulas and defining relations") {
    auto P = spec23();
    auto m = std::make_shared<VectorHandle>(P, 1, Scalar(7, 5), VectorHandle::Side::Left);
    // e_0 |0,v> = 1/(s1^{-1}-s1) |1,v>
    Vec v = m->apply(Atom::make(Family::Plain, AtomKind::E), 0, Vec::unit(BasisKey::label(0)));
    REQUIRE(v.terms().size() == 1);
    CHECK(v.terms().begin()->first.label_value() == 1);
    CHECK(v.terms().begin()->second == (P.s(1).inv() - P.s(1)).inv());
    // psi^+ mode 0 on |0,v> = omega(0) = 1
    Vec p = m->apply(Atom::make(Family::Plain, AtomKind::PsiP), 0, Vec::unit(BasisKey::label(0)));
    REQUIRE(p.terms().size() == 1);
    CHECK(p.terms().begin()->second == Scalar(1));

    CheckSettings cfg;
    cfg.cutoff = 4;
    cfg.wlo = -3;
    cfg.whi = 3;
    for (auto side : {VectorHandle::Side::Left, VectorHandle::Side::Right}) {
        auto h = std::make_shared<VectorHandle>(P, 1, Scalar(7, 5), side);
        Evaluator ev(h);
        for (auto& tpl : catalog_family("e1_defining", *h)) {
            auto rep = check_template(tpl, h, ev, cfg);
            INFO(tpl.name, (side == VectorHandle::Side::Right ? " (right)" : " (left)"), " -> ",
                 rep.verdict, " ", rep.error);
            CHECK(rep.verdict == "pass");
        }
    }
}

TEST_CASE("V1(v) -> V1(q1 v) relabeling intertwines the mode actions") {
    auto P = spec23();
    Scalar v(7, 5);
    auto a = std::make_shared<VectorHandle>(P, 1, v, VectorHandle::Side::Left);
    auto b = std::make_shared<VectorHandle>(P, 1, P.q(1) * v, VectorHandle::Side::Left);
    // phi|i,v> = |i-1, q1 v>
    for (int i = -2; i <= 2; ++i) {
        for (long k = -2; k <= 2; ++k) {
            for (AtomKind kind : {AtomKind::E, AtomKind::F, AtomKind::PsiP, AtomKind::PsiM}) {
                Atom at = Atom::make(Family::Plain, kind);
                Vec lhs = a->apply(at, k, Vec::unit(BasisKey::label(i)));
                // transport through phi
                Vec lhs_t;
                for (auto& [kk, c] : lhs.terms())
                    lhs_t.add(BasisKey::label(kk.label_value() - 1), c);
                Vec rhs = b->apply(at, k, Vec::unit(BasisKey::label(i - 1)));
                CHECK(lhs_t == rhs);
            }
        }
    }
}

TEST_CASE("hh commutator template on Fock and vector modules") {
    CheckSettings cfg;
    cfg.cutoff = 3;
    cfg.wlo = 0;
    cfg.whi = 0;
    auto P = spec23();
    auto m = fock(2);
    Evaluator ev(m);
    for (auto& tpl : catalog_family("hh_commutator", *m)) {
        auto rep = check_template(tpl, m, ev, cfg);
        CHECK(rep.verdict == "pass");
    }
    auto vm = std::make_shared<VectorHandle>(P, 1, Scalar(7, 5), VectorHandle::Side::Left);
    Evaluator ev2(vm);
    for (auto& tpl : catalog_family("hh_commutator", *vm)) {
        auto rep = check_template(tpl, vm, ev2, cfg);
        CHECK(rep.ok());
    }
}

TEST_CASE("windowed fusion engine agrees with the normal-ordered fast path") {
    auto m = fock(1);
    Evaluator fast(m);
    Evaluator slow(m, 1, false);
    auto P = spec23();
    for (int r : {1, 2}) {
        for (int sgn : {+1, -1}) {
            auto k = named_k_r(P, Family::Plain, sgn, r);
            auto tree = FusionTree::chain(k.leaves);
            for (auto& key : m->basis(2)) {
                for (long mode = -2; mode <= 2; ++mode) {
                    Vec a = fast.tree_mode_key(tree, mode, key);
                    Vec b = slow.tree_mode_key(tree, mode, key);
                    REQUIRE(a == b);
                }
            }
        }
    }
}
