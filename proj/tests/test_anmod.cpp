#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "toroidal/anmod.hpp"
#include "toroidal/catalog.hpp"
#include "toroidal/checker.hpp"

using namespace toroidal;

namespace {

ParamSpec spec23() { return ParamSpec(Scalar(2, 3), Scalar(3, 5)); }

std::shared_ptr<ANHandle> tower_n2(const ParamSpec& P) {
    auto base = ANHandle::fock_a1(P, Scalar(7, 5), false);
    return ANHandle::extend(ExtSide::Left, true, Scalar(3, 2), base);
}

} // namespace

TEST_CASE("A1 base levels and the level law") {
    auto P = spec23();
    auto plain = ANHandle::fock_a1(P, Scalar(7, 5), false);
    CHECK(plain->level(Family::Plain) == P.s(1));
    CHECK(plain->level(Family::Checked) == Scalar(1));
    auto checked = ANHandle::fock_a1(P, Scalar(7, 5), true);
    CHECK(checked->level(Family::Plain) == Scalar(1));
    CHECK(checked->level(Family::Checked) == P.s(1).inv());
    // q1^{1/2} * Č = s1 * s1^{-1} = 1 = C
    verify_level_law(*checked);

    auto t2 = tower_n2(P);
    CHECK(t2->N() == 2);
    CHECK(t2->level(Family::Plain) == P.s(1));
    CHECK(t2->level(Family::Checked) == P.s(1).inv());

    auto t3 = ANHandle::extend(ExtSide::Right, false, Scalar(11, 7), t2);
    CHECK(t3->N() == 3);
    verify_level_law(*t3);
}

TEST_CASE("X parity rule and structural zero") {
    auto P = spec23();
    auto base = ANHandle::fock_a1(P, Scalar(7, 5), false); // N = 1
    CHECK(base->x_index_valid(AtomKind::Xp, 1));
    CHECK(!base->x_index_valid(AtomKind::Xp, 0));
    CHECK(base->x_index_valid(AtomKind::Xm, 0));
    CHECK_THROWS_AS(base->apply_key({}, Atom::make(Family::Plain, AtomKind::Xp, 0), 0,
                                    BasisKey::vacuum()),
                    BadIndexParity);
    // X acts by zero on every basis vector of a pure Fock tower
    auto t2 = tower_n2(P);
    for (auto& key : t2->basis(2))
        for (long k = -2; k <= 2; ++k) {
            CHECK(t2->apply({}, Atom::make(Family::Plain, AtomKind::Xp, 0), k, Vec::unit(key))
                      .is_zero());
            CHECK(t2->apply({}, Atom::make(Family::Plain, AtomKind::Xm, 0), k, Vec::unit(key))
                      .is_zero());
        }
}

TEST_CASE("group-3 passes substantively on the N=1 bases") {
    CheckSettings cfg;
    cfg.cutoff = 3;
    cfg.wlo = -3;
    cfg.whi = 3;
    auto P = spec23();
    for (bool checked : {false, true}) {
        auto m = ANHandle::fock_a1(P, Scalar(7, 5), checked);
        Evaluator ev(m);
        bool any_pass = false;
        for (auto& tpl : catalog_family("an_group3", *m)) {
            auto rep = check_template(tpl, m, ev, cfg);
            INFO(tpl.name, checked ? " checked" : " plain", " -> ", rep.verdict, " ", rep.error,
                 " note ", tpl.note);
            CHECK(rep.ok());
            if (rep.verdict == "pass") any_pass = true;
        }
        CHECK(any_pass); // the delta-supported k cancellations are substantive
    }
}

TEST_CASE("group-3 passes on mixed towers N=2,3") {
    CheckSettings cfg;
    cfg.cutoff = 2;
    cfg.wlo = -2;
    cfg.whi = 2;
    auto P = spec23();
    auto t2 = tower_n2(P);
    auto t3 = ANHandle::extend(ExtSide::Right, false, Scalar(11, 7), t2);
    for (auto m : {std::static_pointer_cast<const ANHandle>(t2),
                   std::static_pointer_cast<const ANHandle>(t3)}) {
        Evaluator ev(m);
        bool any_pass = false;
        CatalogOptions opt;
        opt.idx = 2;
        for (auto& tpl : catalog_family("an_group3", *m, opt)) {
            auto rep = check_template(tpl, m, ev, cfg);
            INFO(tpl.name, " on ", m->describe(), " -> ", rep.verdict, " ", rep.error);
            CHECK(rep.ok());
            if (rep.verdict == "pass") any_pass = true;
        }
        CHECK(any_pass);
    }
}

TEST_CASE("groups 1 and 2 are vacuous on pure Fock towers") {
    CheckSettings cfg;
    cfg.cutoff = 2;
    cfg.wlo = -2;
    cfg.whi = 2;
    auto P = spec23();
    auto m = tower_n2(P);
    Evaluator ev(m);
    CatalogOptions opt;
    opt.idx = 1;
    for (auto& fam : {std::string("an_group1"), std::string("an_group2")}) {
        for (auto& tpl : catalog_family(fam, *m, opt)) {
            auto rep = check_template(tpl, m, ev, cfg);
            INFO(tpl.name, " -> ", rep.verdict, " ", rep.error);
            CHECK(rep.verdict == "vacuous");
        }
    }
}

TEST_CASE("coproduct coassociativity: nesting order of tensor towers") {
    auto P = spec23();
    auto f1 = std::make_shared<FockHandle>(P, 2, Scalar(7, 5), Family::Plain);
    auto f2 = std::make_shared<FockHandle>(P, 2, Scalar(3, 2), Family::Plain);
    auto f3 = std::make_shared<FockHandle>(P, 2, Scalar(11, 7), Family::Plain);
    auto left = std::make_shared<TensorHandle>(std::make_shared<TensorHandle>(f1, f2), f3);
    auto right = std::make_shared<TensorHandle>(f1, std::make_shared<TensorHandle>(f2, f3));
    auto reassoc = [](const BasisKey& k) {
        // ((a,b),c) -> (a,(b,c))
        return BasisKey::pair(k.left().left(), BasisKey::pair(k.left().right(), k.right()));
    };
    for (auto& key : left->basis(2)) {
        for (long mode = -2; mode <= 2; ++mode) {
            for (AtomKind kind : {AtomKind::E, AtomKind::F, AtomKind::PsiP, AtomKind::PsiM,
                                  AtomKind::K0P, AtomKind::K0M}) {
                Atom a = Atom::make(Family::Plain, kind);
                Vec x = left->apply(a, mode, Vec::unit(key));
                Vec xr;
                for (auto& [kk, c] : x.terms()) xr.add(reassoc(kk), c);
                Vec y = right->apply(a, mode, Vec::unit(reassoc(key)));
                REQUIRE(xr == y);
            }
        }
    }
}

TEST_CASE("DeltaK closed form matches the lifted k-currents on F2 x F2") {
    auto P = spec23();
    auto m = std::make_shared<TensorHandle>(
        std::make_shared<FockHandle>(P, 2, Scalar(7, 5), Family::Plain),
        std::make_shared<FockHandle>(P, 2, Scalar(3, 2), Family::Plain));
    Evaluator ev(m);
    CheckSettings cfg;
    cfg.cutoff = 2;
    cfg.wlo = -2;
    cfg.whi = 2;
    CatalogOptions opt;
    opt.r_max = 2;
    for (auto& tpl : catalog_family("lemma_delta_k", *m, opt)) {
        auto rep = check_template(tpl, m, ev, cfg);
        INFO(tpl.name, " -> ", rep.verdict, " ", rep.error);
        CHECK(rep.verdict == "pass");
    }
}

TEST_CASE("appendix-C exchange identities hold on F1") {
    auto P = spec23();
    auto m = std::make_shared<FockHandle>(P, 1, Scalar(7, 5), Family::Plain);
    Evaluator ev(m);
    CheckSettings cfg;
    cfg.cutoff = 3;
    cfg.wlo = -3;
    cfg.whi = 3;
    for (auto& tpl : catalog_family("appendix_c", *m)) {
        auto rep = check_template(tpl, m, ev, cfg);
        INFO(tpl.name, " -> ", rep.verdict, " ", rep.error);
        CHECK(rep.verdict == "pass");
    }
}

TEST_CASE("twist coherence: automorphism = index shift applied twice") {
    auto P = spec23();
    auto base = tower_n2(P);
    auto aut = ANHandle::twist(TwistKind::Automorphism, base);
    auto twice = ANHandle::twist(TwistKind::IndexShift,
                                 ANHandle::twist(TwistKind::IndexShift, base));
    CHECK(aut->xp_parity() == twice->xp_parity());
    CHECK(aut->xm_parity() == twice->xm_parity());
    for (auto& key : base->basis(2)) {
        for (long mode = -2; mode <= 2; ++mode) {
            for (Family f : {Family::Plain, Family::Checked}) {
                for (AtomKind kind : {AtomKind::E, AtomKind::F, AtomKind::PsiP, AtomKind::PsiM,
                                      AtomKind::K0P, AtomKind::K0M}) {
                    Atom a = Atom::make(f, kind);
                    CHECK(aut->apply(a, mode, Vec::unit(key)) ==
                          twice->apply(a, mode, Vec::unit(key)));
                }
            }
            for (long di = -2; di <= 2; ++di) {
                for (AtomKind kind : {AtomKind::Xp, AtomKind::Xm}) {
                    if (!aut->x_index_valid(kind, di)) continue;
                    Atom a = Atom::make(Family::Plain, kind, di);
                    CHECK(aut->apply(a, mode, Vec::unit(key)) ==
                          twice->apply(a, mode, Vec::unit(key)));
                }
            }
        }
    }
}

TEST_CASE("switch maps the plain A1 Fock base to the checked one") {
    auto P = spec23();
    auto plain = ANHandle::fock_a1(P, Scalar(7, 5), false);
    auto switched = ANHandle::twist(TwistKind::Switch, plain);
    auto target = ANHandle::fock_a1(P.swapped(), Scalar(7, 5), true);
    CHECK(switched->level(Family::Plain) == target->level(Family::Plain));
    CHECK(switched->level(Family::Checked) == target->level(Family::Checked));
    for (auto& key : plain->basis(3)) {
        for (long mode = -2; mode <= 2; ++mode) {
            for (Family f : {Family::Plain, Family::Checked}) {
                for (AtomKind kind : {AtomKind::E, AtomKind::F, AtomKind::PsiP, AtomKind::PsiM,
                                      AtomKind::K0P, AtomKind::K0M}) {
                    Atom a = Atom::make(f, kind);
                    CHECK(switched->apply(a, mode, Vec::unit(key)) ==
                          target->apply(a, mode, Vec::unit(key)));
                }
            }
        }
    }
}

TEST_CASE("twisted tower re-passes the group-3 suite") {
    CheckSettings cfg;
    cfg.cutoff = 2;
    cfg.wlo = -2;
    cfg.whi = 2;
    auto P = spec23();
    auto m = ANHandle::twist(TwistKind::Automorphism, tower_n2(P));
    Evaluator ev(m);
    CatalogOptions opt;
    opt.idx = 2;
    for (auto& tpl : catalog_family("an_group3", *m, opt)) {
        auto rep = check_template(tpl, m, ev, cfg);
        INFO(tpl.name, " -> ", rep.verdict, " ", rep.error);
        CHECK(rep.ok());
    }
}

TEST_CASE("fusion associativity and Cartan inverses") {
    auto P = spec23();
    auto m = std::make_shared<FockHandle>(P, 2, Scalar(7, 5), Family::Plain);
    Evaluator ev(m);
    CheckSettings cfg;
    cfg.cutoff = 2;
    cfg.wlo = -2;
    cfg.whi = 2;
    auto rep = check_fusion_associativity(m, ev, cfg);
    INFO(rep.error);
    CHECK(rep.verdict == "pass");
    auto rep2 = check_cartan_inverse(m, ev, cfg);
    INFO(rep2.error);
    CHECK(rep2.verdict == "pass");
}
