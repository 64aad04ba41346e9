#include "toroidal/checker.hpp"

#include <fmt/format.h>

#include <chrono>

namespace toroidal {

namespace {

bool is_right_module(const ModuleHandle& m) {
    auto vh = dynamic_cast<const VectorHandle*>(&m);
    return vh && vh->side() == VectorHandle::Side::Right;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

void record_counterexample(CheckReport& rep, const CheckSettings& cfg, const BasisKey& key, long a,
                           long b, const std::string& sub, const Vec& diff) {
    if (static_cast<int>(rep.counterexamples.size()) >= cfg.max_counterexamples) return;
    rep.counterexamples.push_back({key.str(), a, b, sub, diff.str()});
}

// A term is hollow when a factor current is structurally the zero operator
// on this module (X on pure Fock towers, the other family's e/f on a Fock
// base). A computed zero of non-hollow terms is a substantive cancellation.
bool term_hollow(const Term& t, const ModuleHandle& mod) {
    for (auto& f : t.factors)
        for (auto& l : f.leaves)
            if (mod.atom_is_zero(l.atom)) return true;
    return false;
}
bool mode_term_hollow(const ModeTerm& t, const ModuleHandle& mod) {
    for (auto& [a, m] : t.ops)
        if (mod.atom_is_zero(a)) return true;
    return false;
}

} // namespace

CheckReport check_template(const RelationTemplate& tpl, std::shared_ptr<const ModuleHandle> mod,
                           const Evaluator& ev, const CheckSettings& cfg) {
    Timer timer;
    CheckReport rep;
    rep.name = tpl.name;
    rep.family = tpl.family;
    rep.module = mod->describe();
    rep.param_digest = mod->spec().digest();
    rep.cutoff = cfg.cutoff;
    rep.wlo = cfg.wlo;
    rep.whi = cfg.whi;

    bool reverse = is_right_module(*mod);
    bool any_term_nonzero = false;
    bool failed = false;

    try {
        auto basis = mod->basis(cfg.cutoff);
        bool any_eval_nonzero = false;
        bool any_solid_term = false; // some term has no structurally-zero factor
        if (tpl.is_mode_template()) {
            for (auto& mr : tpl.mode_relations) {
                for (auto& mt : mr.terms)
                    if (!mode_term_hollow(mt, *mod)) any_solid_term = true;
                for (auto& key : basis) {
                    Vec total;
                    for (auto& mt : mr.terms) {
                        Vec part = eval_mode_term(mt, ev, key, reverse);
                        if (!part.is_zero()) any_eval_nonzero = true;
                        total += part;
                    }
                    ++rep.cells;
                    if (!total.is_zero()) {
                        failed = true;
                        record_counterexample(rep, cfg, key, 0, 0, mr.label, total);
                    }
                }
            }
        } else {
            for (auto& rel : tpl.subrelations)
                for (auto& term : rel.terms)
                    if (!term_hollow(term, *mod)) any_solid_term = true;
            for (auto& key : basis) {
                for (std::size_t si = 0; si < tpl.subrelations.size(); ++si) {
                    auto& rel = tpl.subrelations[si];
                    for (long a = cfg.wlo; a <= cfg.whi; ++a) {
                        long blo = tpl.nvars == 2 ? cfg.wlo : 0;
                        long bhi = tpl.nvars == 2 ? cfg.whi : 0;
                        for (long b = blo; b <= bhi; ++b) {
                            Vec total;
                            for (auto& term : rel.terms) {
                                Vec part = eval_term(term, ev, key, a, b, reverse);
                                if (!part.is_zero()) any_eval_nonzero = true;
                                total += part;
                            }
                            ++rep.cells;
                            if (!total.is_zero()) {
                                failed = true;
                                record_counterexample(rep, cfg, key, a, b,
                                                      fmt::format("sub{}", si), total);
                            }
                        }
                    }
                }
            }
        }
        any_term_nonzero = any_eval_nonzero;
        if (failed) rep.verdict = "fail";
        else rep.verdict = (any_eval_nonzero || any_solid_term) ? "pass" : "vacuous";
        if (tpl.requires_x_zero && any_eval_nonzero) {
            rep.verdict = "fail";
            rep.error = "template must evaluate to the zero operator on this module";
        }
    } catch (const std::exception& e) {
        rep.verdict = "error";
        rep.error = e.what();
    }
    rep.ms = timer.ms();
    return rep;
}

CheckReport check_fusion_associativity(std::shared_ptr<const ModuleHandle> mod,
                                       const Evaluator& ev, const CheckSettings& cfg) {
    Timer timer;
    CheckReport rep;
    rep.name = "fusion_associativity_e3_f3";
    rep.family = "fusion";
    rep.module = mod->describe();
    rep.param_digest = mod->spec().digest();
    rep.cutoff = cfg.cutoff;
    rep.wlo = cfg.wlo;
    rep.whi = cfg.whi;

    try {
        const ParamSpec& spec = mod->spec();
        bool nonzero = false, failed = false;
        for (AtomKind kind : {AtomKind::E, AtomKind::F}) {
            WeightedTree wt = kind == AtomKind::E ? named_e_r(spec, Family::Plain, 3)
                                                  : named_f_r(spec, Family::Plain, 3);
            auto& L = wt.leaves;
            FusionTree leftcomb{FusionTree{FusionTree{L[0]}, FusionTree{L[1]}}, FusionTree{L[2]}};
            FusionTree rightcomb{FusionTree{L[0]}, FusionTree{FusionTree{L[1]}, FusionTree{L[2]}}};
            for (auto& key : mod->basis(cfg.cutoff)) {
                for (long m = cfg.wlo; m <= cfg.whi; ++m) {
                    Vec x = ev.tree_mode_key(leftcomb, m, key);
                    Vec y = ev.tree_mode_key(rightcomb, m, key);
                    ++rep.cells;
                    if (!x.is_zero() || !y.is_zero()) nonzero = true;
                    Vec diff = x - y;
                    if (!diff.is_zero()) {
                        failed = true;
                        record_counterexample(rep, cfg, key, m, 0,
                                              kind == AtomKind::E ? "e3" : "f3", diff);
                    }
                }
            }
        }
        rep.verdict = failed ? "fail" : (nonzero ? "pass" : "vacuous");
    } catch (const std::exception& e) {
        rep.verdict = "error";
        rep.error = e.what();
    }
    rep.ms = timer.ms();
    return rep;
}

CheckReport check_cartan_inverse(std::shared_ptr<const ModuleHandle> mod, const Evaluator& ev,
                                 const CheckSettings& cfg) {
    Timer timer;
    CheckReport rep;
    rep.name = "cartan_inverse_identity";
    rep.family = "fusion";
    rep.module = mod->describe();
    rep.param_digest = mod->spec().digest();
    rep.cutoff = cfg.cutoff;
    rep.wlo = cfg.wlo;
    rep.whi = cfg.whi;
    try {
        bool failed = false;
        for (AtomKind kind : {AtomKind::PsiP, AtomKind::PsiM, AtomKind::K0P, AtomKind::K0M}) {
            auto direct = CurrentExpr::atom(Atom::make(Family::Plain, kind));
            auto inv = CurrentExpr::cartan_inverse(direct);
            auto prod = CurrentExpr::fused(direct, inv);
            for (auto& key : mod->basis(cfg.cutoff)) {
                for (long m = cfg.wlo; m <= cfg.whi; ++m) {
                    Vec got = prod.mode_apply(m, Vec::unit(key), ev);
                    Vec want = m == 0 ? Vec::unit(key) : Vec();
                    ++rep.cells;
                    Vec diff = got - want;
                    if (!diff.is_zero()) {
                        failed = true;
                        record_counterexample(rep, cfg, key, m, 0, "inv", diff);
                    }
                }
            }
        }
        rep.verdict = failed ? "fail" : "pass";
    } catch (const std::exception& e) {
        rep.verdict = "error";
        rep.error = e.what();
    }
    rep.ms = timer.ms();
    return rep;
}

} // namespace toroidal
