#pragma once

#include "toroidal/template.hpp"

#include <cstdint>

namespace toroidal {

struct Counterexample {
    std::string basis;
    long a = 0, b = 0;
    std::string subrelation;
    std::string value; // exact rational discrepancy (componentwise vector shown)
};

struct CheckReport {
    std::string name;
    std::string family;
    std::string module;
    std::string param_digest;
    int cutoff = 0;
    long wlo = 0, whi = 0;
    std::string verdict; // pass | vacuous | fail | error
    std::vector<Counterexample> counterexamples;
    std::string error;
    std::uint64_t cells = 0;
    double ms = 0.0;

    bool ok() const { return verdict == "pass" || verdict == "vacuous"; }
};

struct CheckSettings {
    int cutoff = 4;
    long wlo = -4, whi = 4;
    int max_counterexamples = 5;
};

// Windowed check of one template on one module: every basis vector up to the
// cutoff, every coefficient in the window, exact arithmetic throughout.
CheckReport check_template(const RelationTemplate& tpl, std::shared_ptr<const ModuleHandle> mod,
                           const Evaluator& ev, const CheckSettings& cfg);

// Lemma ass lem as an operational property: all parenthesizations of the
// triple fused products inside e^{(3)}, f^{(3)} agree on the module.
CheckReport check_fusion_associativity(std::shared_ptr<const ModuleHandle> mod,
                                       const Evaluator& ev, const CheckSettings& cfg);

// psi^+ * CartanInverse(psi^+) == identity (and the k0 variants) on windows.
CheckReport check_cartan_inverse(std::shared_ptr<const ModuleHandle> mod, const Evaluator& ev,
                                 const CheckSettings& cfg);

} // namespace toroidal
