#pragma once

#include "toroidal/param.hpp"

#include <stdexcept>
#include <string>
#include <tuple>

namespace toroidal {

enum class AtomKind { E, F, PsiP, PsiM, K0P, K0M, H, Xp, Xm };

struct Atom {
    Family fam = Family::Plain;
    AtomKind kind = AtomKind::E;
    long idx = 0;      // H: mode index r; Xp/Xm: doubled first index
    bool inverted = false;

    static Atom make(Family f, AtomKind k, long idx = 0, bool inv = false) {
        return Atom{f, k, idx, inv};
    }
    std::string str() const;
    friend bool operator<(const Atom& a, const Atom& b) {
        return std::tie(a.fam, a.kind, a.idx, a.inverted) < std::tie(b.fam, b.kind, b.idx, b.inverted);
    }
    friend bool operator==(const Atom& a, const Atom& b) { return !(a < b) && !(b < a); }
};

enum class Sidedness { TwoSided, ModesGE0, ModesLE0, Zero };

struct TruncationUnsound : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedAtom : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace toroidal
