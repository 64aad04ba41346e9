#pragma once

#include "toroidal/scalar.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace toroidal {

enum class Direction { AtZero, AtInfinity };

struct NotExpandable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One-variable Laurent series known exactly on a window [lo, hi].
// Coefficients outside the window are unknown, never assumed zero; all
// operations shrink windows conservatively.
class DirectedSeries {
public:
    DirectedSeries(Direction d, long lo, long hi) : dir_(d), lo_(lo), hi_(hi) {
        if (lo > hi) throw std::logic_error("DirectedSeries: empty window");
    }

    Direction direction() const { return dir_; }
    long lo() const { return lo_; }
    long hi() const { return hi_; }

    void set(long k, const Scalar& c) {
        if (k < lo_ || k > hi_) throw std::logic_error("DirectedSeries::set outside window");
        if (c.is_zero()) coeffs_.erase(k);
        else coeffs_[k] = c;
    }
    void add(long k, const Scalar& c) {
        if (k < lo_ || k > hi_) throw std::logic_error("DirectedSeries::add outside window");
        auto [it, fresh] = coeffs_.emplace(k, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) coeffs_.erase(it);
        }
    }

    // nullopt when the exponent lies outside the guaranteed window.
    std::optional<Scalar> coeff(long k) const {
        if (k < lo_ || k > hi_) return std::nullopt;
        auto it = coeffs_.find(k);
        return it == coeffs_.end() ? Scalar(0) : it->second;
    }

    // Adding two series of different directions is a type error: such sums
    // only make sense inside TwoVarDistribution (or after delta extraction).
    DirectedSeries combined(const DirectedSeries& o, bool subtract) const {
        if (dir_ != o.dir_) throw std::logic_error("DirectedSeries: direction mismatch in add/sub");
        long l = std::max(lo_, o.lo_), h = std::min(hi_, o.hi_);
        if (l > h) throw std::logic_error("DirectedSeries: disjoint windows");
        DirectedSeries r(dir_, l, h);
        for (long k = l; k <= h; ++k) {
            Scalar c = *coeff(k) + (subtract ? -*o.coeff(k) : *o.coeff(k));
            r.set(k, c);
        }
        return r;
    }
    friend DirectedSeries operator+(const DirectedSeries& a, const DirectedSeries& b) { return a.combined(b, false); }
    friend DirectedSeries operator-(const DirectedSeries& a, const DirectedSeries& b) { return a.combined(b, true); }

    DirectedSeries scaled(const Scalar& c) const {
        DirectedSeries r(dir_, lo_, hi_);
        for (auto& [k, v] : coeffs_) r.set(k, v * c);
        return r;
    }
    // Multiply by c * x^e (window shifts).
    DirectedSeries mono_mul(const Scalar& c, long e) const {
        DirectedSeries r(dir_, lo_ + e, hi_ + e);
        for (auto& [k, v] : coeffs_) r.set(k + e, v * c);
        return r;
    }
    // Substitute x -> a*x.
    DirectedSeries arg_scale(const Scalar& a) const {
        DirectedSeries r(dir_, lo_, hi_);
        for (auto& [k, v] : coeffs_) r.set(k, v * a.pow(k));
        return r;
    }

    bool known_zero() const { return coeffs_.empty(); }

    // log of a series with coeff(0) == 1, on the same window; requires the
    // window to contain 0 and to be one-sided (all support >= 0 or <= 0).
    DirectedSeries log() const {
        if (lo_ > 0 || hi_ < 0 || !coeff(0) || *coeff(0) != Scalar(1))
            throw std::logic_error("DirectedSeries::log needs unit constant term");
        bool up = hi_ > 0;
        if (lo_ < 0 && hi_ > 0) throw std::logic_error("DirectedSeries::log: two-sided support");
        long n = up ? hi_ : -lo_;
        // l_k determined by S' = S * L' (formal derivative recursion).
        DirectedSeries L(dir_, lo_, hi_);
        std::map<long, Scalar> l;
        for (long k = 1; k <= n; ++k) {
            long sk = up ? k : -k;
            Scalar acc = *coeff(sk) * Scalar(k);
            for (long j = 1; j < k; ++j) {
                long sj = up ? j : -j;
                Scalar lc = l.count(sj) ? l[sj] : Scalar(0);
                acc -= lc * Scalar(j) * *coeff(up ? (k - j) : -(k - j));
            }
            l[sk] = acc / Scalar(k);
        }
        for (auto& [k, v] : l) L.set(k, v);
        return L;
    }

    const std::map<long, Scalar>& nonzero() const { return coeffs_; }

private:
    Direction dir_;
    long lo_, hi_;
    std::map<long, Scalar> coeffs_;
};

// Rational function in one variable: Laurent num/den over Q.
class RationalFunction1 {
public:
    using LPoly = std::map<long, Scalar>; // exponent -> coefficient

    RationalFunction1() { den_[0] = Scalar(1); }
    RationalFunction1(LPoly num, LPoly den) : num_(std::move(num)), den_(std::move(den)) {
        prune(num_);
        prune(den_);
        if (den_.empty()) throw std::domain_error("RationalFunction1: zero denominator");
    }

    static RationalFunction1 from_poly(LPoly num) { return RationalFunction1(std::move(num), {{0, Scalar(1)}}); }
    // (1 - c x)
    static LPoly one_minus(const Scalar& c) { return {{0, Scalar(1)}, {1, -c}}; }
    static LPoly lmul(const LPoly& a, const LPoly& b) {
        LPoly r;
        for (auto& [ea, ca] : a)
            for (auto& [eb, cb] : b) {
                auto [it, fresh] = r.emplace(ea + eb, ca * cb);
                if (!fresh) it->second += cb * ca;
            }
        prune(r);
        return r;
    }
    static LPoly ladd(const LPoly& a, const LPoly& b, bool sub = false) {
        LPoly r = a;
        for (auto& [e, c] : b) {
            auto [it, fresh] = r.emplace(e, sub ? -c : c);
            if (!fresh) it->second += sub ? -c : c;
        }
        prune(r);
        return r;
    }

    const LPoly& num() const { return num_; }
    const LPoly& den() const { return den_; }
    bool is_zero() const { return num_.empty(); }

    RationalFunction1 operator*(const RationalFunction1& o) const {
        return RationalFunction1(lmul(num_, o.num_), lmul(den_, o.den_));
    }
    RationalFunction1 operator/(const RationalFunction1& o) const {
        if (o.is_zero()) throw std::domain_error("RationalFunction1: division by zero");
        return RationalFunction1(lmul(num_, o.den_), lmul(den_, o.num_));
    }
    RationalFunction1 operator+(const RationalFunction1& o) const {
        return RationalFunction1(ladd(lmul(num_, o.den_), lmul(o.num_, den_)), lmul(den_, o.den_));
    }
    RationalFunction1 operator-(const RationalFunction1& o) const {
        return RationalFunction1(ladd(lmul(num_, o.den_), lmul(o.num_, den_), true), lmul(den_, o.den_));
    }

    // Exact equality as rational functions (cross-multiplied).
    bool equals(const RationalFunction1& o) const {
        return ladd(lmul(num_, o.den_), lmul(o.num_, den_), true).empty();
    }

    // Substitute x -> c * x^e (e in {1,-1}).
    RationalFunction1 subst(const Scalar& c, int e = 1) const {
        auto map1 = [&](const LPoly& p) {
            LPoly r;
            for (auto& [k, v] : p) r[e * k] = v * c.pow(k);
            return r;
        };
        return RationalFunction1(map1(num_), map1(den_));
    }

    Scalar eval(const Scalar& x) const {
        Scalar n(0), d(0);
        for (auto& [e, c] : num_) n += c * x.pow(e);
        for (auto& [e, c] : den_) d += c * x.pow(e);
        if (d.is_zero()) throw std::domain_error("RationalFunction1::eval: pole");
        return n / d;
    }

    // Directed expansion with at least `order` guaranteed coefficients.
    DirectedSeries expand(Direction dir, long order) const {
        if (order < 1) throw std::logic_error("expand: order must be >= 1");
        if (num_.empty()) {
            // identically zero: any window works
            long lo = dir == Direction::AtZero ? 0 : -(order - 1);
            return DirectedSeries(dir, lo, lo + order - 1);
        }
        bool at0 = dir == Direction::AtZero;
        // Pivot term of the denominator: lowest exponent at 0, highest at infinity.
        long dp = at0 ? den_.begin()->first : den_.rbegin()->first;
        Scalar dc = at0 ? den_.begin()->second : den_.rbegin()->second;
        long np = at0 ? num_.begin()->first : num_.rbegin()->first;
        long start = np - dp; // leading exponent of the expansion
        long lo, hi;
        if (at0) { lo = start; hi = start + order - 1; }
        else { hi = start; lo = start - order + 1; }
        DirectedSeries out(dir, lo, hi);

        // Long division: r := num; repeatedly strip the leading term.
        LPoly rem = num_;
        for (long step = 0; step < order && !rem.empty(); ++step) {
            long re = at0 ? rem.begin()->first : rem.rbegin()->first;
            Scalar rc = at0 ? rem.begin()->second : rem.rbegin()->second;
            long e = re - dp;
            if (at0 ? (e > hi) : (e < lo)) break;
            Scalar q = rc / dc;
            out.set(e, q);
            for (auto& [de, c] : den_) {
                long te = e + de;
                auto [it, fresh] = rem.emplace(te, -q * c);
                if (!fresh) {
                    it->second -= q * c;
                    if (it->second.is_zero()) rem.erase(it);
                }
            }
        }
        return out;
    }

private:
    static void prune(LPoly& p) {
        for (auto it = p.begin(); it != p.end();)
            it = it->second.is_zero() ? p.erase(it) : std::next(it);
    }

    LPoly num_, den_;
};

// Two-variable distribution: a windowed Laurent part in (z, w) plus formal
// delta terms. A delta term has normalized support "w = z/alpha" (that is,
// the factor delta(alpha*w/z)) and a scalar coefficient series in z.
class TwoVarDistribution {
public:
    struct Window {
        long alo, ahi, blo, bhi; // exponents of z^-a w^-b known exactly
    };

    explicit TwoVarDistribution(Window w) : win_(w) {}

    static Scalar normalize_support(const Scalar& alpha) { return alpha; }

    void add_laurent(long a, long b, const Scalar& c) {
        if (a < win_.alo || a > win_.ahi || b < win_.blo || b > win_.bhi)
            throw std::logic_error("TwoVarDistribution: outside window");
        if (c.is_zero()) return;
        auto key = std::make_pair(a, b);
        auto [it, fresh] = laurent_.emplace(key, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) laurent_.erase(it);
        }
    }

    // delta(alpha*w/z) * (series in z); equal supports merge.
    void add_delta(const Scalar& alpha, const DirectedSeries& coeff) {
        auto it = deltas_.find(alpha);
        if (it == deltas_.end()) deltas_.emplace(alpha, coeff);
        else it->second = it->second + coeff;
        auto jt = deltas_.find(alpha);
        if (jt->second.known_zero()) deltas_.erase(jt);
    }

    const std::map<Scalar, DirectedSeries>& deltas() const { return deltas_; }

    TwoVarDistribution combined(const TwoVarDistribution& o, bool subtract) const {
        Window w{std::max(win_.alo, o.win_.alo), std::min(win_.ahi, o.win_.ahi),
                 std::max(win_.blo, o.win_.blo), std::min(win_.bhi, o.win_.bhi)};
        TwoVarDistribution r(w);
        for (auto& [k, c] : laurent_)
            if (k.first >= w.alo && k.first <= w.ahi && k.second >= w.blo && k.second <= w.bhi)
                r.add_laurent(k.first, k.second, c);
        for (auto& [k, c] : o.laurent_)
            if (k.first >= w.alo && k.first <= w.ahi && k.second >= w.blo && k.second <= w.bhi)
                r.add_laurent(k.first, k.second, subtract ? -c : c);
        for (auto& [al, s] : deltas_) r.add_delta(al, s);
        for (auto& [al, s] : o.deltas_) r.add_delta(al, subtract ? s.scaled(Scalar(-1)) : s);
        return r;
    }

    // Exact coefficient of z^-a w^-b, delta contributions included;
    // nullopt when (a,b) or a needed delta-series exponent is unwindowed.
    std::optional<Scalar> coeff(long a, long b) const {
        if (a < win_.alo || a > win_.ahi || b < win_.blo || b > win_.bhi) return std::nullopt;
        Scalar acc(0);
        auto it = laurent_.find({a, b});
        if (it != laurent_.end()) acc = it->second;
        // delta(alpha*w/z) = sum_n alpha^n w^n z^-n : z^-a w^-b needs n = a and
        // the series-in-z coefficient at z^-(a+b).
        for (auto& [alpha, s] : deltas_) {
            auto c = s.coeff(a + b);
            if (!c) return std::nullopt;
            acc += alpha.pow(a) * *c;
        }
        return acc;
    }

    const Window& window() const { return win_; }

private:
    Window win_;
    std::map<std::pair<long, long>, Scalar> laurent_;
    std::map<Scalar, DirectedSeries> deltas_;
};

} // namespace toroidal
