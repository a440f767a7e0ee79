#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "zhopf/rat.hpp"

namespace zhopf {

// Closed interval with outward-rounded double endpoints. Every arithmetic
// result is widened by one ulp per side, which keeps enclosures valid without
// touching the FPU rounding mode.
struct Iv {
    double lo = 0, hi = 0;

    Iv() = default;
    Iv(double v) : lo(v), hi(v) {}
    Iv(double l, double h) : lo(l), hi(h) {
        if (!(l <= h)) throw std::invalid_argument("Iv: inverted endpoints");
    }

    static Iv widen(double l, double h) {
        return Iv(std::nextafter(l, -std::numeric_limits<double>::infinity()),
                  std::nextafter(h, std::numeric_limits<double>::infinity()));
    }

    static Iv from_rat(const Rat& q) {
        double d = q.get_d();  // truncated toward zero
        return widen(d, d);
    }

    double mid() const { return 0.5 * (lo + hi); }
    double width() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool contains_zero() const { return lo <= 0 && 0 <= hi; }
    bool strictly_inside(const Iv& outer) const { return outer.lo < lo && hi < outer.hi; }
    bool intersects(const Iv& o) const { return !(hi < o.lo || o.hi < lo); }

    friend Iv operator+(const Iv& a, const Iv& b) { return widen(a.lo + b.lo, a.hi + b.hi); }
    friend Iv operator-(const Iv& a, const Iv& b) { return widen(a.lo - b.hi, a.hi - b.lo); }
    friend Iv operator-(const Iv& a) { return Iv(-a.hi, -a.lo); }

    friend Iv operator*(const Iv& a, const Iv& b) {
        double p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
        return widen(std::min(std::min(p1, p2), std::min(p3, p4)),
                     std::max(std::max(p1, p2), std::max(p3, p4)));
    }

    friend Iv operator/(const Iv& a, const Iv& b) {
        if (b.contains_zero()) throw std::domain_error("Iv: division by interval containing 0");
        double p1 = a.lo / b.lo, p2 = a.lo / b.hi, p3 = a.hi / b.lo, p4 = a.hi / b.hi;
        return widen(std::min(std::min(p1, p2), std::min(p3, p4)),
                     std::max(std::max(p1, p2), std::max(p3, p4)));
    }

    Iv pow(int e) const {
        if (e < 0) throw std::invalid_argument("Iv::pow: negative exponent");
        if (e == 0) return Iv(1.0);
        if (e % 2 == 0 && contains_zero()) {
            // even power over a zero-straddling interval: [0, max^e]
            double m = std::max(std::abs(lo), std::abs(hi));
            double v = 1;
            for (int i = 0; i < e; ++i) v *= m;
            return widen(0.0, v);
        }
        Iv acc(1.0);
        for (int i = 0; i < e; ++i) acc = acc * *this;
        return acc;
    }

    Iv intersect(const Iv& o) const {
        double l = std::max(lo, o.lo), h = std::min(hi, o.hi);
        if (l > h) throw std::domain_error("Iv: empty intersection");
        return Iv(l, h);
    }
};

}  // namespace zhopf
