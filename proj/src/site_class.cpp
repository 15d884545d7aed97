#include "vsseq/site_class.hpp"

#include <stdexcept>

namespace vsseq {

void ClassBoundaries::validate() const {
    double prev = 0.0;
    for (double t : thresholds) {
        if (t <= prev) throw std::invalid_argument("ClassBoundaries: thresholds must increase");
        prev = t;
    }
}

SiteClass classify(double vs30, const ClassBoundaries& bounds) {
    if (vs30 <= 0.0) throw std::invalid_argument("classify: vs30 must be positive");
    bounds.validate();
    if (vs30 < bounds.thresholds[0]) return SiteClass::E;
    if (vs30 < bounds.thresholds[1]) return SiteClass::D;
    if (vs30 < bounds.thresholds[2]) return SiteClass::C;
    if (vs30 < bounds.thresholds[3]) return SiteClass::B;
    return SiteClass::A;
}

std::string site_class_label(SiteClass c) {
    switch (c) {
        case SiteClass::E: return "E";
        case SiteClass::D: return "D";
        case SiteClass::C: return "C";
        case SiteClass::B: return "B";
        case SiteClass::A: return "A";
    }
    return "?";
}

}  // namespace vsseq
