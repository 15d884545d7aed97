#pragma once

#include <array>
#include <string>

namespace vsseq {

// NEHRP letter classes in stiffness order, softest first.
enum class SiteClass { E = 0, D = 1, C = 2, B = 3, A = 4 };

struct ClassBoundaries {
    // Upper bounds of E, D, C, B; values on a boundary belong to the upper
    // class (vs30 = 360 is C). Anything >= the last threshold is A.
    std::array<double, 4> thresholds{180.0, 360.0, 760.0, 1500.0};

    void validate() const;  // throws unless strictly increasing and positive
};

SiteClass classify(double vs30, const ClassBoundaries& bounds = {});

std::string site_class_label(SiteClass c);

}  // namespace vsseq
