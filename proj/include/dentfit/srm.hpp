#pragma once

#include "dentfit/height_field.hpp"

namespace dentfit {

// Box measures as a repair manual defines them: the length is the longest
// end-to-end distance across the dent, the width the longest chord at 90
// degrees to it, and the depth is read on that width section.
struct SrmMeasures {
    double length = 0.0;
    double width = 0.0;
    double depth_at_width_section = 0.0;
    double max_depth = 0.0;
    // Direction of the length axis in the field frame (degrees, [0, 180)).
    double length_angle_deg = 0.0;
    // Signed position of the width section along the length axis (mm).
    double width_section_offset = 0.0;

    // How much the box depth under-reports the true maximum.
    double depth_discrepancy() const noexcept { return max_depth - depth_at_width_section; }
};

// Directions are searched at 0.5 degree steps; the longest extent wins and
// ties go to the smaller angle. Throws DegenerateGeometryError on an empty field.
SrmMeasures srm_box_measures(const HeightField& field);

}  // namespace dentfit
