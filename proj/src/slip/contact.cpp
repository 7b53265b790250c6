#include "gelgrip/core/error.hpp"
#include "gelgrip/slip/slip.hpp"

namespace gelgrip::slip {

ContactMask segment_contact(const HeightMap& h, double threshold_mm) {
  if (!(threshold_mm > 0.0)) throw Error("contact threshold must be positive");
  return ContactMask(h.values().array() > threshold_mm, threshold_mm);
}

}  // namespace gelgrip::slip
