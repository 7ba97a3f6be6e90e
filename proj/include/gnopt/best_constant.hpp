#pragma once

#include "gnopt/params.hpp"

namespace gnopt {

/// Closed-form best constant A(p,q) of the Euclidean inequality on the family
/// p < q <= p(n-1)/(n-p), r = p(q-1)/(p-1). Evaluated in log space.
/// Throws DomainError outside that family.
double closed_form_A(const GNParams& params);

} // namespace gnopt
