#include "ccpxva/rng.hpp"

#include <boost/math/special_functions/erf.hpp>

namespace ccpxva {

double inverse_normal_cdf(double p) {
    // Phi^{-1}(p) = -sqrt(2) erfc^{-1}(2p)
    return -1.4142135623730951 * boost::math::erfc_inv(2.0 * p);
}

}  // namespace ccpxva
