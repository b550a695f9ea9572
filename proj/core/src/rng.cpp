#include "cramerlab/rng.hpp"

#include "cramerlab/numeric.hpp"

namespace cramerlab {

double Rng::normal() { return normal_quantile(uniform()); }

}  // namespace cramerlab
