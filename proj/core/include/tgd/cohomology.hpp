#pragma once

#include <functional>
#include <vector>

#include "tgd/transgressive.hpp"

namespace tgd {

// Graded cohomology of a model under the plain differential.  Index is the
// total degree; representatives are cocycles chosen deterministically.
struct GradedCohomology {
  std::vector<int> dims;
  std::vector<std::vector<TCElement>> representatives;

  int total_dim() const;
  int euler_characteristic() const;
};

GradedCohomology cohomology_dims(const ModelPtr& m);

// Twisted cohomology collapses to a parity grading because the flux may mix
// degrees.
struct ParityCohomology {
  int even_dim = 0;
  int odd_dim = 0;
  std::vector<TCElement> even_representatives;
  std::vector<TCElement> odd_representatives;
};

// The flux must be odd and closed.
ParityCohomology twisted_cohomology_dims(const ModelPtr& m, const TCElement& flux);

// True when the twisted dimensions agree on the two sides and `tau` carries
// a cocycle basis of the first side to cocycles whose classes span the
// second side's cohomology.
bool compare_duals(const ModelPtr& e, const TCElement& h, const ModelPtr& ehat,
                   const TCElement& hhat, const std::function<TCElement(const TCElement&)>& tau);

// Closed base elements whose classes generate the kernel of the pullback
// from base cohomology to model cohomology, listed by ascending degree.
std::vector<BaseElement> pullback_kernel(const ModelPtr& m);

}  // namespace tgd
