#ifndef SPLINELAB_HPP
#define SPLINELAB_HPP

#include "splinelab/registry.hpp"
#include "splinelab/quadrature.hpp"
#include "splinelab/measure.hpp"
#include "splinelab/partition.hpp"
#include "splinelab/weights.hpp"
#include "splinelab/bspline.hpp"
#include "splinelab/linalg.hpp"
#include "splinelab/chebyshev.hpp"
#include "splinelab/gram.hpp"
#include "splinelab/parallel.hpp"
#include "splinelab/projector.hpp"
#include "splinelab/perturb.hpp"
#include "splinelab/experiment.hpp"

#endif // SPLINELAB_HPP
