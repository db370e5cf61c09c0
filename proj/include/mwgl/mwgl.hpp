#pragma once

// Learning the factor graphs of a Cartesian product graph from multi-way
// signals: penalized maximum-likelihood estimation under Laplacian
// constraints, with joint imputation of structurally missing nodes, plus
// the synthetic generators and metrics used to validate the estimator.

#include "mwgl/errors.hpp"
#include "mwgl/experiment.hpp"
#include "mwgl/graph.hpp"
#include "mwgl/io.hpp"
#include "mwgl/metrics.hpp"
#include "mwgl/missing.hpp"
#include "mwgl/signals.hpp"
#include "mwgl/solver.hpp"
#include "mwgl/spectral.hpp"
#include "mwgl/synth.hpp"
