#pragma once

#include "qgraph/errors.hpp"
#include "qgraph/graph.hpp"
#include "qgraph/families.hpp"
#include "qgraph/scattering.hpp"
#include "qgraph/spectral.hpp"
#include "qgraph/perturbation.hpp"
#include "qgraph/dispersion.hpp"
#include "qgraph/optimize.hpp"
#include "qgraph/io.hpp"
#include "qgraph/verify.hpp"
