#pragma once

#include "bondsim/chebyshev.hpp"
#include "bondsim/cir.hpp"
#include "bondsim/core_model.hpp"
#include "bondsim/diffusion.hpp"
#include "bondsim/fpt.hpp"
#include "bondsim/limits.hpp"
#include "bondsim/parallel.hpp"
#include "bondsim/params.hpp"
#include "bondsim/quadrature.hpp"
#include "bondsim/rng.hpp"
#include "bondsim/specfun.hpp"
#include "bondsim/ssa.hpp"
#include "bondsim/stats.hpp"
#include "bondsim/trajectory.hpp"
