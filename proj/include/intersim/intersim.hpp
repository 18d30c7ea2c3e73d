#pragma once

#include "intersim/adaptive.hpp"
#include "intersim/denoise.hpp"
#include "intersim/energy.hpp"
#include "intersim/engine.hpp"
#include "intersim/error.hpp"
#include "intersim/geometry.hpp"
#include "intersim/io.hpp"
#include "intersim/metrics.hpp"
#include "intersim/scenario.hpp"
#include "intersim/select.hpp"
#include "intersim/spatial_grid.hpp"
#include "intersim/trajectory.hpp"
#include "intersim/types.hpp"
#include "intersim/velocity_dataset.hpp"
