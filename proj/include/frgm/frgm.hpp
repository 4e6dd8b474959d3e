#pragma once

#include "frgm/bench.hpp"
#include "frgm/core.hpp"
#include "frgm/deform.hpp"
#include "frgm/features.hpp"
#include "frgm/frgm_euclid.hpp"
#include "frgm/frgm_general.hpp"
#include "frgm/io.hpp"
#include "frgm/lap.hpp"
#include "frgm/optimizer.hpp"
#include "frgm/outlier.hpp"
#include "frgm/sinkhorn.hpp"
#include "frgm/types.hpp"
