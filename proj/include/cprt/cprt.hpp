#pragma once

// Umbrella header for the CPRT library.

#include "cprt/annotation.hpp"
#include "cprt/boundary_derivation.hpp"
#include "cprt/canonical.hpp"
#include "cprt/embedding.hpp"
#include "cprt/error.hpp"
#include "cprt/io.hpp"
#include "cprt/metrics.hpp"
#include "cprt/parallel.hpp"
#include "cprt/rng.hpp"
#include "cprt/scoring.hpp"
#include "cprt/taxonomy.hpp"
#include "cprt/version.hpp"
