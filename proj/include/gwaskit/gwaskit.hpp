#pragma once

// Umbrella header.

#include "decoders.hpp"
#include "divergence.hpp"
#include "entropy.hpp"
#include "genmodel.hpp"
#include "harness.hpp"
#include "rng.hpp"
#include "subseq.hpp"
#include "typicality.hpp"
#include "verify.hpp"
