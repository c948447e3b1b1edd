// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header for the part-affinity-field toolkit: field synthesis,
// candidate detection, pairwise association, multi-person parsing,
// evaluation, and serialization.
#pragma once

#include "paf/associate.hpp"
#include "paf/detect.hpp"
#include "paf/error.hpp"
#include "paf/eval.hpp"
#include "paf/fieldgen.hpp"
#include "paf/geometry.hpp"
#include "paf/io.hpp"
#include "paf/parse.hpp"
#include "paf/rng.hpp"
#include "paf/scene.hpp"
#include "paf/topology.hpp"
