#pragma once

// Umbrella header.

#include "unwind/curve.hpp"
#include "unwind/params.hpp"
#include "unwind/riccati.hpp"
#include "unwind/closed_form.hpp"
#include "unwind/policy.hpp"
#include "unwind/rng.hpp"
#include "unwind/inflow_sim.hpp"
#include "unwind/metrics.hpp"
#include "unwind/config.hpp"
#include "unwind/experiments.hpp"
