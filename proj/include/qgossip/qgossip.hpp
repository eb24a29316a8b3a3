#pragma once

#include "bounds.hpp"
#include "dynamics.hpp"
#include "error.hpp"
#include "graph.hpp"
#include "harness.hpp"
#include "quantization.hpp"
#include "randwalk.hpp"
#include "rng.hpp"
