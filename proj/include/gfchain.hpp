#pragma once

#include "gfchain/analysis.hpp"
#include "gfchain/error.hpp"
#include "gfchain/grid.hpp"
#include "gfchain/kernel.hpp"
#include "gfchain/measures.hpp"
#include "gfchain/model.hpp"
#include "gfchain/sampler.hpp"
