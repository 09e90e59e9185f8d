#pragma once

// Umbrella header: the whole library, one include.

#include "spmmkit/bench.hpp"
#include "spmmkit/controlled.hpp"
#include "spmmkit/dataset.hpp"
#include "spmmkit/features.hpp"
#include "spmmkit/gbdt.hpp"
#include "spmmkit/kernel_id.hpp"
#include "spmmkit/matrix_market.hpp"
#include "spmmkit/metrics.hpp"
#include "spmmkit/partition.hpp"
#include "spmmkit/reduce.hpp"
#include "spmmkit/rmat.hpp"
#include "spmmkit/selector.hpp"
#include "spmmkit/spmm.hpp"
#include "spmmkit/types.hpp"
#include "spmmkit/worker.hpp"
