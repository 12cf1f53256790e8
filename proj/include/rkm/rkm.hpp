#ifndef RKM_RKM_HPP
#define RKM_RKM_HPP

#include "rkm/baselines.hpp"
#include "rkm/consistency.hpp"
#include "rkm/error.hpp"
#include "rkm/io.hpp"
#include "rkm/linalg.hpp"
#include "rkm/metrics.hpp"
#include "rkm/model_selection.hpp"
#include "rkm/objective.hpp"
#include "rkm/parallel.hpp"
#include "rkm/rng.hpp"
#include "rkm/solver.hpp"
#include "rkm/synthetic.hpp"
#include "rkm/types.hpp"

#endif
