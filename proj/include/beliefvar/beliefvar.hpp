#ifndef BELIEFVAR_BELIEFVAR_HPP
#define BELIEFVAR_BELIEFVAR_HPP

#include "beliefvar/adjustments.hpp"
#include "beliefvar/bde.hpp"
#include "beliefvar/benchmarks.hpp"
#include "beliefvar/delta.hpp"
#include "beliefvar/doubling.hpp"
#include "beliefvar/errors.hpp"
#include "beliefvar/experiment.hpp"
#include "beliefvar/factor.hpp"
#include "beliefvar/inference.hpp"
#include "beliefvar/io.hpp"
#include "beliefvar/network.hpp"
#include "beliefvar/oracle.hpp"
#include "beliefvar/query.hpp"
#include "beliefvar/rng.hpp"
#include "beliefvar/student_t.hpp"

#endif  // BELIEFVAR_BELIEFVAR_HPP
