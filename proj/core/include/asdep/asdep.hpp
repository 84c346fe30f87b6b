#pragma once

#include "asdep/active_subspace.hpp"
#include "asdep/dependency.hpp"
#include "asdep/distributions.hpp"
#include "asdep/error.hpp"
#include "asdep/gradient_estimation.hpp"
#include "asdep/linalg.hpp"
#include "asdep/model.hpp"
#include "asdep/parallel.hpp"
#include "asdep/random.hpp"
#include "asdep/sensitivity.hpp"
#include "asdep/shapley.hpp"
#include "asdep/testfns.hpp"
