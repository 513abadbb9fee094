#pragma once

#include "assembly.hpp"
#include "bayes.hpp"
#include "errors.hpp"
#include "feature_basis.hpp"
#include "metrics.hpp"
#include "operators.hpp"
#include "pielm.hpp"
#include "point.hpp"
#include "problems.hpp"
#include "random.hpp"
#include "experiment.hpp"
