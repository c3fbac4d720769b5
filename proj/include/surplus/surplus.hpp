#pragma once

#include "surplus/acceptance.hpp"
#include "surplus/duality.hpp"
#include "surplus/error.hpp"
#include "surplus/findim.hpp"
#include "surplus/loss.hpp"
#include "surplus/lp.hpp"
#include "surplus/positive.hpp"
#include "surplus/risk_checks.hpp"
#include "surplus/risk_measure.hpp"
#include "surplus/sampling.hpp"
#include "surplus/scenario.hpp"
#include "surplus/structure.hpp"
#include "surplus/utility.hpp"
#include "surplus/verdict.hpp"
