#pragma once

#include "hybdiff/signals.hpp"
#include "hybdiff/differentiators.hpp"
#include "hybdiff/integrator.hpp"
#include "hybdiff/linalg.hpp"
#include "hybdiff/quadrature.hpp"
#include "hybdiff/analysis.hpp"
#include "hybdiff/metrics.hpp"
#include "hybdiff/report.hpp"
#include "hybdiff/scenario.hpp"
#include "hybdiff/cli.hpp"
