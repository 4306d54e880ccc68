#pragma once

#include "jetcalc/error.hpp"
#include "jetcalc/rational.hpp"
#include "jetcalc/syntax.hpp"
#include "jetcalc/expr.hpp"
#include "jetcalc/exterior.hpp"
#include "jetcalc/linalg.hpp"
#include "jetcalc/bundle.hpp"
#include "jetcalc/connection.hpp"
#include "jetcalc/legendre.hpp"
#include "jetcalc/spinor.hpp"
#include "jetcalc/scenario.hpp"
#include "jetcalc/checks.hpp"
