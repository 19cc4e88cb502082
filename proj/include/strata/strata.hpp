#ifndef STRATA_STRATA_HPP
#define STRATA_STRATA_HPP

#include "strata/errors.hpp"
#include "strata/random.hpp"
#include "strata/optimize.hpp"
#include "strata/group.hpp"
#include "strata/quasi_norm.hpp"
#include "strata/grid.hpp"
#include "strata/field.hpp"
#include "strata/measure.hpp"
#include "strata/quadrature.hpp"
#include "strata/spectral.hpp"
#include "strata/derivatives.hpp"
#include "strata/family.hpp"
#include "strata/constants.hpp"
#include "strata/inequalities.hpp"
#include "strata/transforms.hpp"
#include "strata/heat.hpp"
#include "strata/config.hpp"
#include "strata/report_io.hpp"
#include "strata/suite.hpp"

#endif  // STRATA_STRATA_HPP
