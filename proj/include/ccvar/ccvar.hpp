#ifndef CCVAR_CCVAR_HPP
#define CCVAR_CCVAR_HPP

#include "ccvar/data.hpp"
#include "ccvar/error.hpp"
#include "ccvar/fit.hpp"
#include "ccvar/frailty.hpp"
#include "ccvar/garch.hpp"
#include "ccvar/generators.hpp"
#include "ccvar/innovations.hpp"
#include "ccvar/kendall.hpp"
#include "ccvar/keyvalue.hpp"
#include "ccvar/measure.hpp"
#include "ccvar/optimize.hpp"
#include "ccvar/pipeline.hpp"
#include "ccvar/portfolio.hpp"
#include "ccvar/quadrature.hpp"
#include "ccvar/random.hpp"
#include "ccvar/sampling.hpp"
#include "ccvar/special_functions.hpp"

#endif
