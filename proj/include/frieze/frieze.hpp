#pragma once

#include "frieze/certificate.hpp"
#include "frieze/density.hpp"
#include "frieze/errors.hpp"
#include "frieze/experiment.hpp"
#include "frieze/rational.hpp"
#include "frieze/scale_search.hpp"
#include "frieze/set_model.hpp"
#include "frieze/spec_expression.hpp"
