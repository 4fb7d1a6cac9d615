#ifndef MLQM_MLQM_HPP
#define MLQM_MLQM_HPP

#include "mlqm/errors.hpp"
#include "mlqm/deformation.hpp"
#include "mlqm/jet.hpp"
#include "mlqm/special_functions.hpp"
#include "mlqm/quadrature.hpp"
#include "mlqm/inner_product.hpp"
#include "mlqm/deformed_algebra.hpp"
#include "mlqm/pct.hpp"
#include "mlqm/models.hpp"
#include "mlqm/dense_eigen.hpp"
#include "mlqm/eigensolver.hpp"
#include "mlqm/verification.hpp"
#include "mlqm/cli_io.hpp"

#endif
