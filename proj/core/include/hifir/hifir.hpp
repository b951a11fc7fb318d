/// \file hifir/hifir.hpp
/// \brief Umbrella header

#pragma once

#include "hifir/condest.hpp"
#include "hifir/dense.hpp"
#include "hifir/generators.hpp"
#include "hifir/hif.hpp"
#include "hifir/ksp.hpp"
#include "hifir/matrix_market.hpp"
#include "hifir/mlilu.hpp"
#include "hifir/nullspace.hpp"
#include "hifir/operator.hpp"
#include "hifir/pipit.hpp"
#include "hifir/prefactor.hpp"
#include "hifir/rrqr.hpp"
#include "hifir/sparse.hpp"
