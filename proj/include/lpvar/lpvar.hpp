#pragma once

#include "lpvar/error.hpp"
#include "lpvar/grid.hpp"
#include "lpvar/smooth.hpp"
#include "lpvar/exponent.hpp"
#include "lpvar/norms.hpp"
#include "lpvar/muckenhoupt.hpp"
#include "lpvar/wavelets.hpp"
#include "lpvar/operators.hpp"
#include "lpvar/sparse.hpp"
#include "lpvar/kernels.hpp"
#include "lpvar/random.hpp"
#include "lpvar/catalog.hpp"
#include "lpvar/io.hpp"
#include "lpvar/experiments.hpp"
