#pragma once

#include "siac/error.hpp"
#include "siac/quadrature.hpp"
#include "siac/grid_init.hpp"
#include "siac/bspline.hpp"
#include "siac/kernel.hpp"
#include "siac/convolution.hpp"
#include "siac/spectral.hpp"
#include "siac/bohm.hpp"
