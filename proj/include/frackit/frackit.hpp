#pragma once

#include "errors.hpp"
#include "series.hpp"
#include "special_fn.hpp"
#include "grid.hpp"
#include "frac_ops.hpp"
#include "laplace_lab.hpp"
#include "reaction.hpp"
#include "diffusion.hpp"
#include "config.hpp"
