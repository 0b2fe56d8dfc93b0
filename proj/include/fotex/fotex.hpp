#pragma once

#include "fotex/errors.hpp"
#include "fotex/eig.hpp"
#include "fotex/tensor.hpp"
#include "fotex/sphere.hpp"
#include "fotex/param_symmetry.hpp"
#include "fotex/sdp.hpp"
#include "fotex/fot.hpp"
#include "fotex/realize.hpp"
#include "fotex/io.hpp"
