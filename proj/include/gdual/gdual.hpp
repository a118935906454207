#ifndef GDUAL_GDUAL_HPP_
#define GDUAL_GDUAL_HPP_

#include "gdual/error.hpp"
#include "gdual/oplin.hpp"
#include "gdual/frame.hpp"
#include "gdual/duality.hpp"
#include "gdual/perturbation.hpp"
#include "gdual/gabor.hpp"

#endif  // GDUAL_GDUAL_HPP_
