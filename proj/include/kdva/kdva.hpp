#pragma once

#include "kdva/composer.hpp"
#include "kdva/core.hpp"
#include "kdva/effective.hpp"
#include "kdva/errors.hpp"
#include "kdva/full_solver.hpp"
#include "kdva/kdv.hpp"
#include "kdva/regular.hpp"
#include "kdva/spectral.hpp"
#include "kdva/verifier.hpp"
