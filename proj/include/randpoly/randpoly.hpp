#pragma once

#include "randpoly/types.hpp"
#include "randpoly/hull2d.hpp"
#include "randpoly/body.hpp"
#include "randpoly/curvature.hpp"
#include "randpoly/quadrature.hpp"
#include "randpoly/weight.hpp"
#include "randpoly/rng.hpp"
#include "randpoly/sampling.hpp"
#include "randpoly/functionals.hpp"
#include "randpoly/stats.hpp"
#include "randpoly/parallel.hpp"
#include "randpoly/experiments.hpp"
#include "randpoly/config.hpp"
#include "randpoly/csv.hpp"
#include "randpoly/cli.hpp"
