#ifndef SPLINEKERN_SPLINEKERN_HPP
#define SPLINEKERN_SPLINEKERN_HPP

#include "splinekern/bandwidth.hpp"
#include "splinekern/banded.hpp"
#include "splinekern/bvp.hpp"
#include "splinekern/calculus.hpp"
#include "splinekern/config.hpp"
#include "splinekern/density.hpp"
#include "splinekern/estimators.hpp"
#include "splinekern/grid.hpp"
#include "splinekern/io.hpp"
#include "splinekern/kernel.hpp"
#include "splinekern/model.hpp"
#include "splinekern/rng.hpp"
#include "splinekern/spline.hpp"
#include "splinekern/stats.hpp"
#include "splinekern/study.hpp"

#endif
