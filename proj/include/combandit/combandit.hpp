#pragma once

#include "combandit/assumptions.hpp"
#include "combandit/bounds.hpp"
#include "combandit/dynamics.hpp"
#include "combandit/environments.hpp"
#include "combandit/episode.hpp"
#include "combandit/error.hpp"
#include "combandit/format.hpp"
#include "combandit/model.hpp"
#include "combandit/oracle.hpp"
#include "combandit/plot.hpp"
#include "combandit/quadrature.hpp"
#include "combandit/report.hpp"
#include "combandit/rng.hpp"
#include "combandit/subset.hpp"
#include "combandit/tabular_io.hpp"
#include "combandit/trace.hpp"
#include "combandit/ucb.hpp"
