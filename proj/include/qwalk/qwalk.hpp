#pragma once

#include "qwalk/catalog.hpp"
#include "qwalk/config.hpp"
#include "qwalk/edge_io.hpp"
#include "qwalk/error.hpp"
#include "qwalk/eval.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/heuristics.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/report.hpp"
#include "qwalk/spectral.hpp"
#include "qwalk/transition.hpp"
#include "qwalk/walk.hpp"
