#pragma once

#include "dustgrcm/error.hpp"
#include "dustgrcm/imaging.hpp"
#include "dustgrcm/rank.hpp"
#include "dustgrcm/grcm.hpp"
#include "dustgrcm/inertia.hpp"
#include "dustgrcm/pipeline.hpp"
#include "dustgrcm/calibration.hpp"
#include "dustgrcm/sample_io.hpp"
#include "dustgrcm/sweep.hpp"
#include "dustgrcm/synthgen.hpp"
