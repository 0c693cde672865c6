#pragma once

#include "ragalab/contour.hpp"
#include "ragalab/notedetect.hpp"
#include "ragalab/pitchdata.hpp"
#include "ragalab/rastats.hpp"
#include "ragalab/report.hpp"
#include "ragalab/synth.hpp"
