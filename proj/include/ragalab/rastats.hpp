#pragma once

#include "ragalab/stats/chisquare.hpp"
#include "ragalab/stats/frequency.hpp"
#include "ragalab/stats/multinomial.hpp"
#include "ragalab/stats/polyfit.hpp"
#include "ragalab/stats/runtest.hpp"
#include "ragalab/stats/stability.hpp"
