#pragma once

#include "meanbounds/agm.hpp"
#include "meanbounds/bounds.hpp"
#include "meanbounds/elliptic.hpp"
#include "meanbounds/error.hpp"
#include "meanbounds/means.hpp"
#include "meanbounds/report.hpp"
#include "meanbounds/series.hpp"
#include "meanbounds/verify.hpp"
