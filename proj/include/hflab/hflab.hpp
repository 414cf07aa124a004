#pragma once

#include "hflab/errors.hpp"
#include "hflab/scalar.hpp"
#include "hflab/linalg.hpp"
#include "hflab/report.hpp"
#include "hflab/hopf.hpp"
#include "hflab/qls.hpp"
#include "hflab/graded.hpp"
#include "hflab/growth.hpp"
#include "hflab/json_io.hpp"
#include "hflab/scenario.hpp"
