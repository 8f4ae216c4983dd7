#pragma once

#include "pwlfit/common.hpp"
#include "pwlfit/cost.hpp"
#include "pwlfit/envelope.hpp"
#include "pwlfit/errors.hpp"
#include "pwlfit/io.hpp"
#include "pwlfit/oracle.hpp"
#include "pwlfit/quadratic.hpp"
#include "pwlfit/signal.hpp"
#include "pwlfit/solver.hpp"
