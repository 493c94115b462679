#ifndef OTTO_OTTO_HPP
#define OTTO_OTTO_HPP

#include "otto/error.hpp"
#include "otto/operator.hpp"
#include "otto/spin_system.hpp"
#include "otto/propagation.hpp"
#include "otto/otto_cycle.hpp"
#include "otto/open_system.hpp"
#include "otto/experiments.hpp"

#endif  // OTTO_OTTO_HPP
