#pragma once

#include "homsim/analysis.hpp"
#include "homsim/channels.hpp"
#include "homsim/coherent.hpp"
#include "homsim/config.hpp"
#include "homsim/errors.hpp"
#include "homsim/fock.hpp"
#include "homsim/jsa_swap.hpp"
#include "homsim/optimize.hpp"
#include "homsim/oracle.hpp"
#include "homsim/polarization.hpp"
#include "homsim/protocols.hpp"
#include "homsim/quadrature.hpp"
#include "homsim/spectral.hpp"
#include "homsim/sweep.hpp"
#include "homsim/units.hpp"
