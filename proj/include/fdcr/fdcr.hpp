//---------------------------------------------------------------------------//
// Copyright fdcr contributors
// SPDX-License-Identifier: Apache-2.0
//---------------------------------------------------------------------------//
//! \file fdcr/fdcr.hpp
//! Umbrella header.
//---------------------------------------------------------------------------//
#pragma once

#include "analytic.hpp"
#include "config_io.hpp"
#include "experiment.hpp"
#include "fading.hpp"
#include "markov.hpp"
#include "montecarlo.hpp"
#include "params.hpp"
#include "quadrature.hpp"
#include "specfun.hpp"
#include "throughput.hpp"
