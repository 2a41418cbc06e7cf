#pragma once

#include "fanoqed/errors.hpp"
#include "fanoqed/params.hpp"
#include "fanoqed/rates.hpp"
#include "fanoqed/ode.hpp"
#include "fanoqed/dynamics.hpp"
#include "fanoqed/lindblad.hpp"
#include "fanoqed/quadrature.hpp"
#include "fanoqed/spectra.hpp"
#include "fanoqed/spectrum_oracle.hpp"
#include "fanoqed/sweep.hpp"
