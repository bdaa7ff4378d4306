#pragma once

#include "nonint/field_tower.hpp"
#include "nonint/polynomial.hpp"
#include "nonint/rational_function.hpp"
#include "nonint/linear_system.hpp"
#include "nonint/nve_reduction.hpp"
#include "nonint/spectral_analysis.hpp"
#include "nonint/galois_decision.hpp"
#include "nonint/certificate_io.hpp"
#include "nonint/dynamics_check.hpp"
#include "nonint/certifier.hpp"
