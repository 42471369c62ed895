#pragma once

#include "grid.hpp"
#include "fft.hpp"
#include "spectral.hpp"
#include "norms.hpp"
#include "dynamics.hpp"
#include "characteristics.hpp"
#include "diagnostics.hpp"
#include "theorems.hpp"
#include "initial_data.hpp"
#include "config.hpp"
#include "io.hpp"
#include "experiment.hpp"
