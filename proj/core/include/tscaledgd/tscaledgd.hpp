#pragma once

#include "tscaledgd/error.hpp"
#include "tscaledgd/facewise.hpp"
#include "tscaledgd/metrics.hpp"
#include "tscaledgd/solvers.hpp"
#include "tscaledgd/synth.hpp"
#include "tscaledgd/talg.hpp"
#include "tscaledgd/tensor3.hpp"
#include "tscaledgd/transform.hpp"
#include "tscaledgd/tsr3.hpp"
