// SPDX-License-Identifier: Apache-2.0
//
// relaydmt: outage, mutual-information and DM-tradeoff laboratory for
// two-relay cooperative diversity.
// ------------------------------------------------------------------------

#pragma once

#include "channel.hpp"
#include "errors.hpp"
#include "mutualinfo.hpp"
#include "outage.hpp"
#include "quadrature.hpp"
#include "rng.hpp"
#include "toeplitz.hpp"
#include "tradeoff.hpp"
#include "waveform.hpp"
