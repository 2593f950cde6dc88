#pragma once

// Umbrella header for the core library. The steering server lives in
// fdms/server.hpp and additionally needs Boost.Beast.

#include "fdms/builders.hpp"
#include "fdms/content_hash.hpp"
#include "fdms/dataio.hpp"
#include "fdms/error.hpp"
#include "fdms/hand_model.hpp"
#include "fdms/joint_subset.hpp"
#include "fdms/notation.hpp"
#include "fdms/posture_sequence.hpp"
#include "fdms/report.hpp"
#include "fdms/simtasks.hpp"
#include "fdms/switching.hpp"
#include "fdms/synergy.hpp"
