// qss.hpp — umbrella header

#pragma once

#include "qss/fock.hpp"
#include "qss/harness.hpp"
#include "qss/linalg.hpp"
#include "qss/measurement.hpp"
#include "qss/optimize.hpp"
#include "qss/pauli.hpp"
#include "qss/serialize.hpp"
#include "qss/synthesis.hpp"
#include "qss/vqe.hpp"
