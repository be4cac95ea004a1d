#pragma once

#include "feqo/analysis.hpp"
#include "feqo/checksum.hpp"
#include "feqo/constants.hpp"
#include "feqo/dirac.hpp"
#include "feqo/errors.hpp"
#include "feqo/experiment.hpp"
#include "feqo/fft.hpp"
#include "feqo/field_profile.hpp"
#include "feqo/grid_io.hpp"
#include "feqo/heatmap.hpp"
#include "feqo/physics.hpp"
#include "feqo/presets.hpp"
#include "feqo/regime.hpp"
#include "feqo/runner.hpp"
#include "feqo/tdse.hpp"
#include "feqo/tridiagonal.hpp"
#include "feqo/wavepacket.hpp"
#include "feqo/wigner.hpp"
