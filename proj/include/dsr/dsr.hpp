#pragma once

#include "dsr/bench.hpp"
#include "dsr/clustering.hpp"
#include "dsr/error.hpp"
#include "dsr/fft.hpp"
#include "dsr/image.hpp"
#include "dsr/io.hpp"
#include "dsr/metrics.hpp"
#include "dsr/pipeline.hpp"
#include "dsr/seeding.hpp"
#include "dsr/spectral.hpp"
