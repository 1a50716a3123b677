#pragma once

#include "emocult/circumplex.hpp"
#include "emocult/corpus.hpp"
#include "emocult/error.hpp"
#include "emocult/genprob.hpp"
#include "emocult/io.hpp"
#include "emocult/metrics.hpp"
#include "emocult/stats.hpp"
#include "emocult/study.hpp"
