#pragma once

#include "scenematch/possibility.hpp"
#include "scenematch/vocabulary.hpp"
#include "scenematch/description.hpp"
#include "scenematch/parser.hpp"
#include "scenematch/scene.hpp"
#include "scenematch/geometry.hpp"
#include "scenematch/matcher.hpp"
#include "scenematch/redundancy.hpp"
#include "scenematch/generator.hpp"
#include "scenematch/report.hpp"
