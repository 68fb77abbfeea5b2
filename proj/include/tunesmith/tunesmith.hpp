/**
 * @file tunesmith.hpp
 * @brief Umbrella header.
 */
#pragma once

#include "tunesmith/bridge.hpp"
#include "tunesmith/corpus.hpp"
#include "tunesmith/decoder.hpp"
#include "tunesmith/error.hpp"
#include "tunesmith/lm.hpp"
#include "tunesmith/melody.hpp"
#include "tunesmith/metrics.hpp"
#include "tunesmith/multitask.hpp"
#include "tunesmith/ngram.hpp"
#include "tunesmith/phonetics.hpp"
#include "tunesmith/pipeline.hpp"
#include "tunesmith/planner.hpp"
#include "tunesmith/text.hpp"
#include "tunesmith/wordlists.hpp"
