#pragma once

// Umbrella header.

#include "mixie/backend.hpp"
#include "mixie/codec.hpp"
#include "mixie/dataset.hpp"
#include "mixie/errors.hpp"
#include "mixie/eval.hpp"
#include "mixie/extract.hpp"
#include "mixie/instruction_words.hpp"
#include "mixie/model.hpp"
#include "mixie/rng.hpp"
#include "mixie/scorer.hpp"
#include "mixie/text.hpp"
