#pragma once

// Umbrella header for the function-specific word representation library.

#include "fswrep/checkpoint.hpp"
#include "fswrep/compose.hpp"
#include "fswrep/corpus.hpp"
#include "fswrep/datasets.hpp"
#include "fswrep/error.hpp"
#include "fswrep/eval.hpp"
#include "fswrep/export.hpp"
#include "fswrep/matrix.hpp"
#include "fswrep/model.hpp"
#include "fswrep/schema.hpp"
#include "fswrep/synthetic.hpp"
#include "fswrep/training.hpp"
#include "fswrep/vocab.hpp"
