#pragma once

#include "aecrit/corpus.hpp"
#include "aecrit/criterion.hpp"
#include "aecrit/errors.hpp"
#include "aecrit/fourier.hpp"
#include "aecrit/measure.hpp"
#include "aecrit/numeric.hpp"
#include "aecrit/report.hpp"
#include "aecrit/sequence.hpp"
#include "aecrit/spaces.hpp"
#include "aecrit/trial.hpp"
#include "aecrit/version.hpp"
