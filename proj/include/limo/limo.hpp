#pragma once

#include "limo/error.hpp"
#include "limo/random.hpp"
#include "limo/data.hpp"
#include "limo/io.hpp"
#include "limo/synthetic.hpp"
#include "limo/split.hpp"
#include "limo/measures.hpp"
#include "limo/margins.hpp"
#include "limo/trainer.hpp"
#include "limo/thresholding.hpp"
#include "limo/model_file.hpp"
#include "limo/experiment.hpp"
