#pragma once

#include "rwdnn/error.hpp"
#include "rwdnn/rng.hpp"
#include "rwdnn/mlp.hpp"
#include "rwdnn/losses.hpp"
#include "rwdnn/dgp.hpp"
#include "rwdnn/trainer.hpp"
#include "rwdnn/theory.hpp"
#include "rwdnn/harness.hpp"
#include "rwdnn/io.hpp"
