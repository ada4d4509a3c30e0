#pragma once

#include "ssdml/common.hpp"
#include "ssdml/dataset.hpp"
#include "ssdml/embednet.hpp"
#include "ssdml/eval.hpp"
#include "ssdml/graph.hpp"
#include "ssdml/manifold.hpp"
#include "ssdml/metric_loss.hpp"
#include "ssdml/mining.hpp"
#include "ssdml/random.hpp"
#include "ssdml/trainer.hpp"
