#pragma once

#include "mtsplace/baselines.hpp"
#include "mtsplace/channel_sim.hpp"
#include "mtsplace/channels.hpp"
#include "mtsplace/harness.hpp"
#include "mtsplace/io.hpp"
#include "mtsplace/multi_receiver.hpp"
#include "mtsplace/optimizer.hpp"
