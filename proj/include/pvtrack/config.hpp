#pragma once

#include <string>

#include "pvtrack/experiment.hpp"
#include "pvtrack/tuner.hpp"

namespace pvtrack {

// JSON schemas (documented in the README):
//   pvnav-layout-v1      plant rows, ground/panel appearance, scene seed
//   pvnav-mission-v1     waypoint list (x, y, label)
//   pvnav-thresholds-v1  the nine segmentation thresholds
//   pvnav-experiment-v1  full run configuration; layout/mission may be
//                        inline objects or paths to the files above

PlantLayout load_layout(const std::string& path);
void save_layout(const PlantLayout& layout, const std::string& path);

Mission load_mission(const std::string& path);
void save_mission(const Mission& mission, const std::string& path);

ThresholdSet load_thresholds(const std::string& path);
void save_thresholds(const ThresholdSet& thresholds, const std::string& path);
void save_tune_result(const TuneResult& result, const std::string& path);

ThresholdBounds load_bounds(const std::string& path);

/// Relative layout/mission paths inside the config resolve against the
/// config file's directory.
ExperimentConfig load_experiment_config(const std::string& path);
void save_experiment_config(const ExperimentConfig& cfg, const std::string& path);

} // namespace pvtrack
