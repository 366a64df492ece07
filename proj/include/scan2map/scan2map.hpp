#pragma once

#include "scan2map/benchmark.hpp"
#include "scan2map/change_detection.hpp"
#include "scan2map/errors.hpp"
#include "scan2map/icp.hpp"
#include "scan2map/kd_tree.hpp"
#include "scan2map/normal_estimation.hpp"
#include "scan2map/ply_io.hpp"
#include "scan2map/point_cloud.hpp"
#include "scan2map/report_io.hpp"
#include "scan2map/rng.hpp"
#include "scan2map/run_config.hpp"
#include "scan2map/scan_projection.hpp"
#include "scan2map/se3.hpp"
#include "scan2map/stats.hpp"
#include "scan2map/synthetic_scenes.hpp"
#include "scan2map/trajectory_io.hpp"
#include "scan2map/voxel_filter.hpp"
