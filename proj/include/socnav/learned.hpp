#pragma once

#include "socnav/features.hpp"
#include "socnav/geometry.hpp"
#include "socnav/mlp.hpp"

namespace socnav {

inline const std::vector<int> kBcLayerSizes = {kFeatureDim, 128, 128, kBcOutputDim};
inline const std::vector<int> kGateLayerSizes = {kFeatureDim, 128, 128, 2};

// Behavior cloning on the non-compliant subset: MSE on the displacement
// encoding of the 16-waypoint demo targets. Throws DataError
// ("no non-compliant data") on an empty dataset.
TrainResult train_bc(const Dataset& dn, const TrainConfig& cfg);

// Gating classifier on {features, c}: softmax cross-entropy with
// inverse-frequency sample weights; best validation accuracy wins.
TrainResult train_gate(const Dataset& labeled, const TrainConfig& cfg);

struct BcPrediction {
    GlobalPlan plan;     // world frame, resampled to kPlanPoints
    Command command;     // pure pursuit over the predicted waypoints
    bool degenerate = false;
};

BcPrediction bc_predict(const Mlp& net, const Observation& obs);

// P(class 1) = P(the classical planner is compliant here).
double gate_predict(const Mlp& net, const Observation& obs);
double gate_predict_features(const Mlp& net, const std::vector<double>& features);

} // namespace socnav
